//! Quadrature engines and the explicit integral and trace formulas for
//! `ct(fμ)`: torus Fourier quadrature, the A1 and A2 pole decompositions,
//! Σ-sums, Jackson sums, affine symmetrizers, the noncompact pairing and
//! the `q → 0` limit.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mumeasure::{mu_ratio, res_mu, MuProduct};
use crate::polyrep::{apply_t, apply_t_elem_inv, apply_t_w0, apply_y, DiamondOp};
use crate::qlaurent::{LaurentPoly, ParamSet, C64};
use crate::rootdata::{qf, Family, RootDatum, Weight};
use crate::weyl::{elements_by_length, AffineRoot, ExtWeyl};

/// Contour and grid settings for the quadrature engines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// contour shift: `Re x_{α_i} = υ`
    pub upsilon: f64,
    /// initial grid size per coordinate
    pub m: usize,
    /// largest grid size tried by doubling
    pub max_m: usize,
    /// absolute agreement required between successive doublings
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { upsilon: 0.0, m: 64, max_m: 1024, tol: 1e-12 }
    }
}

impl QuadratureSpec {
    pub fn shifted(upsilon: f64) -> Self {
        QuadratureSpec { upsilon, ..Default::default() }
    }

    /// Per-coordinate cap keeping the grid below about 2·10⁶ points.
    fn cap(&self, rank: usize) -> usize {
        let by_rank = match rank {
            1 => 1 << 16,
            2 => 1024,
            3 => 96,
            _ => 32,
        };
        self.max_m.min(by_rank).max(self.m)
    }
}

/// A quadrature value with its convergence data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: C64,
    /// final grid size per coordinate
    pub m: usize,
    /// difference to the previous doubling
    pub delta: f64,
}

pub(crate) fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap()).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        for x in m[c].iter_mut() {
            *x /= d;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                let rc = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(rc) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// The point with `Re x_{α_i} = υ` and `X_{ω_j} = |·| e^{iφ_j}`.
pub struct TorusMap {
    ginv: Vec<Vec<f64>>,
    re: Vec<f64>,
    ln_q: f64,
}

impl TorusMap {
    pub fn new(rd: &RootDatum, ps: &ParamSet, upsilon: f64) -> Self {
        TorusMap {
            ginv: invert(&rd.gram_omega_f),
            re: rd.nu.iter().map(|&nu| upsilon / nu as f64).collect(),
            ln_q: ps.ln_q(),
        }
    }

    pub fn point(&self, phi: &[f64]) -> Vec<C64> {
        self.re
            .iter()
            .zip(&self.ginv)
            .map(|(re, row)| {
                let im: f64 = row.iter().zip(phi).map(|(g, p)| g * p).sum();
                C64::new(*re, im / self.ln_q)
            })
            .collect()
    }
}

/// Trapezoid rule with `m` points per coordinate over the P-torus: the mean of
/// `F` over `Re x_{α_i} = υ`.
pub fn torus_ct_quadrature<F>(rd: &RootDatum, ps: &ParamSet, f: &F, upsilon: f64, m: usize) -> Result<C64>
where
    F: Fn(&[C64]) -> Result<C64> + Sync,
{
    let n = rd.rank;
    let map = TorusMap::new(rd, ps, upsilon);
    let total = m.pow(n as u32);
    let vals: Vec<Result<C64>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut phi = vec![0.0; n];
            for p in phi.iter_mut() {
                *p = 2.0 * PI * (idx % m) as f64 / m as f64;
                idx /= m;
            }
            f(&map.point(&phi))
        })
        .collect();
    let mut s = C64::new(0.0, 0.0);
    for v in vals {
        s += v?;
    }
    Ok(s / total as f64)
}

/// Doubling until two successive grids agree to `spec.tol`.
pub fn torus_ct_adaptive<F>(rd: &RootDatum, ps: &ParamSet, f: &F, spec: &QuadratureSpec) -> Result<QuadValue>
where
    F: Fn(&[C64]) -> Result<C64> + Sync,
{
    let cap = spec.cap(rd.rank);
    let mut m = spec.m;
    let mut prev = torus_ct_quadrature(rd, ps, f, spec.upsilon, m)?;
    loop {
        let m2 = 2 * m;
        if m2 > cap {
            return Err(Error::NoConvergence(format!(
                "torus quadrature did not settle by M = {m} (last change unavailable)"
            )));
        }
        let cur = torus_ct_quadrature(rd, ps, f, spec.upsilon, m2)?;
        let delta = (cur - prev).norm();
        if delta <= spec.tol * (1.0 + cur.norm()) {
            return Ok(QuadValue { value: cur, m: m2, delta });
        }
        prev = cur;
        m = m2;
    }
}

/// `ct(fμ)` by torus quadrature on the contour `Re x_{α_i} = υ`.
pub fn quad_ct_f_mu(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, spec: &QuadratureSpec) -> Result<QuadValue> {
    let mu = MuProduct::new(rd, ps);
    let g = |x: &[C64]| -> Result<C64> {
        let fv: C64 = f.terms.iter().map(|(b, c)| c * ps.qpow(rd.pair_c(b, x))).sum();
        Ok(fv * mu.eval(rd, ps, x)?.value)
    };
    torus_ct_adaptive(rd, ps, &g, spec)
}

/// The part of `f` supported on the root lattice.
pub fn root_lattice_part(rd: &RootDatum, f: &LaurentPoly) -> LaurentPoly {
    LaurentPoly {
        terms: f.terms.iter().filter(|(b, _)| in_root_lattice(rd, b)).map(|(b, c)| (b.clone(), *c)).collect(),
    }
}

/// `b ∈ Q` iff `(b, ω_j^∨)`-type coordinates `A^{-T} b` are integral.
pub fn in_root_lattice(rd: &RootDatum, b: &[i64]) -> bool {
    // α-coordinates: b = Σ c_i α_i with row i of the Cartan matrix = α_i
    let n = rd.rank;
    let at: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| rd.cartan[j][i] as f64).collect()).collect();
    let inv = invert(&at);
    inv.iter().all(|row| {
        let c: f64 = row.iter().zip(b).map(|(a, &x)| a * x as f64).sum();
        (c - c.round()).abs() < 1e-9
    })
}

/// Evaluate `f` at the point with q-exponents `ξ` (ω-coordinates).
pub fn eval_at(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, xi: &[C64]) -> C64 {
    f.terms.iter().map(|(b, c)| c * ps.qpow(rd.pair_c(b, xi))).sum()
}


fn require_type(rd: &RootDatum, family: Family, rank: usize, op: &str) -> Result<()> {
    if rd.family != family || rd.rank != rank {
        return Err(Error::Unsupported(format!("{op} needs {family:?}{rank}, got {}", rd.label())));
    }
    Ok(())
}

/// Mean of `g(y)` over `y = iθ/ln q`, `θ ∈ [0, 2π)`, doubling the grid as in
/// [`torus_ct_adaptive`].
pub fn circle_mean<G>(ps: &ParamSet, g: &G, spec: &QuadratureSpec) -> Result<QuadValue>
where
    G: Fn(C64) -> Result<C64> + Sync,
{
    let ln_q = ps.ln_q();
    let mean = |m: usize| -> Result<C64> {
        let vals: Vec<Result<C64>> = (0..m)
            .into_par_iter()
            .map(|i| g(C64::new(0.0, 2.0 * PI * i as f64 / m as f64 / ln_q)))
            .collect();
        let mut s = C64::new(0.0, 0.0);
        for v in vals {
            s += v?;
        }
        Ok(s / m as f64)
    };
    let cap = spec.cap(1);
    let mut m = spec.m;
    let mut prev = mean(m)?;
    loop {
        if 2 * m > cap {
            return Err(Error::NoConvergence(format!("circle quadrature did not settle by M = {m}")));
        }
        m *= 2;
        let cur = mean(m)?;
        let delta = (cur - prev).norm();
        if delta <= spec.tol * (1.0 + cur.norm()) {
            return Ok(QuadValue { value: cur, m, delta });
        }
        prev = cur;
    }
}

/// `Π_{i≥start} factor(i)`, stopped once three consecutive factors are within
/// `1e-17` of one.
fn infinite_product(start: i64, factor: impl Fn(i64) -> C64) -> Result<C64> {
    let mut v = C64::new(1.0, 0.0);
    let mut quiet = 0;
    for i in start..start + 100_000 {
        let f = factor(i);
        if !f.is_finite() {
            return Err(Error::Pole(format!("infinite product factor {i} is singular")));
        }
        v *= f;
        quiet = if (f - 1.0).norm() < 1e-17 { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence("infinite product".into()))
}

fn checked_div(num: C64, den: C64, what: &str) -> Result<C64> {
    if den.norm() < 1e-12 * (1.0 + num.norm()) {
        return Err(Error::Pole(what.to_string()));
    }
    Ok(num / den)
}

/// `Π_{i=1}^{j} (1 − t²qⁱ)/(1 − qⁱ)`.
fn pochhammer_ratio(q: f64, t: C64, j: i64) -> C64 {
    (1..=j).map(|i| (1.0 - t * t * q.powi(i as i32)) / (1.0 - q.powi(i as i32))).product()
}

/// `ct(fμ)` for A1 as the υ = 0 torus integral plus the residues at
/// `q^{−k}` and `q^{±(k+j)}`, `1 ≤ j ≤ ℓ = ⌊−Re k⌋`.
pub fn a1_ct_formula(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, spec: &QuadratureSpec) -> Result<C64> {
    require_type(rd, Family::A, 1, "a1_ct_formula")?;
    let fq = root_lattice_part(rd, f);
    let int0 = quad_ct_f_mu(rd, ps, &fq, &QuadratureSpec { upsilon: 0.0, ..spec.clone() })?.value;
    let re_k = ps.k_sht.re;
    if re_k > 0.0 {
        return Ok(int0);
    }
    if (re_k - re_k.round()).abs() < 1e-9 {
        return Err(Error::NonGeneric(format!("Re k = {re_k} puts a pole on the contour")));
    }
    let l = (-re_k).floor() as i64;
    let (q, t, k) = (ps.q, ps.t(1), ps.k_sht);
    let res = res_mu(rd, ps, &[0])?;
    let at = |x: C64| eval_at(rd, ps, &fq, &[x]);
    let mut s = at(-k);
    for j in 1..=l {
        // j⁺ = j − 1 for the point q^{k+j}, j⁻ = j for q^{−k−j}
        let plus = t.powi(-(j as i32 - 1)) * pochhammer_ratio(q, t, j - 1);
        let minus = t.powi(-(j as i32)) * pochhammer_ratio(q, t, j);
        let (vp, vm) = (at(k + j as f64), at(-(k + j as f64)));
        if !(plus.is_finite() && minus.is_finite()) {
            return Err(Error::Pole(format!("residue factor at j = {j}")));
        }
        s += vp * plus + vm * minus;
    }
    Ok(int0 + res * s)
}

/// Stops a series once `window` consecutive blocks are each below `eps`
/// (relative to the running sum) and non-increasing.
#[derive(Clone, Debug)]
struct TailDetector {
    window: usize,
    eps: f64,
    quiet: usize,
    last: f64,
}

impl TailDetector {
    fn new(eps: f64) -> Self {
        TailDetector { window: 10, eps, quiet: 0, last: f64::INFINITY }
    }

    fn push(&mut self, block: C64, total: C64) -> bool {
        let b = block.norm();
        if b <= self.eps * (1.0 + total.norm()) && b <= self.last * (1.0 + 1e-12) + 1e-300 {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.last = b;
        self.quiet >= self.window
    }
}

/// The α-exponents of the monomials of `f_Q` (rank one: `b/2`).
fn alpha_coords(rd: &RootDatum, b: &[i64]) -> Vec<i64> {
    let n = rd.rank;
    let at: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| rd.cartan[j][i] as f64).collect()).collect();
    invert(&at)
        .iter()
        .map(|row| row.iter().zip(b).map(|(a, &x)| a * x as f64).sum::<f64>().round() as i64)
        .collect()
}

/// The A1 Jackson series `μ_•(q^{−k}) Σ_{j≥1} f(q^{k+j}) t^{1−j} Π_{i<j}(1−t²qⁱ)/(1−qⁱ)`.
pub fn a1_jackson_series(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, cutoff: usize) -> Result<C64> {
    require_type(rd, Family::A, 1, "a1_jackson_series")?;
    let fq = root_lattice_part(rd, f);
    let re_k = ps.k_sht.re;
    for (b, _) in &fq.terms {
        let a = alpha_coords(rd, b)[0];
        if (a as f64) <= re_k {
            return Err(Error::Cone(format!("X_α^{a} needs {a} > Re k = {re_k}")));
        }
    }
    let (q, t, k) = (ps.q, ps.t(1), ps.k_sht);
    let res = res_mu(rd, ps, &[0])?;
    let mut det = TailDetector::new(ps.eps);
    let mut coef = C64::new(1.0, 0.0);
    let mut s = C64::new(0.0, 0.0);
    for j in 1..=cutoff as i64 {
        if j > 1 {
            coef *= (1.0 - t * t * q.powi(j as i32 - 1)) / ((1.0 - q.powi(j as i32 - 1)) * t);
        }
        let term = eval_at(rd, ps, &fq, &[k + j as f64]) * coef;
        s += term;
        if det.push(term, s) {
            return Ok(res * s);
        }
    }
    Err(Error::NoConvergence(format!("Jackson series tail still above {} after {cutoff} terms", ps.eps)))
}

/// The A2 residue weights and one-dimensional kernels in the coordinates
/// `(X, Y) = (q^{x_{α₁}}, q^{x_{α₂}})`.
#[derive(Debug)]
pub struct A2Kernels {
    q: f64,
    t: C64,
    /// `ϱ = μ_•(t^{-1}, t^{-1})`
    pub rho: C64,
    pub rho0: C64,
    memo: Mutex<HashMap<(u8, i64, i64), C64>>,
}

impl A2Kernels {
    pub fn new(ps: &ParamSet) -> Result<Self> {
        let (q, t) = (ps.q, ps.t(1));
        let qi = |i: i64| q.powi(i as i32);
        let rho0 = infinite_product(0, |i| {
            (1.0 - qi(i) / t) * (1.0 - t * qi(i + 1)) / ((1.0 - qi(i + 1)) * (1.0 - t * t * qi(i + 1)))
        })?;
        let rho = infinite_product(0, |i| {
            let a = 1.0 - t * qi(i + 1);
            (1.0 - qi(i) / t) * a * a * (1.0 - qi(i) / (t * t))
                / ((1.0 - qi(i + 1)).powi(2) * (1.0 - t * t * qi(i + 1)) * (1.0 - t.powi(3) * qi(i + 1)))
        })?;
        Ok(A2Kernels { q, t, rho, rho0, memo: Mutex::new(HashMap::new()) })
    }

    fn qi(&self, i: i64) -> f64 {
        self.q.powi(i as i32)
    }

    fn memoized(&self, key: (u8, i64, i64), f: impl FnOnce() -> Result<C64>) -> Result<C64> {
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        self.memo.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// `ϖ₁(m, n) = μ_•(tq^m, tq^n)/ϱ` for `m, n ≥ 1`.
    pub fn varpi1(&self, m: i64, n: i64) -> Result<C64> {
        if m < 1 || n < 1 {
            return Err(Error::Invalid(format!("varpi1({m}, {n}) needs m, n >= 1")));
        }
        self.memoized((1, m, n), || {
            let t = self.t;
            let mut v = t.powi(3 - 2 * (m + n) as i32) * pochhammer_ratio(self.q, t, m - 1) * pochhammer_ratio(self.q, t, n - 1);
            for j in 1..m + n {
                v *= checked_div(1.0 - t.powi(3) * self.qi(j), 1.0 - t * self.qi(j), "1 - t q^j in varpi1")?;
            }
            Ok(v)
        })
    }

    /// `ϖ₂(m, n) = μ_•(t^{-1}q^{m−n}, t²qⁿ)/ϱ` for `1 ≤ m ≤ n`.
    pub fn varpi2(&self, m: i64, n: i64) -> Result<C64> {
        if m < 1 || n < m {
            return Err(Error::Invalid(format!("varpi2({m}, {n}) needs 1 <= m <= n")));
        }
        self.memoized((2, m, n), || {
            let t = self.t;
            let t2 = t * t;
            let mut v = t.powi(2 - 2 * n as i32);
            for j in 1..m {
                v *= (1.0 - t2 * self.qi(j)) / (1.0 - self.qi(j));
                v *= checked_div(C64::from(1.0 - self.qi(n - j)), 1.0 - t2 * self.qi(n - j), "1 - t^2 q^(n-j) in varpi2")?;
            }
            for j in 1..n {
                v *= (1.0 - t2 * self.qi(j)) / (1.0 - self.qi(j));
                v *= checked_div(1.0 - t.powi(3) * self.qi(j), 1.0 - t * self.qi(j), "1 - t q^j in varpi2")?;
            }
            Ok(v)
        })
    }

    /// `ζ¹_m(q^z) = μ_•(t^{-1}q^{-m}, q^z)`.
    pub fn zeta1(&self, m: i64, z: C64) -> Result<C64> {
        let (t, q) = (self.t, self.q);
        let qz = |e: C64| (e * q.ln()).exp();
        let t2 = t * t;
        let mut v = self.rho0 * t.powi(-2 * m as i32);
        for j in 1..=m {
            let a = qz(j as f64 - z);
            v *= (1.0 - t2 * self.qi(j)) / (1.0 - self.qi(j));
            v *= checked_div(1.0 - t2 * a, 1.0 - a, "zeta1 finite part")?;
        }
        let tail = infinite_product(0, |j| {
            let a = qz(-z + (j + 1) as f64);
            let b = qz(z + j as f64);
            (1.0 - a) * (1.0 - b / t) / ((1.0 - t * b) * (1.0 - t2 * a))
        })?;
        Ok(v * tail)
    }

    /// `ζ²_m(q^z) = μ_•(tq^{m+1}, q^z)`.
    pub fn zeta2(&self, m: i64, z: C64) -> Result<C64> {
        let (t, q) = (self.t, self.q);
        let qz = |e: C64| (e * q.ln()).exp();
        let t2 = t * t;
        let mut v = self.rho0 * t.powi(-2 * m as i32 - 1);
        for j in 1..=m {
            let a = qz(z + j as f64);
            v *= (1.0 - t2 * self.qi(j)) / (1.0 - self.qi(j));
            v *= checked_div(1.0 - t2 * a, 1.0 - a, "zeta2 finite part")?;
        }
        let tail = infinite_product(1, |j| {
            let a = qz(z + j as f64);
            let b = qz(-z + j as f64);
            (1.0 - a) * (1.0 - b / t) / ((1.0 - t * b) * (1.0 - t2 * a))
        })?;
        Ok(v * tail)
    }
}

/// The A2 point with `(x_{α₁}, x_{α₂}) = (a, b)` in ω-coordinates.
fn a2_point(a: C64, b: C64) -> [C64; 2] {
    [a, b]
}

/// Which Σ-sum failed, for diagnostics.
fn sigma_block<F>(name: &str, eps: f64, cutoff: usize, block: F) -> Result<C64>
where
    F: Fn(i64) -> Result<C64>,
{
    let mut det = TailDetector::new(eps);
    let mut s = C64::new(0.0, 0.0);
    for d in 1..=cutoff as i64 {
        let b = block(d)?;
        s += b;
        if det.push(b, s) {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence(format!("{name} tail above {eps} after {cutoff} antidiagonal blocks")))
}

/// Minimal number of simple roots `±α_i` separating the α-exponent `c` from
/// the cone `ℤ₊α₂ + ℤ₊(α₁+α₂) = {c₂ ≥ c₁ ≥ 0}`.
pub fn a2_cone_distance(c: &[i64]) -> i64 {
    let (c1, c2) = (c[0], c[1]);
    // nearest lattice point (u, v) with v >= u >= 0 in L1
    let mut best = i64::MAX;
    let r = c1.abs() + c2.abs() + 2;
    for u in 0..=r {
        for v in u..=r + u {
            best = best.min((c1 - u).abs() + (c2 - v).abs());
        }
    }
    best
}

/// `Σ₁(f) + Σ₂(f)`.
pub fn a2_sigma(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, cutoff: usize) -> Result<C64> {
    require_type(rd, Family::A, 2, "a2_sigma")?;
    let fq = root_lattice_part(rd, f);
    let re_k = ps.k_sht.re;
    for (b, _) in &fq.terms {
        let c = alpha_coords(rd, b);
        let m = a2_cone_distance(&c);
        if re_k >= -(m as f64) / 2.0 {
            return Err(Error::Cone(format!(
                "X_a with a = {}α₁ + {}α₂ is {m} simple roots off the cone and needs Re k < {}",
                c[0],
                c[1],
                -(m as f64) / 2.0
            )));
        }
    }
    let ker = A2Kernels::new(ps)?;
    let k = ps.k_sht;
    let at = |a: C64, b: C64| eval_at(rd, ps, &fq, &a2_point(a, b));
    let s1 = sigma_block("Σ₁", ps.eps, cutoff, |d| {
        let mut s = C64::new(0.0, 0.0);
        for m in 1..d {
            let n = d - m;
            s += ker.varpi1(m, n)? * at(k + m as f64, k + n as f64);
        }
        Ok(s)
    })?;
    let s2 = sigma_block("Σ₂", ps.eps, cutoff, |n| {
        let mut s = C64::new(0.0, 0.0);
        for m in 1..=n {
            s += ker.varpi2(m, n)? * at(-k + (m - n) as f64, 2.0 * k + n as f64);
        }
        Ok(s)
    })?;
    Ok(ker.rho * (s1 + s2))
}

/// Which formula covers `Re k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum A2Strip {
    /// `Re k > 0`: the integral alone
    Positive,
    /// `−ℓ − 1/2 < Re k < −ℓ`
    Main(i64),
    /// `−1 < Re k ≤ −1/2`
    Second,
}

pub fn a2_strip(re_k: f64) -> Result<A2Strip> {
    if re_k > 0.0 {
        return Ok(A2Strip::Positive);
    }
    if (2.0 * re_k - (2.0 * re_k).round()).abs() < 1e-9 && (re_k + 0.5).abs() > 1e-9 {
        return Err(Error::NonGeneric(format!("Re k = {re_k} is a half-integer strip boundary")));
    }
    let l = (-re_k).floor();
    if -re_k - l < 0.5 {
        return Ok(A2Strip::Main(l as i64));
    }
    if l == 0.0 {
        return Ok(A2Strip::Second);
    }
    Err(Error::UnsupportedStrip(format!("{} < Re k = {re_k} <= {}", -l - 1.0, -l - 0.5)))
}

/// `ct(fμ)` for A2 as the υ = 0 integral plus the one-dimensional ζ-kernel
/// integrals and the ϱ-weighted residue sums.
pub fn a2_ct_formula(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, spec: &QuadratureSpec) -> Result<C64> {
    require_type(rd, Family::A, 2, "a2_ct_formula")?;
    let strip = a2_strip(ps.k_sht.re)?;
    let fq = root_lattice_part(rd, f);
    let spec0 = QuadratureSpec { upsilon: 0.0, ..spec.clone() };
    let int0 = quad_ct_f_mu(rd, ps, &fq, &spec0)?.value;
    let l = match strip {
        A2Strip::Positive => return Ok(int0),
        A2Strip::Main(l) => l,
        A2Strip::Second => 0,
    };
    let ker = A2Kernels::new(ps)?;
    let k = ps.k_sht;
    let at = |a: C64, b: C64| eval_at(rd, ps, &fq, &a2_point(a, b));
    let line = |g: &(dyn Fn(C64) -> Result<C64> + Sync)| circle_mean(ps, &g, &spec0).map(|v| v.value);

    let mut one_d = C64::new(0.0, 0.0);
    for m in 0..=l {
        let p = -k - m as f64;
        one_d += line(&|y| Ok((at(p, y) + at(y, p)) * ker.zeta1(m, y)?))?;
        one_d += line(&|y| Ok(at(-k - y - m as f64, y) * ker.zeta2(m, y)?))?;
    }
    for m in 1..=l {
        let p = k + m as f64;
        one_d += line(&|y| Ok(at(k - y + m as f64, y) * ker.zeta1(m - 1, y)?))?;
        one_d += line(&|y| Ok((at(p, y) + at(y, p)) * ker.zeta2(m - 1, y)?))?;
    }

    let mut s = C64::new(0.0, 0.0);
    match strip {
        A2Strip::Second => {
            let (tinv, t2q) = (-k, 2.0 * k + 1.0);
            s += at(tinv, tinv);
            if (ps.k_sht.re + 0.5).abs() > 1e-12 {
                s += ker.varpi1(1, 1)? * at(k + 1.0, -2.0 * k - 1.0);
            }
            s += ker.varpi2(1, 1)? * (at(t2q, tinv) + at(tinv, t2q));
        }
        _ => {
            let (mf, nf) = (|m: i64| m as f64, |n: i64| n as f64);
            for m in 1..=l {
                for n in 1..=l {
                    s += ker.varpi1(m, n)? * at(k + mf(m), k + nf(n));
                }
            }
            for m in 1..=2 * l {
                for n in m + 1..=2 * l + 1 {
                    s += ker.varpi1(m, n - m)? * at(k + mf(m), -2.0 * k - nf(n) + 1.0);
                }
            }
            for m in 1..=2 * l {
                for n in m..=2 * l {
                    s += ker.varpi2(m, n)? * at(-k + mf(m - n), 2.0 * k + nf(n));
                }
            }
            for m in 0..=l {
                for n in m + 1..=2 * l {
                    s += ker.varpi2(n - m, n)? * at(2.0 * k + nf(n), -k - mf(m));
                }
            }
            for m in 1..=l + 1 {
                for n in m..=m + l {
                    s += ker.varpi2(m, n)? * at(-k + mf(m - n), -k - mf(m) + 1.0);
                }
            }
            for m in 1..=l {
                for n in m + 1..=2 * l + 1 {
                    s += ker.varpi1(n - m, m)? * at(-2.0 * k - nf(n) + 1.0, k + mf(m));
                }
            }
        }
    }
    Ok(int0 + one_d + ker.rho * s)
}

/// `J(f; ξ) = Σ_ŵ f(q^{ŵ(ξ)}) μ(ŵ)/μ(0)`, summed by increasing `l(ŵ)`.
pub fn jackson_sum(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, xi: &[C64], cutoff: usize) -> Result<C64> {
    let levels = elements_by_length(rd, cutoff);
    let mut det = TailDetector::new(ps.eps);
    let mut s = C64::new(0.0, 0.0);
    for level in &levels {
        let mut block = C64::new(0.0, 0.0);
        for w in level {
            let pt = w.act_on_point(xi);
            block += eval_at(rd, ps, f, &pt) * mu_ratio(rd, ps, w, xi)?;
        }
        s += block;
        if det.push(block, s) {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence(format!("Jackson sum tail above {} at length {cutoff}", ps.eps)))
}

/// Partial sums of the affine symmetrizers and their ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizerReport {
    /// constant term of `P̂₊^{(L)}(f)`
    pub p_hat: C64,
    /// largest non-constant coefficient of `P̂₊^{(L)}(f)`
    pub p_nonconstant: f64,
    /// `Î₊^{(L)}(f)` at the sample point
    pub i_hat: C64,
    pub ratio: C64,
    /// `|ratio_L − ratio_{L−1}|` for `L = 1, 2, …`
    pub cauchy: Vec<f64>,
}

/// Checks `Re(2ρ_k + a₊, ω_i) < 0` for every monomial of `f`.
pub fn symmetrizer_cone(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly) -> Result<()> {
    let rho = ps.rho_k(rd);
    for (b, _) in &f.terms {
        let a = rd.to_dominant(b);
        for i in 0..rd.rank {
            let w = rd.fundamental(i);
            let v = 2.0 * rd.pair_c(&w, &rho) + qf(rd.pair(&a, &w));
            if v.re >= 0.0 {
                return Err(Error::Cone(format!(
                    "X_{b:?}: Re(2ρ_k + a₊, ω_{}) = {} is not negative",
                    i + 1,
                    v.re
                )));
            }
        }
    }
    Ok(())
}

/// `P̂₊^{(L)}(f) = Σ_{l(ŵ)≤L} t^{−l(ŵ)/2} T_ŵ^{-1}(f)` and
/// `Î₊^{(L)}(f) = Σ_{l(ŵ)≤L} ŵ(μ̃f)` at `x`, with `ŵ(g)(x) = g(ŵ^{-1}(x))`.
pub fn affine_symmetrizer_ratio(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly, max_len: usize, x: &[C64]) -> Result<SymmetrizerReport> {
    if rd.nu_lng > 1 && (ps.k_lng.re >= 0.0) || ps.k_sht.re >= 0.0 {
        return Err(Error::Cone("affine symmetrizers need Re k < 0".into()));
    }
    symmetrizer_cone(rd, ps, f)?;
    let levels = elements_by_length(rd, max_len);
    let mut wide = ps.clone();
    wide.n_trunc = ps.n_trunc + 4 * max_len;
    let mu = MuProduct::new(rd, &wide);
    let mut p = LaurentPoly::zero();
    let mut i_hat = C64::new(0.0, 0.0);
    let mut cauchy = Vec::new();
    let mut prev: Option<C64> = None;
    let zero = rd.zero_weight();
    for level in &levels {
        for w in level {
            let (s, l) = w.length_by_nu(rd);
            let c = (ps.t_half(1).powu(s as u32) * ps.t_half(rd.nu_lng).powu(l as u32)).inv();
            let tf = apply_t_elem_inv(rd, ps, w, f);
            for (b, v) in &tf.terms {
                p.add_term(b, v * c);
            }
            let y = w.inverse().act_on_point(x);
            i_hat += eval_at(rd, ps, f, &y) * mu.eval_tilde(rd, &wide, &y)?.value;
        }
        let r = p.coeff(&zero) / i_hat;
        if let Some(pr) = prev {
            cauchy.push((r - pr).norm());
        }
        prev = Some(r);
    }
    let p_hat = p.coeff(&zero);
    let p_nonconstant = p.terms.iter().filter(|(b, _)| **b != zero).map(|(_, c)| c.norm()).fold(0.0, f64::max);
    Ok(SymmetrizerReport { p_hat, p_nonconstant, i_hat, ratio: p_hat / i_hat, cauchy })
}

/// `h = (ρ^∨, θ) + 1` from `Σ_{α>0} (α^∨, u) α = h u` at `u = ω₁`.
pub fn dual_coxeter(rd: &RootDatum) -> f64 {
    let w = rd.fundamental(0);
    let mut s = 0.0;
    for a in 0..rd.n_pos {
        let r = &rd.root(a).omega;
        s += qf(rd.pair(r, &w)).powi(2) / rd.root(a).nu as f64;
    }
    s / qf(rd.pair(&w, &w))
}

/// `Π_{α̃>0} (1 − t_α^{-1} X_α̃)` at a real point, with each root's product
/// run until the factors are within `1e-18` of one.
fn numerator_product(rd: &RootDatum, ps: &ParamSet, xi: &[C64]) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for a in 0..rd.roots.len() {
        let root = rd.root(a);
        let jmin = if root.is_positive() { 0 } else { 1 };
        let tinv = 1.0 / ps.t(root.nu);
        let step = ps.q.powi(root.nu as i32);
        let mut xa = ps.qpow(AffineRoot::new(a, jmin).pair_c(rd, xi));
        loop {
            let z = tinv * xa;
            v *= 1.0 - z;
            if z.norm() < 1e-18 {
                break;
            }
            xa *= step;
        }
    }
    v
}

/// `M(x) = sin(π(2ρ^∨, x)) q^{h x²/2} X_ρ^{-1} Π_{α̃>0} (1 − t_α^{-1} X_α̃)`
/// at the real point with ω-coordinates `xi`.
pub fn noncompact_kernel(rd: &RootDatum, ps: &ParamSet, xi: &[f64]) -> C64 {
    let x: Vec<C64> = xi.iter().map(|&v| C64::new(v, 0.0)).collect();
    let two_rho_vee: f64 = (0..rd.n_pos).map(|a| rd.root_pair_c(a, &x).re / rd.root(a).nu as f64).sum();
    let h = dual_coxeter(rd);
    let x2 = quad_form(rd, xi);
    let rho = rd.rho();
    let gauss = ps.qpow_r(h * x2 / 2.0 - rd.pair_c(&rho, &x).re);
    (PI * two_rho_vee).sin() * gauss * numerator_product(rd, ps, &x)
}

fn quad_form(rd: &RootDatum, xi: &[f64]) -> f64 {
    let g = &rd.gram_omega_f;
    (0..rd.rank).map(|i| (0..rd.rank).map(|j| g[i][j] * xi[i] * xi[j]).sum::<f64>()).sum()
}

/// `M(x + ω_j)/M(x)` assembled from the sine, Gaussian and `Δ` multipliers
/// and the Λ-set ratio of `μ̃`.
pub fn noncompact_multiplier(rd: &RootDatum, ps: &ParamSet, xi: &[f64], j: usize) -> Result<C64> {
    let x: Vec<C64> = xi.iter().map(|&v| C64::new(v, 0.0)).collect();
    let w = rd.fundamental(j);
    let l_w: f64 = (0..rd.n_pos).map(|a| qf(rd.pair(&rd.root(a).omega, &w)) / rd.root(a).nu as f64).sum();
    let sign = if (l_w.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let h = dual_coxeter(rd);
    let (xw, ww, wr) = (rd.pair_c(&w, &x).re, qf(rd.pair(&w, &w)), qf(rd.pair(&w, &rd.rho())));
    let sine = sign;
    let gauss = ps.qpow_r(h * xw + h * ww / 2.0 - wr);
    let delta = sign * ps.qpow_r(-h * xw - h * ww / 2.0 + wr);
    // μ̃(ŵx)/μ̃(x) = 1/[μ(ŵx)/μ(x)]_{t → t^{-1}}
    let flipped = ParamSet { k_sht: -ps.k_sht, k_lng: -ps.k_lng, ..ps.clone() };
    let tilde = 1.0 / mu_ratio(rd, &flipped, &ExtWeyl::translation(&w), &x)?;
    Ok(sine * gauss * delta * tilde)
}

/// `∫_{ℝⁿ} f T_{w₀}(g^ς) q^{l x²/2} M(x) dx` over ω-coordinates, by the
/// trapezoid rule on `[−L, L]ⁿ` with step halving.
pub fn noncompact_pairing(
    rd: &RootDatum,
    ps: &ParamSet,
    f: &LaurentPoly,
    g: &LaurentPoly,
    level: f64,
    tol: f64,
) -> Result<QuadValue> {
    if level <= 0.0 {
        return Err(Error::NoConvergence(format!("level l = {level} gives no Gaussian decay")));
    }
    if rd.rank > 2 {
        return Err(Error::Unsupported("real-line quadrature is implemented for rank <= 2".into()));
    }
    let tg = apply_t_w0(rd, ps, &g.varsigma(rd));
    let lam_min = {
        let g = &rd.gram_omega_f;
        if rd.rank == 1 {
            g[0][0]
        } else {
            let (a, b, d) = (g[0][0], g[0][1], g[1][1]);
            (a + d) / 2.0 - (((a - d) / 2.0).powi(2) + b * b).sqrt()
        }
    };
    let deg = (f.degree() + tg.degree()) as f64 + 1.0;
    // q^{l λ L²/2} q^{-deg L} below 1e-3 tol
    let a = level * lam_min / 2.0 * -ps.ln_q();
    let bterm = deg * -ps.ln_q();
    let c = (1e3 / tol).ln();
    let half = (bterm + (bterm * bterm + 4.0 * a * c).sqrt()) / (2.0 * a) + 1.0;
    let integrand = |xi: &[f64]| -> C64 {
        let x: Vec<C64> = xi.iter().map(|&v| C64::new(v, 0.0)).collect();
        eval_at(rd, ps, f, &x) * eval_at(rd, ps, &tg, &x) * ps.qpow_r(level * quad_form(rd, xi) / 2.0) * noncompact_kernel(rd, ps, xi)
    };
    let trap = |step: f64| -> C64 {
        let npts = (half / step).ceil() as i64;
        let pts: Vec<f64> = (-npts..=npts).map(|i| i as f64 * step).collect();
        let vals: Vec<C64> = if rd.rank == 1 {
            pts.par_iter().map(|&u| integrand(&[u])).collect()
        } else {
            pts.par_iter().map(|&u| pts.iter().map(|&v| integrand(&[u, v])).sum::<C64>()).collect()
        };
        vals.into_iter().sum::<C64>() * step.powi(rd.rank as i32)
    };
    let mut step = 0.125;
    let mut prev = trap(step);
    for _ in 0..8 {
        step /= 2.0;
        let cur = trap(step);
        let delta = (cur - prev).norm();
        if delta <= tol * (1.0 + cur.norm()) {
            return Ok(QuadValue { value: cur, m: (2.0 * half / step) as usize, delta });
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!("real-line quadrature did not settle by step {step}")))
}

/// `◇_{−l}` on the generators used by the adjointness checks: `T_i ↦ T_i`,
/// `Y_b ↦ q^{l b²/2} X_b^{-l} Y_b` for minuscule `b`.
pub fn diamond_minus_l(rd: &RootDatum, ps: &ParamSet, h: &DiamondOp, level: i64, g: &LaurentPoly) -> Result<LaurentPoly> {
    match h {
        DiamondOp::T(i) => Ok(apply_t(rd, ps, *i, g)),
        DiamondOp::Y(b) => {
            let minuscule = rd.minuscule.iter().any(|&r| rd.fundamental(r) == *b);
            if !minuscule {
                return Err(Error::Unsupported(format!("◇_(-l)(Y_b) is implemented for minuscule b, got {b:?}")));
            }
            let c = ps.qpow_r(level as f64 * qf(rd.pair(b, b)) / 2.0);
            let shift: Weight = b.iter().map(|v| -level * v).collect();
            Ok(apply_y(rd, ps, b, g).mul_monomial(&shift, C64::new(c, 0.0)))
        }
    }
}

/// `|⟨H f, g⟩ − ⟨f, ◇_{−l}(H) g⟩|` for the noncompact pairing at level `l`.
pub fn noncompact_adjoint_residual(
    rd: &RootDatum,
    ps: &ParamSet,
    h: &DiamondOp,
    f: &LaurentPoly,
    g: &LaurentPoly,
    level: i64,
    tol: f64,
) -> Result<f64> {
    let hf = match h {
        DiamondOp::T(i) => apply_t(rd, ps, *i, f),
        DiamondOp::Y(b) => apply_y(rd, ps, b, f),
    };
    let lhs = noncompact_pairing(rd, ps, &hf, g, level as f64, tol)?.value;
    let rhs = noncompact_pairing(rd, ps, f, &diamond_minus_l(rd, ps, h, level, g)?, level as f64, tol)?.value;
    Ok((lhs - rhs).norm() / (1.0 + lhs.norm()))
}

/// `ct(f μ⁰)` with `μ⁰ = Π_{α>0} (1 − X_α)/(1 − t X_α)` expanded as
/// `1 + Σ_{m≥1} (t^m − t^{m−1}) X_α^m` and truncated once `|t|^m < tol`.
pub fn mu0_ct(rd: &RootDatum, f: &LaurentPoly, t: f64, tol: f64) -> Result<C64> {
    if t.abs() >= 1.0 {
        return Err(Error::Unsupported(format!("|t| = {} >= 1", t.abs())));
    }
    let mmax = if t == 0.0 { 1 } else { ((tol.ln() / t.abs().ln()).ceil() as i64).max(1) + 1 };
    let n = rd.rank;
    let mut mu0 = LaurentPoly::one(n);
    for a in 0..rd.n_pos {
        let alpha = &rd.root(a).omega;
        let mut series = LaurentPoly::one(n);
        for m in 1..=mmax {
            let c = t.powi(m as i32) - t.powi(m as i32 - 1);
            if c == 0.0 {
                continue;
            }
            let b: Weight = alpha.iter().map(|v| v * m).collect();
            series.add_term(&b, C64::new(c, 0.0));
        }
        mu0 = (&mu0 * &series).prune(tol * 1e-3);
    }
    let mut s = C64::new(0.0, 0.0);
    for (b, c) in &f.terms {
        let neg: Weight = b.iter().map(|v| -v).collect();
        s += c * mu0.coeff(&neg);
    }
    Ok(s)
}
