//! The μ-function family: truncated products, Λ-set ratios, the closed
//! constant term, the constant-term oracle, residues `μ_•` and the
//! δ/Poincaré identity.

use crate::error::{Error, Result};
use crate::polyrep::{apply_t_w0, e0_coefficient, t_half_len_w0, MacdonaldCache};
use crate::qlaurent::{LaurentPoly, ParamSet, SpectralPoint, C64};
use crate::rootdata::RootDatum;
use crate::weyl::{finite_weyl_group, lambda_prime_pi, pi_u_decompose, AffineRoot, ExtWeyl};

/// A value together with an estimate of the relative truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuValue {
    pub value: C64,
    pub tail_bound: f64,
}

/// The retained factors `(1 − X_α̃)/(1 − t_α X_α̃)` for `α̃ = [α, ν_α j] > 0`
/// with `j ≤ N`.
#[derive(Clone, Debug)]
pub struct MuProduct {
    pub n_trunc: i64,
    pub factors: Vec<AffineRoot>,
    /// a binomial "vanishes" below this multiple of its scale
    pub pole_tol: f64,
}

impl MuProduct {
    pub fn new(rd: &RootDatum, ps: &ParamSet) -> Self {
        let n = ps.n_trunc as i64;
        let mut factors = Vec::new();
        for a in 0..rd.roots.len() {
            let jmin = if rd.root(a).is_positive() { 0 } else { 1 };
            for j in jmin..=n {
                factors.push(AffineRoot::new(a, j));
            }
        }
        MuProduct { n_trunc: n, factors, pole_tol: 1e-8 }
    }

    /// Geometric tail estimate `Σ_{j>N} |1−t||X_{[α,j]}| / (1 − |t X|)` summed over roots.
    fn tail(&self, rd: &RootDatum, ps: &ParamSet, x: &[C64], t_fac: impl Fn(i64) -> C64) -> f64 {
        let mut s = 0.0;
        for a in 0..rd.roots.len() {
            let r = rd.root(a);
            let v = AffineRoot::new(a, self.n_trunc + 1).pair_c(rd, x);
            let xa = ps.qpow(v).norm();
            let t = t_fac(r.nu);
            let ratio = ps.q.abs().powi(r.nu as i32);
            let den = (1.0 - ratio) * (1.0 - (t.norm() * xa).min(0.5));
            s += (t - 1.0).norm() * xa / den;
        }
        s
    }

    /// `Π (1 − a X_α̃)/(1 − b X_α̃)` over the retained factors, one root at a time.
    fn product(&self, rd: &RootDatum, ps: &ParamSet, x: &[C64], a: impl Fn(i64) -> C64, b: impl Fn(i64) -> C64) -> Result<C64> {
        let mut v = C64::new(1.0, 0.0);
        for r in 0..rd.roots.len() {
            let root = rd.root(r);
            let jmin = if root.is_positive() { 0 } else { 1 };
            let step = ps.q.powi(root.nu as i32);
            let mut xa = ps.qpow(AffineRoot::new(r, jmin).pair_c(rd, x));
            let (ca, cb) = (a(root.nu), b(root.nu));
            for j in jmin..=self.n_trunc {
                let den = 1.0 - cb * xa;
                if den.norm() < self.pole_tol * (1.0 + (cb * xa).norm()) {
                    return Err(Error::Pole(format!("denominator at {} vanishes", AffineRoot::new(r, j).display(rd))));
                }
                v *= (1.0 - ca * xa) / den;
                xa *= step;
            }
        }
        Ok(v)
    }

    /// `μ(x)` at the point `q^x`.
    pub fn eval(&self, rd: &RootDatum, ps: &ParamSet, x: &[C64]) -> Result<MuValue> {
        let one = C64::new(1.0, 0.0);
        let v = self.product(rd, ps, x, |_| one, |nu| ps.t(nu))?;
        let tail = self.tail(rd, ps, x, |nu| ps.t(nu));
        Ok(MuValue { value: v, tail_bound: tail })
    }

    /// `μ̃(x) = Π (1 − t^{-1}X_α̃)/(1 − X_α̃)`.
    pub fn eval_tilde(&self, rd: &RootDatum, ps: &ParamSet, x: &[C64]) -> Result<MuValue> {
        let one = C64::new(1.0, 0.0);
        let v = self.product(rd, ps, x, |nu| 1.0 / ps.t(nu), |_| one)?;
        let tail = self.tail(rd, ps, x, |nu| 1.0 / ps.t(nu));
        Ok(MuValue { value: v, tail_bound: tail })
    }

    /// `μ` with the denominator binomials in `s` removed, at `q^ξ`. Every
    /// binomial of `s` must vanish there and no other denominator may.
    pub fn bullet(&self, rd: &RootDatum, ps: &ParamSet, xi: &[C64], s: &[AffineRoot]) -> Result<C64> {
        let mut v = C64::new(1.0, 0.0);
        for f in s {
            let xa = ps.qpow(f.pair_c(rd, xi));
            let t = ps.t(rd.root(f.root).nu);
            if (1.0 - t * xa).norm() > self.pole_tol * (1.0 + (t * xa).norm()) {
                return Err(Error::Invalid(format!("1 - t X_{} does not vanish", f.display(rd))));
            }
            if !f.is_positive(rd) {
                return Err(Error::Invalid(format!("{} is not a positive affine root", f.display(rd))));
            }
        }
        for f in &self.factors {
            let xa = ps.qpow(f.pair_c(rd, xi));
            let t = ps.t(rd.root(f.root).nu);
            let num = 1.0 - xa;
            if s.contains(f) {
                v *= num;
                continue;
            }
            let den = 1.0 - t * xa;
            if den.norm() < self.pole_tol * (1.0 + (t * xa).norm()) {
                return Err(Error::Pole(format!("residual pole 1 - t X_{}", f.display(rd))));
            }
            v *= num / den;
        }
        Ok(v)
    }
}

/// `μ(x)` with the default truncation.
pub fn mu_eval(rd: &RootDatum, ps: &ParamSet, x: &[C64]) -> Result<MuValue> {
    MuProduct::new(rd, ps).eval(rd, ps, x)
}

pub fn mu_tilde_eval(rd: &RootDatum, ps: &ParamSet, x: &[C64]) -> Result<MuValue> {
    MuProduct::new(rd, ps).eval_tilde(rd, ps, x)
}

/// `μ(ŵ)/μ(0) = Π_{[α,ν_α j] ∈ Λ(ŵ)} (t_α^{-1} − q_α^{(α^∨,ξ)+j}) / (1 − t_α^{-1} q_α^{(α^∨,ξ)+j})`.
pub fn mu_ratio(rd: &RootDatum, ps: &ParamSet, w: &ExtWeyl, xi: &[C64]) -> Result<C64> {
    let mut v = C64::new(1.0, 0.0);
    for f in w.lambda_set(rd) {
        let xa = ps.qpow(f.pair_c(rd, xi));
        let ti = 1.0 / ps.t(rd.root(f.root).nu);
        let den = 1.0 - ti * xa;
        if den.norm() < 1e-12 * (1.0 + (ti * xa).norm()) {
            return Err(Error::Pole(format!("1 - t^-1 X_{} vanishes", f.display(rd))));
        }
        v *= (ti - xa) / den;
    }
    Ok(v)
}

/// `μ(π_b)/μ(0)` at `ξ = −ρ_k` through `Λ′(π_b)`.
pub fn mu_ratio_rho(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> Result<C64> {
    let rho = ps.rho_k(rd);
    let pi = pi_u_decompose(rd, b).pi;
    let mut v = 1.0 / ps.t_len(rd, pi.length_by_nu(rd));
    for f in lambda_prime_pi(rd, b) {
        let xa = ps.qpow(f.pair_c(rd, &rho));
        let t = ps.t(rd.root(f.root).nu);
        let den = 1.0 - xa / t;
        if den.norm() < 1e-12 * (1.0 + (xa / t).norm()) {
            return Err(Error::Pole(format!("1 - t^-1 q^... vanishes at {}", f.display(rd))));
        }
        v *= (1.0 - t * xa) / den;
    }
    Ok(v)
}

/// `ct(μ) = Π_{α>0} Π_{i≥1} (1 − q_α^{(α^∨,ρ_k)+i})² / ((1 − t_α q_α^{…})(1 − t_α^{-1} q_α^{…}))`.
pub fn ct_mu_closed(rd: &RootDatum, ps: &ParamSet) -> Result<MuValue> {
    let rho = ps.rho_k(rd);
    let mut v = C64::new(1.0, 0.0);
    let mut tail = 0.0;
    for a in 0..rd.n_pos {
        let nu = rd.root(a).nu;
        let t = ps.t(nu);
        let mut i = 1i64;
        loop {
            let z = AffineRoot::new(a, i).pair_c(rd, &rho);
            let x = ps.qpow(z);
            let (d1, d2) = (1.0 - t * x, 1.0 - x / t);
            if d1.norm() < 1e-12 || d2.norm() < 1e-12 {
                return Err(Error::Pole(format!("ct(mu) factor vanishes at root {} level {i}", a)));
            }
            v *= (1.0 - x) * (1.0 - x) / (d1 * d2);
            // |log factor| ≈ |x| |t + t^{-1} − 2|
            let term = x.norm() * (t + 1.0 / t - 2.0).norm();
            if i >= ps.n_trunc as i64 && term < ps.eps * 1e-3 {
                let r = ps.q.abs().powi(nu as i32);
                tail += term * r / (1.0 - r);
                break;
            }
            if i > 100_000 {
                return Err(Error::NoConvergence("ct(mu) product".into()));
            }
            i += 1;
        }
    }
    Ok(MuValue { value: v, tail_bound: tail })
}

/// The meromorphic constant term `ct(fμ) = [E_0-coefficient of f] · ct(μ)`.
pub fn ct_mu_of(cache: &MacdonaldCache, f: &LaurentPoly) -> Result<C64> {
    let c0 = e0_coefficient(cache, f)?;
    Ok(c0 * ct_mu_closed(&cache.rd, &cache.ps)?.value)
}

/// Both sides of the norm formula:
/// `t^{−l(w₀)/2} ct(𝓔_b T_{w₀}(𝓔_c^ς) μ)/ct(μ)` and `δ_{b,c} μ(q^{−ρ_k})/μ(π_b)`.
/// With `varsigma = false` the left side uses `𝓔_c` and the right side `δ_{b,ς(c)}`.
pub fn nsym_norm(cache: &MacdonaldCache, b: &[i64], c: &[i64], varsigma: bool) -> Result<(C64, C64)> {
    let (rd, ps) = (&cache.rd, &cache.ps);
    let eb = cache.get(b)?.spherical();
    let mut ec = cache.get(c)?.spherical();
    if varsigma {
        ec = ec.varsigma(rd);
    }
    let prod = &eb * &apply_t_w0(rd, ps, &ec);
    let lhs = e0_coefficient(cache, &prod)? / t_half_len_w0(rd, ps);
    let target = if varsigma { c.to_vec() } else { rd.varsigma(c) };
    let rhs = if b == target.as_slice() { 1.0 / mu_ratio_rho(rd, ps, b)? } else { C64::new(0.0, 0.0) };
    Ok((lhs, rhs))
}

/// `Σ_{w∈W} t^{l(w)}` with `t^{l}` split by root length.
pub fn poincare_polynomial(rd: &RootDatum, ps: &ParamSet) -> C64 {
    finite_weyl_group(rd)
        .iter()
        .map(|(w, _)| ps.t_len(rd, ExtWeyl::finite(w.clone()).length_by_nu(rd)))
        .sum()
}

/// `|Σ_w w(Π_{α>0} (1 − t_α X_α^{-1})/(1 − X_α^{-1}))(x) − Σ_w t^{l(w)}|`.
pub fn delta_poincare_residual(rd: &RootDatum, ps: &ParamSet, x: &[C64]) -> Result<f64> {
    let mut s = C64::new(0.0, 0.0);
    for (w, _) in finite_weyl_group(rd) {
        let mut p = C64::new(1.0, 0.0);
        for a in 0..rd.n_pos {
            let wa = w.apply(&rd.root(a).omega);
            let xi = ps.qpow(-rd.pair_c(&wa, x));
            let den = 1.0 - xi;
            if den.norm() < 1e-10 {
                return Err(Error::Pole(format!("1 - X^-1 vanishes for root {a}")));
            }
            p *= (1.0 - ps.t(rd.root(a).nu) * xi) / den;
        }
        s += p;
    }
    Ok((s - poincare_polynomial(rd, ps)).norm())
}

/// `μ_•(ξ, S)` with the default truncation.
pub fn mu_bullet(rd: &RootDatum, ps: &ParamSet, xi: &[C64], s: &[AffineRoot]) -> Result<C64> {
    MuProduct::new(rd, ps).bullet(rd, ps, xi, s)
}

/// The point `π_b((−ρ_k))` and the binomials `1 − t_i X_{π_b(α_i)}` vanishing there.
pub fn pi_b_residue_data(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> (SpectralPoint, Vec<AffineRoot>) {
    let pi = pi_u_decompose(rd, b).pi;
    let pt = ps.minus_rho_k(rd).act(&pi);
    let s = (1..=rd.rank)
        .map(|i| pi.act_on_affine_root(rd, &AffineRoot::simple(rd, i)))
        .collect();
    (pt, s)
}

/// `Res(μ, π_b)`, with `Res(μ, 0)` as in the `b = 0` case.
pub fn res_mu(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> Result<C64> {
    let (pt, s) = pi_b_residue_data(rd, ps, b);
    mu_bullet(rd, ps, &pt.xi, &s)
}

/// Counts of vanishing binomials of `μ` at `q^ξ` over `α̃ > 0` with `j ≤ window`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueCertificate {
    pub xi: SpectralPoint,
    /// vanishing denominator binomials `1 − t_α X_α̃`
    pub denominators: Vec<AffineRoot>,
    /// vanishing numerator binomials `1 − X_α̃`
    pub numerators: Vec<AffineRoot>,
    /// rank of the nonaffine parts of `denominators`
    pub rank: usize,
}

impl ResidueCertificate {
    pub fn ae1(&self) -> usize {
        self.denominators.len()
    }

    pub fn ae0(&self) -> usize {
        self.numerators.len()
    }

    pub fn scan(rd: &RootDatum, ps: &ParamSet, xi: &SpectralPoint, window: i64, tol: f64) -> Self {
        let mut den = Vec::new();
        let mut num = Vec::new();
        for a in 0..rd.roots.len() {
            let jmin = if rd.root(a).is_positive() { 0 } else { 1 };
            for j in jmin..=window {
                let f = AffineRoot::new(a, j);
                let z = f.pair_c(rd, &xi.xi);
                let x = ps.qpow(z);
                // compare exponents so that q-periodic coincidences are not counted
                let kz = z + ps.k(rd.root(a).nu) * rd.root(a).nu as f64;
                if kz.norm() < tol {
                    den.push(f);
                }
                if z.norm() < tol {
                    num.push(f);
                }
                let _ = x;
            }
        }
        let rank = rank_of(rd, &den);
        ResidueCertificate { xi: xi.clone(), denominators: den, numerators: num, rank }
    }

    /// `ae₁ ≥ ae₀ + n` with `n` independent vanishing denominators.
    pub fn is_residual(&self, n: usize) -> bool {
        self.ae1() >= self.ae0() + n && self.rank == n
    }
}

fn rank_of(rd: &RootDatum, roots: &[AffineRoot]) -> usize {
    let mut rows: Vec<Vec<f64>> = roots
        .iter()
        .map(|f| rd.root(f.root).omega.iter().map(|&x| x as f64).collect())
        .collect();
    let n = rd.rank;
    let mut rank = 0;
    for c in 0..n {
        let p = (rank..rows.len()).max_by(|&i, &j| rows[i][c].abs().partial_cmp(&rows[j][c].abs()).unwrap());
        let Some(p) = p else { break };
        if rows[p][c].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank {
                let f = rows[i][c] / rows[rank][c];
                for k in 0..n {
                    rows[i][k] -= f * rows[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Family;
    use rand::{Rng, SeedableRng};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rand_point(rng: &mut impl Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7))).collect()
    }

    #[test]
    fn norm_formula_small() {
        for (n, q, k) in [(1, 0.35, C64::new(-0.37, 0.11)), (2, 0.3, C64::new(0.4, 0.1))] {
            let rd = RootDatum::build(Family::A, n).unwrap();
            let ps = ParamSet::new(q, k).unwrap();
            let cache = MacdonaldCache::new(&rd, &ps);
            let bs: Vec<Vec<i64>> = if n == 1 {
                (-2..=2).map(|x| vec![x]).collect()
            } else {
                vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![-1, 1], vec![1, 1]]
            };
            for b in &bs {
                for c in &bs {
                    for vs in [true, false] {
                        let (l, r) = nsym_norm(&cache, b, c, vs).unwrap();
                        assert!((l - r).norm() < 1e-9 * (1.0 + r.norm()), "{b:?} {c:?} {vs} {l} {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_values() {
        let rd = RootDatum::build(Family::A, 2).unwrap();
        let ps = ParamSet::new(0.4, c(0.0)).unwrap();
        let v = mu_eval(&rd, &ps, &[C64::new(0.3, 0.2), c(-0.1)]).unwrap();
        assert!((v.value - 1.0).norm() < 1e-15);
        assert!((ct_mu_closed(&rd, &ps).unwrap().value - 1.0).norm() < 1e-15);
        let ps = ParamSet::new(0.4, C64::new(0.3, 0.1)).unwrap();
        assert_eq!(mu_ratio(&rd, &ps, &ExtWeyl::identity(2), &[c(0.1), c(0.2)]).unwrap(), c(1.0));
        assert_eq!(mu_ratio_rho(&rd, &ps, &[0, 0]).unwrap(), c(1.0));
        // s_i at (α_i^∨, ξ) = 0 gives −1
        let r = mu_ratio(&rd, &ps, &ExtWeyl::s(&rd, 1), &[c(0.0), c(0.37)]).unwrap();
        assert!((r + 1.0).norm() < 1e-14);
    }

    #[test]
    fn a1_ratios() {
        let rd = RootDatum::build(Family::A, 1).unwrap();
        let k = C64::new(0.31, -0.2);
        let ps = ParamSet::new(0.35, k).unwrap();
        let t = ps.t(1);
        let want = (1.0 - ps.qpow(k * 2.0 + 1.0)) / (1.0 - ps.q) / t;
        assert!((mu_ratio_rho(&rd, &ps, &[-1]).unwrap() - want).norm() < 1e-13);
        assert!((mu_ratio_rho(&rd, &ps, &[1]).unwrap() - 1.0).norm() < 1e-14);
        let pi = pi_u_decompose(&rd, &[-1]).pi;
        let r = mu_ratio(&rd, &ps, &pi, &ps.minus_rho_k(&rd).xi).unwrap();
        assert!((r - want).norm() < 1e-13);
        // closed ct against the A1 specialization
        let mut p = c(1.0);
        for i in 1..200 {
            let qi = |e: C64| ps.qpow(e + i as f64);
            p *= (1.0 - qi(k)) * (1.0 - qi(k)) / ((1.0 - qi(k * 2.0)) * (1.0 - ps.q.powi(i)));
        }
        assert!((ct_mu_closed(&rd, &ps).unwrap().value - p).norm() < 1e-13);
        // k = 1: ct((1−X²)(1−qX^{-2})) = 1 + q
        let ps1 = ParamSet::new(0.35, c(1.0)).unwrap();
        assert!((ct_mu_closed(&rd, &ps1).unwrap().value - 1.35).norm() < 1e-13);
    }

    #[test]
    fn mu_ratio_is_mu_quotient() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for (fam, n) in [(Family::A, 1), (Family::A, 2), (Family::B, 2), (Family::G, 2)] {
            let rd = RootDatum::build(fam, n).unwrap();
            let ps = ParamSet::with_k(0.3, C64::new(0.4, 0.1), C64::new(0.25, -0.1)).unwrap();
            let levels = crate::weyl::elements_by_length(&rd, 3);
            for lvl in &levels {
                for w in lvl {
                    let x = rand_point(&mut rng, n);
                    let lhs = mu_eval(&rd, &ps, &w.act_on_point(&x)).unwrap().value
                        / mu_eval(&rd, &ps, &x).unwrap().value;
                    let rhs = mu_ratio(&rd, &ps, w, &x).unwrap();
                    assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "{} {w:?}", rd.label());
                }
            }
        }
    }

    #[test]
    fn rho_ratio_matches_general_ratio() {
        for (fam, n) in [(Family::A, 2), (Family::B, 2), (Family::C, 3), (Family::G, 2)] {
            let rd = RootDatum::build(fam, n).unwrap();
            let ps = ParamSet::with_k(0.3, C64::new(0.41, 0.13), C64::new(-0.27, 0.05)).unwrap();
            let pt = ps.minus_rho_k(&rd);
            for b in [vec![1, 0], vec![0, 1], vec![-1, 1], vec![2, -1], vec![-1, -1], vec![0, -2]] {
                let b: Vec<i64> = b.into_iter().chain(std::iter::repeat(0)).take(n).collect();
                let pi = pi_u_decompose(&rd, &b).pi;
                let lhs = mu_ratio(&rd, &ps, &pi, &pt.xi).unwrap();
                let rhs = mu_ratio_rho(&rd, &ps, &b).unwrap();
                assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "{} b={b:?}", rd.label());
            }
        }
    }

    #[test]
    fn poincare() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let rd = RootDatum::build(Family::A, 2).unwrap();
        let ps = ParamSet::new(0.3, C64::new(0.4, 0.1)).unwrap();
        let t = ps.t(1);
        let p = poincare_polynomial(&rd, &ps);
        assert!((p - (1.0 + 2.0 * t + 2.0 * t * t + t * t * t)).norm() < 1e-14);
        for (fam, n) in [(Family::A, 1), (Family::A, 2), (Family::B, 2), (Family::G, 2)] {
            let rd = RootDatum::build(fam, n).unwrap();
            let ps = ParamSet::with_k(0.3, C64::new(0.4, 0.1), C64::new(-0.3, 0.2)).unwrap();
            let x = rand_point(&mut rng, n);
            assert!(delta_poincare_residual(&rd, &ps, &x).unwrap() < 1e-10);
        }
    }

    #[test]
    fn residue_at_zero_is_reszero() {
        // numerical residue: (1 − tX_α) μ near −ρ_k along a generic direction, A1
        let rd = RootDatum::build(Family::A, 1).unwrap();
        let ps = ParamSet::new(0.3, C64::new(0.45, 0.1)).unwrap();
        let r0 = res_mu(&rd, &ps, &[0]).unwrap();
        let t = ps.t(1);
        let rho = ps.minus_rho_k(&rd).xi;
        let mut prev = C64::new(0.0, 0.0);
        for e in [1e-4, 1e-5] {
            let x = vec![rho[0] + e];
            let fa = 1.0 - t * ps.qpow(rd.pair_c(&rd.root(0).omega, &x));
            let v = mu_eval(&rd, &ps, &x).unwrap().value * fa;
            prev = v;
        }
        assert!((prev - r0).norm() < 1e-4 * r0.norm());
    }
}
