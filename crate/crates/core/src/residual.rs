//! Residual points of the μ-measure.
//!
//! Poles of the iterated contour integral of `f μ` are found by eliminating
//! the variables `ᾱ_i = (α_i, z)` one at a time: each step picks a
//! denominator binomial `1 − t_β X_{[β, ν_β m]}` whose zero set has a
//! nonzero coefficient at the current variable, solves for it and
//! substitutes. All of this is exact arithmetic in rationals; the values of
//! `k` enter as formal symbols.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_complex::Complex64 as C64;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mumeasure::{pi_b_residue_data, ResidueCertificate};
use crate::qlaurent::{ParamSet, SpectralPoint};
use crate::rootdata::{Family, RootDatum, Weight, Q};
use crate::weyl::{pi_u_decompose, AffineRoot, ExtWeyl};

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

// ---------------------------------------------------------------------------
// μ-residual predicate
// ---------------------------------------------------------------------------

/// Outcome of the μ-residual test.
#[derive(Clone, Debug, PartialEq)]
pub enum MuResidual {
    Residual(ResidueCertificate),
    Rejected(ResidueCertificate),
}

impl MuResidual {
    pub fn is_residual(&self) -> bool {
        matches!(self, MuResidual::Residual(_))
    }

    pub fn certificate(&self) -> &ResidueCertificate {
        match self {
            MuResidual::Residual(c) | MuResidual::Rejected(c) => c,
        }
    }
}

/// Counts vanishing binomials over `α̃ > 0` with level `≤ window` and accepts
/// iff `ae₁ ≥ ae₀ + n` with `n` independent vanishing denominators.
pub fn is_mu_residual(rd: &RootDatum, ps: &ParamSet, xi: &SpectralPoint, window: i64) -> MuResidual {
    let cert = ResidueCertificate::scan(rd, ps, xi, window, 1e-9);
    if cert.is_residual(rd.rank) {
        MuResidual::Residual(cert)
    } else {
        MuResidual::Rejected(cert)
    }
}

// ---------------------------------------------------------------------------
// Linear forms
// ---------------------------------------------------------------------------

/// An affine form in `ᾱ_1..ᾱ_n`, `n_1..n_n`, `k_sht`, `k_lng` and `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm {
    pub rank: usize,
    pub c: Vec<Q>,
}

impl LinForm {
    pub fn zero(rank: usize) -> Self {
        LinForm { rank, c: vec![Q::zero(); 2 * rank + 3] }
    }

    fn var(&self) -> std::ops::Range<usize> {
        0..self.rank
    }

    fn ix_n(&self, i: usize) -> usize {
        self.rank + i
    }

    fn ix_k(&self, lng: bool) -> usize {
        2 * self.rank + usize::from(lng)
    }

    fn ix_1(&self) -> usize {
        2 * self.rank + 2
    }

    pub fn alpha_coeff(&self, i: usize) -> Q {
        self.c[i]
    }

    pub fn n_coeff(&self, i: usize) -> Q {
        self.c[self.ix_n(i)]
    }

    pub fn k_coeff(&self, lng: bool) -> Q {
        self.c[self.ix_k(lng)]
    }

    pub fn constant(&self) -> Q {
        self.c[self.ix_1()]
    }

    fn scaled(&self, s: Q) -> LinForm {
        LinForm { rank: self.rank, c: self.c.iter().map(|x| x * s).collect() }
    }

    fn add_scaled(&mut self, other: &LinForm, s: Q) {
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += b * s;
        }
    }

    /// Replaces `ᾱ_v` by `sub`.
    fn substitute(&self, v: usize, sub: &LinForm) -> LinForm {
        let a = self.c[v];
        if a.is_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        out.c[v] = Q::zero();
        out.add_scaled(sub, a);
        out
    }

    /// The `k → 0`, `ᾱ → 0` part evaluated at concrete `n`.
    pub fn bullet_at(&self, n: &[i64]) -> Q {
        let mut s = self.constant();
        for (i, &ni) in n.iter().enumerate() {
            s += self.n_coeff(i) * qi(ni);
        }
        s
    }

    /// `(constant, k_sht, k_lng)` at concrete `n`; requires no `ᾱ` terms.
    pub fn at(&self, n: &[i64]) -> (Q, Q, Q) {
        (self.bullet_at(n), self.k_coeff(false), self.k_coeff(true))
    }
}

fn fmt_term(out: &mut String, coef: Q, sym: &str) {
    if coef.is_zero() {
        return;
    }
    let neg = coef.is_negative();
    let a = coef.abs();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { "-" } else { "+" });
    }
    if sym.is_empty() {
        out.push_str(&a.to_string());
    } else {
        if !a.is_one() {
            out.push_str(&a.to_string());
            out.push('*');
        }
        out.push_str(sym);
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        fmt_term(&mut s, self.constant(), "");
        for i in 0..self.rank {
            fmt_term(&mut s, self.n_coeff(i), &format!("n{}", i + 1));
        }
        fmt_term(&mut s, self.k_coeff(false), "k");
        fmt_term(&mut s, self.k_coeff(true), "k_lng");
        for i in self.var() {
            fmt_term(&mut s, self.alpha_coeff(i), &format!("a{}", i + 1));
        }
        if s.is_empty() {
            s.push('0');
        }
        write!(f, "{s}")
    }
}

// ---------------------------------------------------------------------------
// Pole families
// ---------------------------------------------------------------------------

/// One concrete pole of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct PolePoint {
    pub n: Vec<i64>,
    /// `ξ•` in ω-coordinates
    pub xi_bullet: Vec<Q>,
    /// coefficients of `k_sht` and `k_lng` in `ξ`, ω-coordinates
    pub xi_k: Vec<(Q, Q)>,
    /// `Π 1/c_i^i`, summed over coinciding points
    pub weight: Q,
    /// a numerator binomial vanishes here (kept only outside type A)
    pub numerator_zero: bool,
}

impl PolePoint {
    pub fn eval(&self, ps: &ParamSet) -> Vec<C64> {
        self.xi_bullet
            .iter()
            .zip(&self.xi_k)
            .map(|(b, (ks, kl))| {
                C64::new(crate::rootdata::qf(*b), 0.0)
                    + ps.k_sht * crate::rootdata::qf(*ks)
                    + ps.k_lng * crate::rootdata::qf(*kl)
            })
            .collect()
    }

    fn key(&self) -> (Vec<Q>, Vec<(Q, Q)>) {
        (self.xi_bullet.clone(), self.xi_k.clone())
    }
}

/// A sequence of selected denominator binomials `β̃_i = [β_i, ν(n_i + δ_i)]`,
/// `δ_i = 1` for `β_i < 0`, with the elimination data and admitted poles.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleFamily {
    /// integration order, 0-based simple indices
    pub order: Vec<usize>,
    /// root indices of `β_i`
    pub roots: Vec<usize>,
    /// 1-based type numbers: positive roots by `(first, last)` index, then negatives
    pub labels: Vec<usize>,
    /// `c_i^i`
    pub coeffs: Vec<Q>,
    /// `ᾱ_{σ_i}` in terms of later variables
    pub substitutions: Vec<LinForm>,
    /// `(ξ•, [β_i]/c_i^i)` as forms in the `n_j`; each must be `> 0`
    pub inequalities: Vec<LinForm>,
    /// `ᾱ_i(ξ)` for all simple roots
    pub alpha_values: Vec<LinForm>,
    pub points: Vec<PolePoint>,
    /// cancelation beyond the numerator-zero rule was not resolved
    pub unverified: bool,
}

impl PoleFamily {
    pub fn to_json(&self, rd: &RootDatum) -> Value {
        json!({
            "labels": self.labels,
            "roots": self.roots.iter().map(|&r| rd.root(r).alpha.clone()).collect::<Vec<_>>(),
            "coefficients": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "substitutions": self.substitutions.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "inequalities": self.inequalities.iter().map(|s| format!("{s} > 0")).collect::<Vec<_>>(),
            "alpha_values": self.alpha_values.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "unverified": self.unverified,
            "points": self.points.iter().map(|p| json!({
                "n": p.n,
                "xi_bullet": p.xi_bullet.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "weight": p.weight.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Type numbers for all roots: positive roots sorted by the first and last
/// nonzero simple coefficient, then the negatives in the same order.
pub fn root_labels(rd: &RootDatum) -> Vec<usize> {
    let key = |a: usize| {
        let al = &rd.root(a).alpha;
        let first = al.iter().position(|&x| x != 0).unwrap();
        let last = al.iter().rposition(|&x| x != 0).unwrap();
        (first, last, al.iter().map(|x| x.abs()).collect::<Vec<_>>())
    };
    let mut pos: Vec<usize> = (0..rd.n_pos).collect();
    pos.sort_by_key(|&a| key(a));
    let mut lab = vec![0; rd.roots.len()];
    for (i, &a) in pos.iter().enumerate() {
        lab[a] = i + 1;
        lab[rd.neg(a)] = i + 1 + rd.n_pos;
    }
    lab
}

/// The form `β̄ + ν_β(n_i + δ) + ν_β k_β` whose vanishing is the binomial zero.
fn denominator_form(rd: &RootDatum, beta: usize, step: usize) -> LinForm {
    let r = rd.root(beta);
    let mut f = LinForm::zero(rd.rank);
    for (j, &a) in r.alpha.iter().enumerate() {
        f.c[j] = qi(a);
    }
    let ix_n = f.ix_n(step);
    f.c[ix_n] = qi(r.nu);
    let ix_1 = f.ix_1();
    f.c[ix_1] = qi(if r.is_positive() { 0 } else { r.nu });
    let ix_k = f.ix_k(r.nu > 1);
    f.c[ix_k] = qi(r.nu);
    f
}

struct Search<'a> {
    rd: &'a RootDatum,
    order: Vec<usize>,
    mmax: i64,
    labels: Vec<usize>,
    out: Vec<PoleFamily>,
}

#[derive(Clone)]
struct Node {
    roots: Vec<usize>,
    coeffs: Vec<Q>,
    subs: Vec<LinForm>,
    ineqs: Vec<LinForm>,
    tuples: Vec<Vec<i64>>,
}

impl Search<'_> {
    fn reduce(&self, node: &Node, f: &LinForm) -> LinForm {
        let mut g = f.clone();
        for (i, s) in node.subs.iter().enumerate() {
            g = g.substitute(self.order[i], s);
        }
        g
    }

    fn dfs(&mut self, node: Node) {
        let rd = self.rd;
        let step = node.roots.len();
        if step == rd.rank {
            self.leaf(node);
            return;
        }
        let v = self.order[step];
        for beta in 0..rd.roots.len() {
            if step == 0 && rd.root(beta).is_positive() {
                continue;
            }
            let d = self.reduce(&node, &denominator_form(rd, beta, step));
            let c = d.alpha_coeff(v);
            if c.is_zero() {
                continue;
            }
            // ᾱ_v = −(d − c ᾱ_v)/c
            let mut rest = d.clone();
            rest.c[v] = Q::zero();
            let sub = rest.scaled(-Q::one() / c);
            let mut ineq = sub.clone();
            for i in 0..rd.rank {
                ineq.c[i] = Q::zero();
            }
            let kx = ineq.ix_k(false);
            ineq.c[kx] = Q::zero();
            ineq.c[kx + 1] = Q::zero();
            let mut tuples = Vec::new();
            for t in &node.tuples {
                for m in 0..=self.mmax {
                    let mut u = t.clone();
                    u.push(m);
                    if ineq.bullet_at(&u) > Q::zero() {
                        tuples.push(u);
                    }
                }
            }
            if tuples.is_empty() {
                continue;
            }
            let mut next = node.clone();
            next.roots.push(beta);
            next.coeffs.push(c);
            next.subs.push(sub);
            next.ineqs.push(ineq);
            next.tuples = tuples;
            self.dfs(next);
        }
    }

    fn leaf(&mut self, node: Node) {
        let rd = self.rd;
        let n = rd.rank;
        // back-substitute from the last eliminated variable
        let mut values: Vec<Option<LinForm>> = vec![None; n];
        for i in (0..n).rev() {
            let mut f = node.subs[i].clone();
            for (j, val) in values.iter().enumerate() {
                if let Some(val) = val {
                    f = f.substitute(j, val);
                }
            }
            values[self.order[i]] = Some(f);
        }
        let alpha_values: Vec<LinForm> = values.into_iter().map(|v| v.unwrap()).collect();
        let weight = node.coeffs.iter().fold(Q::one(), |acc, c| acc / c);
        let mut points = Vec::new();
        for t in &node.tuples {
            let (xi_bullet, xi_k): (Vec<Q>, Vec<(Q, Q)>) = alpha_values
                .iter()
                .zip(&rd.nu)
                .map(|(f, &nu)| {
                    let (b, ks, kl) = f.at(t);
                    (b / qi(nu), (ks / qi(nu), kl / qi(nu)))
                })
                .unzip();
            let numerator_zero = numerator_vanishes(rd, &xi_bullet, &xi_k);
            if numerator_zero && rd.family == Family::A {
                continue;
            }
            points.push(PolePoint { n: t.clone(), xi_bullet, xi_k, weight, numerator_zero });
        }
        if points.is_empty() {
            return;
        }
        let unverified = points.iter().any(|p| p.numerator_zero);
        self.out.push(PoleFamily {
            order: self.order.clone(),
            labels: node.roots.iter().map(|&r| self.labels[r]).collect(),
            roots: node.roots,
            coeffs: node.coeffs,
            substitutions: node.subs,
            inequalities: node.ineqs,
            alpha_values,
            points,
            unverified,
        });
    }
}

fn pair_alpha_q(rd: &RootDatum, a: usize, x: &[Q]) -> Q {
    let r = rd.root(a);
    r.alpha
        .iter()
        .zip(&rd.nu)
        .zip(x)
        .fold(Q::zero(), |s, ((&c, &nu), &v)| s + qi(c * nu) * v)
}

/// Some `1 − X_α̃` vanishes at `ξ` identically in `k`.
fn numerator_vanishes(rd: &RootDatum, xb: &[Q], xk: &[(Q, Q)]) -> bool {
    let ks: Vec<Q> = xk.iter().map(|p| p.0).collect();
    let kl: Vec<Q> = xk.iter().map(|p| p.1).collect();
    (0..rd.n_pos).any(|a| {
        let nu = qi(rd.root(a).nu);
        pair_alpha_q(rd, a, &ks).is_zero()
            && pair_alpha_q(rd, a, &kl).is_zero()
            && (pair_alpha_q(rd, a, xb) / nu).is_integer()
    })
}

/// Denominator and numerator binomials vanishing at `ξ` identically in `k`.
pub fn exact_counts(rd: &RootDatum, p: &PolePoint) -> (usize, usize) {
    let ks: Vec<Q> = p.xi_k.iter().map(|x| x.0).collect();
    let kl: Vec<Q> = p.xi_k.iter().map(|x| x.1).collect();
    let mut den = 0;
    let mut num = 0;
    for a in 0..rd.roots.len() {
        let r = rd.root(a);
        let nu = qi(r.nu);
        let b = pair_alpha_q(rd, a, &p.xi_bullet);
        let (s, l) = (pair_alpha_q(rd, a, &ks), pair_alpha_q(rd, a, &kl));
        let jmin = if r.is_positive() { 0 } else { 1 };
        // numerator: (α,ξ) + ν j = 0
        if s.is_zero() && l.is_zero() && (b / nu).is_integer() && -(b / nu).to_integer() >= jmin {
            num += 1;
        }
        // denominator: (α,ξ) + ν j + ν k_α = 0
        let (want_s, want_l) = if r.nu > 1 { (Q::zero(), -nu) } else { (-nu, Q::zero()) };
        if s == want_s && l == want_l && (b / nu).is_integer() && -(b / nu).to_integer() >= jmin {
            den += 1;
        }
    }
    (den, num)
}

/// All pole families of the consecutive elimination for the given order,
/// with `n_i ≤ mmax`. Coinciding points are merged by summing weights and
/// dropped when the sum vanishes.
pub fn enumerate_pole_points(rd: &RootDatum, order: &[usize], mmax: i64) -> Result<Vec<PoleFamily>> {
    let n = rd.rank;
    let mut seen = order.to_vec();
    seen.sort_unstable();
    if seen != (0..n).collect::<Vec<_>>() {
        return Err(Error::Invalid(format!("{order:?} is not an ordering of the simple roots")));
    }
    if mmax < 0 {
        return Err(Error::Invalid("negative m-bound".into()));
    }
    let mut search = Search { rd, order: order.to_vec(), mmax, labels: root_labels(rd), out: Vec::new() };
    let root = Node { roots: vec![], coeffs: vec![], subs: vec![], ineqs: vec![], tuples: vec![vec![]] };
    search.dfs(root);
    let mut fams = search.out;

    // merge coinciding points
    let mut groups: BTreeMap<(Vec<Q>, Vec<(Q, Q)>), Vec<(usize, usize)>> = BTreeMap::new();
    for (fi, f) in fams.iter().enumerate() {
        for (pi, p) in f.points.iter().enumerate() {
            groups.entry(p.key()).or_default().push((fi, pi));
        }
    }
    let mut drop: HashSet<(usize, usize)> = HashSet::new();
    for members in groups.values() {
        if members.len() < 2 {
            continue;
        }
        let total = members.iter().fold(Q::zero(), |s, &(f, p)| s + fams[f].points[p].weight);
        let (f0, p0) = members[0];
        for &m in &members[1..] {
            drop.insert(m);
        }
        if total.is_zero() {
            drop.insert((f0, p0));
        } else {
            fams[f0].points[p0].weight = total;
        }
    }
    for (fi, f) in fams.iter_mut().enumerate() {
        let mut pi = 0;
        f.points.retain(|_| {
            let keep = !drop.contains(&(fi, pi));
            pi += 1;
            keep
        });
    }
    fams.retain(|f| !f.points.is_empty());
    fams.sort_by(|a, b| a.labels.cmp(&b.labels));
    Ok(fams)
}

// ---------------------------------------------------------------------------
// A_n closed forms
// ---------------------------------------------------------------------------

fn require_a(rd: &RootDatum) -> Result<()> {
    if rd.family != Family::A {
        return Err(Error::Unsupported(format!("{} is not of type A", rd.label())));
    }
    Ok(())
}

/// `(b, α_n + ⋯ + α_i) > 0` for all `i`.
pub fn an_sector_contains(rd: &RootDatum, b: &[i64]) -> Result<bool> {
    require_a(rd)?;
    let mut s = 0;
    for &x in b.iter().rev() {
        s += x;
        if s <= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ξ = π_b(−kρ) = b − u_b^{-1}(kρ)`, returned as `(b, −u_b^{-1}(ρ))`.
pub fn an_sector_point(rd: &RootDatum, b: &[i64]) -> Result<(Weight, Weight)> {
    require_a(rd)?;
    let d = pi_u_decompose(rd, b);
    let kpart = d.u.inverse().apply(&rd.rho()).into_iter().map(|x| -x).collect();
    Ok((b.to_vec(), kpart))
}

/// Result of the fundamental-domain check.
#[derive(Clone, Debug, PartialEq)]
pub struct PiDomainReport {
    pub checked: usize,
    /// `(b, indices i with b ∈ π_i(X))` whenever that list is not a singleton,
    /// or disagrees with the minimal ε-coordinate rule
    pub violations: Vec<(Weight, Vec<usize>)>,
}

impl PiDomainReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every `b` with `|b_i| ≤ radius` lies in exactly one `π_i(X)`, where `X` is
/// the sector and `π_0 = id`.
pub fn check_pi_fundamental_domain(n: usize, radius: i64) -> Result<PiDomainReport> {
    let rd = RootDatum::build(Family::A, n)?;
    let pis: Vec<ExtWeyl> = (0..=n)
        .map(|i| if i == 0 { ExtWeyl::identity(n) } else { ExtWeyl::pi(&rd, i - 1).inverse() })
        .collect();
    let mut report = PiDomainReport { checked: 0, violations: Vec::new() };
    let mut b = vec![-radius; n];
    loop {
        report.checked += 1;
        let mut hits = Vec::new();
        for (i, pinv) in pis.iter().enumerate() {
            let c: Vec<i64> = pinv.w.apply(&b).iter().zip(&pinv.b).map(|(x, y)| x + y).collect();
            if an_sector_contains(&rd, &c)? {
                hits.push(i);
            }
        }
        let rule = min_eps_index(&b);
        if hits.len() != 1 || hits[0] != rule {
            report.violations.push((b.clone(), hits));
        }
        // odometer
        let mut i = 0;
        while i < n {
            if b[i] < radius {
                b[i] += 1;
                break;
            }
            b[i] = -radius;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(report)
}

/// Index `m` of `π_1^m(X)` from ε-coordinates: the first index attaining
/// `min c_i`, with `m = n + 1` read as `0`.
pub fn min_eps_index(b: &[i64]) -> usize {
    let n = b.len();
    // c_j = Σ_{i ≥ j} b_i up to a common shift; c_{n+1} = 0
    let mut c = vec![0i64; n + 1];
    for j in (0..n).rev() {
        c[j] = c[j + 1] + b[j];
    }
    let min = *c.iter().min().unwrap();
    let m = c.iter().position(|&x| x == min).unwrap() + 1;
    if m == n + 1 {
        0
    } else {
        m
    }
}

// ---------------------------------------------------------------------------
// Closed subsystems
// ---------------------------------------------------------------------------

/// A closed root subsystem of full rank, given by affine roots `[α, ν_α j]`
/// (all `j = 0` in the finite case).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemWitness {
    pub roots: Vec<AffineRoot>,
    pub simple: Vec<AffineRoot>,
    pub rank: usize,
    /// component types such as `A1`, `B2`, sorted
    pub components: Vec<String>,
    /// largest `|j|` the closure was checked against
    pub window: i64,
}

impl SubsystemWitness {
    pub fn label(&self) -> String {
        self.components.join("+")
    }

    /// Candidate residual points: `(β̃_i, ξ) ∈ {0, −ν k_{β_i}}` per the choice
    /// of the subset `I′` of simple roots sent to `1`.
    pub fn candidate_points(&self, rd: &RootDatum, ps: &ParamSet) -> Vec<SpectralPoint> {
        let n = rd.rank;
        let mut out = Vec::new();
        for mask in 0..(1u32 << n) {
            let rhs: Vec<C64> = self
                .simple
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let r = rd.root(f.root);
                    let lvl = C64::new((r.nu * f.j) as f64, 0.0);
                    if mask & (1 << i) != 0 {
                        -lvl
                    } else {
                        -lvl - ps.k(r.nu) * r.nu as f64
                    }
                })
                .collect();
            // solve Σ_j (β_i, ω_j) ξ_j = rhs_i
            let a: Vec<Vec<f64>> = self
                .simple
                .iter()
                .map(|f| {
                    let om = &rd.root(f.root).omega;
                    (0..n)
                        .map(|j| (0..n).map(|l| om[l] as f64 * rd.gram_omega_f[l][j]).sum())
                        .collect()
                })
                .collect();
            if let Some(x) = solve_c(a, rhs) {
                out.push(SpectralPoint::new(x));
            }
        }
        out
    }
}

fn solve_c(mut a: Vec<Vec<f64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                let bc = b[c];
                b[r] -= bc * f;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn affine_sum(rd: &RootDatum, x: &AffineRoot, y: &AffineRoot) -> Option<AffineRoot> {
    let (rx, ry) = (rd.root(x.root), rd.root(y.root));
    let om: Vec<i64> = rx.omega.iter().zip(&ry.omega).map(|(a, b)| a + b).collect();
    let s = rd.root_index(&om)?;
    let lvl = rx.nu * x.j + ry.nu * y.j;
    let nu = rd.root(s).nu;
    if lvl % nu != 0 {
        return None;
    }
    Some(AffineRoot::new(s, lvl / nu))
}

/// Closure of `±gens` under sums that are affine roots, or `None` if some
/// level leaves `[-window, window]`.
fn closure(rd: &RootDatum, gens: &[AffineRoot], window: i64) -> Option<BTreeSet<AffineRoot>> {
    let mut set: BTreeSet<AffineRoot> = BTreeSet::new();
    for g in gens {
        set.insert(*g);
        set.insert(g.negate(rd));
    }
    loop {
        let items: Vec<AffineRoot> = set.iter().copied().collect();
        let mut grew = false;
        for x in &items {
            for y in &items {
                if let Some(s) = affine_sum(rd, x, y) {
                    if s.j.abs() > window {
                        return None;
                    }
                    if set.insert(s) {
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return Some(set);
        }
    }
}

fn rank_of(rd: &RootDatum, roots: &[AffineRoot]) -> usize {
    let n = rd.rank;
    let mut rows: Vec<Vec<Q>> = roots.iter().map(|f| rd.root(f.root).alpha.iter().map(|&x| qi(x)).collect()).collect();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = rows[i][c] / rows[rank][c];
                for k in 0..n {
                    let v = rows[rank][k];
                    rows[i][k] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Simple system of a closed subsystem: positive elements (for a generic
/// linear functional) that are not sums of two positive elements.
fn simple_system(rd: &RootDatum, set: &BTreeSet<AffineRoot>) -> Vec<AffineRoot> {
    // generic functional on α-coordinates, with a small level term
    let weight = |f: &AffineRoot| -> f64 {
        let r = rd.root(f.root);
        r.alpha.iter().enumerate().map(|(i, &a)| a as f64 * (1.0 + 0.1 * (i as f64 + 1.0).sqrt())).sum::<f64>()
            + 1e-3 * (r.nu * f.j) as f64
    };
    let pos: Vec<AffineRoot> = set.iter().copied().filter(|f| weight(f) > 0.0).collect();
    pos.iter()
        .copied()
        .filter(|f| {
            !pos.iter().any(|x| {
                pos.iter().any(|y| affine_sum(rd, x, y).map(|s| s == *f).unwrap_or(false))
            })
        })
        .collect()
}

fn components(rd: &RootDatum, set: &BTreeSet<AffineRoot>, simple: &[AffineRoot]) -> Vec<String> {
    let n = simple.len();
    let orth = |a: &AffineRoot, b: &AffineRoot| rd.pair(&rd.root(a.root).omega, &rd.root(b.root).omega).is_zero();
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if comp[y] == usize::MAX && !orth(&simple[x], &simple[y]) {
                    comp[y] = ncomp;
                    stack.push(y);
                }
            }
        }
        ncomp += 1;
    }
    let mut out = Vec::new();
    for c in 0..ncomp {
        let members: Vec<&AffineRoot> = simple.iter().enumerate().filter(|(i, _)| comp[*i] == c).map(|(_, s)| s).collect();
        let r = members.len();
        let in_comp: Vec<&AffineRoot> = set
            .iter()
            .filter(|f| members.iter().any(|m| !orth(f, m)))
            .collect();
        let size = in_comp.len();
        let nus: BTreeSet<i64> = in_comp.iter().map(|f| rd.root(f.root).nu).collect();
        let short = in_comp.iter().filter(|f| rd.root(f.root).nu == *nus.iter().next().unwrap()).count();
        let name = if nus.len() == 1 {
            if size == r * (r + 1) {
                "A"
            } else if r >= 4 && size == 2 * r * (r - 1) {
                "D"
            } else if size == 72 {
                "E"
            } else {
                "?"
            }
        } else if size == 12 && r == 2 {
            "G"
        } else if size == 48 && r == 4 {
            "F"
        } else if r == 2 {
            "B"
        } else if short == 2 * r {
            "B"
        } else {
            "C"
        };
        out.push(format!("{name}{r}"));
    }
    out.sort();
    out
}

/// All full-rank closed subsystems of `R` (or the finite ones of `R̃` whose
/// generators have levels in `{0, 1}`), up to equality of root sets.
pub fn closed_subsystems(rd: &RootDatum, affine: bool) -> Result<Vec<SubsystemWitness>> {
    let n = rd.rank;
    if n > 4 {
        return Err(Error::Unsupported(format!("closed subsystem search for rank {n} > 4")));
    }
    let window = if affine { 2 * rd.coxeter_number } else { 0 };
    let mut cands: Vec<AffineRoot> = (0..rd.n_pos).map(|a| AffineRoot::new(a, 0)).collect();
    if affine {
        for a in 0..rd.roots.len() {
            cands.push(AffineRoot::new(a, 1));
        }
    }
    let mut found: BTreeMap<Vec<AffineRoot>, SubsystemWitness> = BTreeMap::new();
    let mut idx: Vec<usize> = (0..n).collect();
    let m = cands.len();
    if m < n {
        return Ok(Vec::new());
    }
    loop {
        let gens: Vec<AffineRoot> = idx.iter().map(|&i| cands[i]).collect();
        if rank_of(rd, &gens) == n {
            if let Some(set) = closure(rd, &gens, window) {
                let key: Vec<AffineRoot> = set.iter().copied().collect();
                if !found.contains_key(&key) && rank_of(rd, &key) == n {
                    let simple = simple_system(rd, &set);
                    let components = components(rd, &set, &simple);
                    found.insert(
                        key.clone(),
                        SubsystemWitness { roots: key, rank: n, simple, components, window },
                    );
                }
            }
        }
        // next n-combination
        let mut i = n;
        while i > 0 && idx[i - 1] == m - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let mut out: Vec<SubsystemWitness> = found.into_values().collect();
    out.sort_by(|a, b| b.roots.len().cmp(&a.roots.len()).then(a.roots.cmp(&b.roots)));
    Ok(out)
}

/// The binomials vanishing at `π_b(−ρ_k)` compared with `{π_b(α_i)}`.
pub fn residue_binomials_match(rd: &RootDatum, ps: &ParamSet, b: &[i64], window: i64) -> bool {
    let (pt, expected) = pi_b_residue_data(rd, ps, b);
    let cert = ResidueCertificate::scan(rd, ps, &pt, window, 1e-9);
    let got: BTreeSet<AffineRoot> = cert.denominators.iter().copied().collect();
    let want: BTreeSet<AffineRoot> = expected.into_iter().collect();
    got == want && cert.numerators.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(k: C64) -> ParamSet {
        ParamSet::new(0.37, k).unwrap()
    }

    #[test]
    fn residual_predicate() {
        let a2 = RootDatum::build(Family::A, 2).unwrap();
        let p = ps(C64::new(-0.31, 0.07));
        assert!(is_mu_residual(&a2, &p, &p.minus_rho_k(&a2), 6).is_residual());
        let r = is_mu_residual(&a2, &p, &SpectralPoint::real(&[0.0, 0.0]), 6);
        assert!(!r.is_residual());
        assert_eq!(r.certificate().ae0(), 3);

        let a3 = RootDatum::build(Family::A, 3).unwrap();
        let k = p.k_sht;
        let one = C64::new(1.0, 0.0);
        let xi = SpectralPoint::new(vec![one + k, C64::new(0.0, 0.0), one + k]);
        let r = is_mu_residual(&a3, &p, &xi, 6);
        assert_eq!((r.certificate().ae1(), r.certificate().ae0()), (4, 1));
        assert!(r.is_residual());
    }

    #[test]
    fn a1_single_family() {
        let a1 = RootDatum::build(Family::A, 1).unwrap();
        let fams = enumerate_pole_points(&a1, &[0], 4).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].alpha_values[0].to_string(), "1+n1+k");
        let xs: Vec<Q> = fams[0].points.iter().map(|p| p.xi_bullet[0]).collect();
        assert_eq!(xs, (1..=5).map(qi).collect::<Vec<_>>());
    }

    #[test]
    fn families_satisfy_their_invariants() {
        for (fam, rank, order) in [(Family::A, 2, vec![0, 1]), (Family::A, 3, vec![0, 1, 2]), (Family::B, 2, vec![0, 1])] {
            let rd = RootDatum::build(fam, rank).unwrap();
            let p = ParamSet::with_k(0.37, C64::new(-0.21, 0.05), C64::new(-0.33, 0.02)).unwrap();
            for f in enumerate_pole_points(&rd, &order, 2).unwrap() {
                assert!(f.coeffs.iter().all(|c| !c.is_zero()));
                for pt in &f.points {
                    for ineq in &f.inequalities {
                        assert!(ineq.bullet_at(&pt.n) > Q::zero());
                    }
                    // every defining binomial vanishes at ξ
                    let xi = pt.eval(&p);
                    for (i, &beta) in f.roots.iter().enumerate() {
                        let r = rd.root(beta);
                        let j = pt.n[i] + i64::from(!r.is_positive());
                        let z = AffineRoot::new(beta, j).pair_c(&rd, &xi) + p.k(r.nu) * r.nu as f64;
                        assert!(z.norm() < 1e-12, "{:?} {:?}", f.labels, pt.n);
                    }
                    if pt.numerator_zero {
                        assert!(f.unverified);
                        continue;
                    }
                    let (ae1, ae0) = exact_counts(&rd, pt);
                    assert!(ae1 >= ae0 + rank);
                    if rd.family == Family::A {
                        assert!(is_mu_residual(&rd, &p, &SpectralPoint::new(xi), 12).is_residual());
                    }
                }
            }
        }
    }

    #[test]
    fn labels_follow_the_positive_root_order() {
        let a3 = RootDatum::build(Family::A, 3).unwrap();
        let lab = root_labels(&a3);
        let by_label: BTreeMap<usize, Vec<i64>> = (0..a3.roots.len()).map(|a| (lab[a], a3.root(a).alpha.clone())).collect();
        assert_eq!(by_label[&1], vec![1, 0, 0]);
        assert_eq!(by_label[&3], vec![1, 1, 1]);
        assert_eq!(by_label[&5], vec![0, 1, 1]);
        assert_eq!(by_label[&9], vec![-1, -1, -1]);
        assert_eq!(by_label[&12], vec![0, 0, -1]);
    }

    #[test]
    fn sector_examples() {
        let a2 = RootDatum::build(Family::A, 2).unwrap();
        assert!(an_sector_contains(&a2, &[0, 1]).unwrap());
        assert!(!an_sector_contains(&a2, &[0, 0]).unwrap());
        assert!(!an_sector_contains(&a2, &[3, -1]).unwrap());
        let b2 = RootDatum::build(Family::B, 2).unwrap();
        assert!(an_sector_contains(&b2, &[0, 1]).is_err());
    }

    #[test]
    fn pi_domain_small() {
        let r = check_pi_fundamental_domain(2, 3).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        assert_eq!(r.checked, 49);
        assert_eq!(min_eps_index(&[0, 1]), 0);
    }

    #[test]
    fn closed_subsystems_small() {
        let a2 = RootDatum::build(Family::A, 2).unwrap();
        let s = closed_subsystems(&a2, false).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].label(), "A2");
        let b2 = RootDatum::build(Family::B, 2).unwrap();
        let labels: Vec<String> = closed_subsystems(&b2, false).unwrap().iter().map(|w| w.label()).collect();
        assert!(labels.contains(&"B2".to_string()));
        assert!(labels.contains(&"A1+A1".to_string()));
    }
}
