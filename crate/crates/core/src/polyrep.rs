//! The polynomial representation: Demazure–Lusztig operators, `π_r`,
//! `Y_b`, and nonsymmetric Macdonald polynomials built by Y-intertwiners.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qlaurent::{LaurentPoly, ParamSet, SpectralPoint, C64};
use crate::rootdata::{RootDatum, WMat, Weight, Q};
use crate::weyl::{pi_u_decompose, ExtWeyl};

fn c1() -> C64 {
    C64::new(1.0, 0.0)
}

/// Node data for `T_i`: the nonaffine root of `α̃_i` as a weight, its coroot
/// pairing, the q-level of `α̃_i`, and `ν_i`.
struct NodeData {
    root_w: Weight,
    root_idx: usize,
    level: f64,
    nu: i64,
}

fn node(rd: &RootDatum, i: usize) -> NodeData {
    if i == 0 {
        let r = rd.neg(rd.vartheta);
        NodeData { root_w: rd.root(r).omega.clone(), root_idx: r, level: 1.0, nu: 1 }
    } else {
        let r = rd.simple(i - 1);
        NodeData { root_w: rd.root(r).omega.clone(), root_idx: r, level: 0.0, nu: rd.nu[i - 1] }
    }
}

/// `T_i(f) = t^{1/2} s_i(f) + (t^{1/2} − t^{-1/2}) (s_i(f) − f)/(X_{α̃_i} − 1)`,
/// with the quotient computed by exact division monomial by monomial.
pub fn apply_t(rd: &RootDatum, ps: &ParamSet, i: usize, f: &LaurentPoly) -> LaurentPoly {
    let nd = node(rd, i);
    let th = ps.t_half(nd.nu);
    let d = th - 1.0 / th;
    // Z = λ X_α with λ = q^{level}
    let lam = ps.qpow_r(nd.level);
    let mut out = LaurentPoly::zero();
    for (b, c) in &f.terms {
        let m = rd.coroot_pair(nd.root_idx, b);
        // s_i(X_b) = X_b Z^{-m}
        let zpow = |e: i64, coef: C64, out: &mut LaurentPoly| {
            let idx: Weight = b.iter().zip(&nd.root_w).map(|(x, a)| x + e * a).collect();
            out.add_term(&idx, coef * lam.powi(e as i32));
        };
        zpow(-m, c * th, &mut out);
        if m > 0 {
            for e in 1..=m {
                zpow(-e, -c * d, &mut out);
            }
        } else if m < 0 {
            for e in 0..(-m) {
                zpow(e, c * d, &mut out);
            }
        }
    }
    out
}

/// `T_i^{-1} = T_i − (t^{1/2} − t^{-1/2})`.
pub fn apply_t_inv(rd: &RootDatum, ps: &ParamSet, i: usize, f: &LaurentPoly) -> LaurentPoly {
    let th = ps.t_half(node(rd, i).nu);
    &apply_t(rd, ps, i, f) - &f.scale(th - 1.0 / th)
}

/// `T_ŵ = π T_{i_l} ⋯ T_{i_1}` along the greedy reduced word.
pub fn apply_t_elem(rd: &RootDatum, ps: &ParamSet, w: &ExtWeyl, f: &LaurentPoly) -> LaurentPoly {
    let (pi, word) = w.reduced_word(rd);
    let mut g = f.clone();
    for &i in &word {
        g = apply_t(rd, ps, i, &g);
    }
    g.weyl_act(rd, ps, &pi)
}

/// `T_ŵ^{-1} = T_{i_1}^{-1} ⋯ T_{i_l}^{-1} π^{-1}`.
pub fn apply_t_elem_inv(rd: &RootDatum, ps: &ParamSet, w: &ExtWeyl, f: &LaurentPoly) -> LaurentPoly {
    let (pi, word) = w.reduced_word(rd);
    let mut g = f.weyl_act(rd, ps, &pi.inverse());
    for &i in word.iter().rev() {
        g = apply_t_inv(rd, ps, i, &g);
    }
    g
}

pub fn apply_t_finite(rd: &RootDatum, ps: &ParamSet, w: &WMat, f: &LaurentPoly) -> LaurentPoly {
    apply_t_elem(rd, ps, &ExtWeyl::finite(w.clone()), f)
}

pub fn apply_t_finite_inv(rd: &RootDatum, ps: &ParamSet, w: &WMat, f: &LaurentPoly) -> LaurentPoly {
    apply_t_elem_inv(rd, ps, &ExtWeyl::finite(w.clone()), f)
}

/// `T_{w_0}`.
pub fn apply_t_w0(rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly) -> LaurentPoly {
    apply_t_finite(rd, ps, &rd.w0, f)
}

fn split_dominant(b: &[i64]) -> (Weight, Weight) {
    (b.iter().map(|&x| x.max(0)).collect(), b.iter().map(|&x| (-x).max(0)).collect())
}

/// `Y_b = Y_{b_1} Y_{b_2}^{-1}` with `b = b_1 − b_2`, `b_i ∈ P_+`, and
/// `Y_c = T_c` (the translation element) for dominant `c`.
pub fn apply_y(rd: &RootDatum, ps: &ParamSet, b: &[i64], f: &LaurentPoly) -> LaurentPoly {
    let (b1, b2) = split_dominant(b);
    let mut g = f.clone();
    if b2.iter().any(|&x| x != 0) {
        g = apply_t_elem_inv(rd, ps, &ExtWeyl::translation(&b2), &g);
    }
    if b1.iter().any(|&x| x != 0) {
        g = apply_t_elem(rd, ps, &ExtWeyl::translation(&b1), &g);
    }
    g
}

pub fn apply_y_inv(rd: &RootDatum, ps: &ParamSet, b: &[i64], f: &LaurentPoly) -> LaurentPoly {
    let nb: Weight = b.iter().map(|x| -x).collect();
    apply_y(rd, ps, &nb, f)
}

/// An element of the operator algebra acting on the polynomial representation.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    T(usize),
    TInv(usize),
    Pi(usize),
    PiInv(usize),
    X(Weight),
    Y(Weight),
}

/// A word of atoms; the rightmost atom acts first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorWord(pub Vec<Atom>);

impl OperatorWord {
    pub fn apply(&self, rd: &RootDatum, ps: &ParamSet, f: &LaurentPoly) -> LaurentPoly {
        let mut g = f.clone();
        for a in self.0.iter().rev() {
            g = match a {
                Atom::T(i) => apply_t(rd, ps, *i, &g),
                Atom::TInv(i) => apply_t_inv(rd, ps, *i, &g),
                Atom::Pi(r) => g.weyl_act(rd, ps, &ExtWeyl::pi(rd, *r)),
                Atom::PiInv(r) => g.weyl_act(rd, ps, &ExtWeyl::pi(rd, *r).inverse()),
                Atom::X(b) => g.mul_monomial(b, c1()),
                Atom::Y(b) => apply_y(rd, ps, b, &g),
            };
        }
        g
    }

    pub fn inverse(&self) -> OperatorWord {
        OperatorWord(
            self.0
                .iter()
                .rev()
                .map(|a| match a {
                    Atom::T(i) => Atom::TInv(*i),
                    Atom::TInv(i) => Atom::T(*i),
                    Atom::Pi(r) => Atom::PiInv(*r),
                    Atom::PiInv(r) => Atom::Pi(*r),
                    Atom::X(b) => Atom::X(b.iter().map(|x| -x).collect()),
                    Atom::Y(b) => Atom::Y(b.iter().map(|x| -x).collect()),
                })
                .collect(),
        )
    }
}

/// A nonsymmetric Macdonald polynomial with its spectral data.
#[derive(Clone, Debug)]
pub struct MacdonaldPoly {
    pub b: Weight,
    /// monic: the coefficient of `X_b` is 1
    pub poly: LaurentPoly,
    /// `E_b(q^{−ρ_k})`
    pub spherical_value: C64,
    /// `η_b = π_b((−ρ_k)) = b − u_b^{-1}(ρ_k)`; `Y_a E_b = q^{−(a, η_b)} E_b`
    pub point: SpectralPoint,
}

impl MacdonaldPoly {
    pub fn eigenvalue(&self, rd: &RootDatum, ps: &ParamSet, a: &[i64]) -> C64 {
        ps.qpow(-rd.pair_c(a, &self.point.xi))
    }

    /// `𝓔_b = E_b / E_b(q^{−ρ_k})`.
    pub fn spherical(&self) -> LaurentPoly {
        self.poly.scale(1.0 / self.spherical_value)
    }

    /// `max_i ‖Y_{ω_i} E_b − λ_i E_b‖_∞`.
    pub fn eigen_residual(&self, rd: &RootDatum, ps: &ParamSet) -> f64 {
        (0..rd.rank)
            .map(|i| {
                let a = rd.fundamental(i);
                let lhs = apply_y(rd, ps, &a, &self.poly);
                let rhs = self.poly.scale(self.eigenvalue(rd, ps, &a));
                (&lhs - &rhs).norm_inf()
            })
            .fold(0.0, f64::max)
    }
}

/// The spectral point `π_b((−ρ_k))`.
pub fn spectral_point(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> SpectralPoint {
    let pi = pi_u_decompose(rd, b).pi;
    ps.minus_rho_k(rd).act(&pi)
}

/// Sort key realizing the E-order: `b′ ≺ b` iff `b′_+ < b_+` in dominance, or
/// `b′_+ = b_+` and `l(π_{b′}) < l(π_b)`. Ties are lexicographic.
pub fn e_order_key(rd: &RootDatum, b: &[i64]) -> (Q, usize, Weight) {
    let bp = rd.to_dominant(b);
    let rv = rd.rho_vee();
    let bq: Vec<Q> = bp.iter().map(|&x| Q::from_integer(x)).collect();
    let h = rd.pair_q(&rv, &bq);
    let l = pi_u_decompose(rd, b).pi.length(rd);
    (h, l, b.to_vec())
}

/// Memo cache of `E_b` for one `(RootDatum, ParamSet)`; safe for concurrent readers.
pub struct MacdonaldCache {
    pub rd: RootDatum,
    pub ps: ParamSet,
    /// relative threshold for the intertwiner denominators
    pub generic_tol: f64,
    map: RwLock<HashMap<Weight, MacdonaldPoly>>,
}

impl MacdonaldCache {
    pub fn new(rd: &RootDatum, ps: &ParamSet) -> Self {
        MacdonaldCache {
            rd: rd.clone(),
            ps: ps.clone(),
            generic_tol: 1e-8,
            map: RwLock::new(HashMap::new()),
        }
    }

    /// `E_b`, built recursively along the left greedy word of `π_b`.
    pub fn get(&self, b: &[i64]) -> Result<MacdonaldPoly> {
        if let Some(e) = self.map.read().expect("lock").get(b) {
            return Ok(e.clone());
        }
        let e = self.build(b)?;
        self.map.write().expect("lock").insert(b.to_vec(), e.clone());
        Ok(e)
    }

    fn finish(&self, b: &[i64], poly: LaurentPoly) -> Result<MacdonaldPoly> {
        let (rd, ps) = (&self.rd, &self.ps);
        let lead = poly.coeff(b);
        if lead.norm() < 1e-300 {
            return Err(Error::NonGeneric(format!("leading coefficient of E_{b:?} vanishes")));
        }
        let poly = poly.scale(1.0 / lead).prune(1e-15);
        let spherical_value = poly.eval(rd, ps, &ps.minus_rho_k(rd));
        Ok(MacdonaldPoly { b: b.to_vec(), poly, spherical_value, point: spectral_point(rd, ps, b) })
    }

    fn build(&self, b: &[i64]) -> Result<MacdonaldPoly> {
        let (rd, ps) = (&self.rd, &self.ps);
        let n = rd.rank;
        if b.iter().all(|&x| x == 0) {
            return self.finish(b, LaurentPoly::one(n));
        }
        let pi_b = pi_u_decompose(rd, b).pi;
        let (word, pi) = pi_b.reduced_word_left(rd);
        if word.is_empty() {
            // π_b = π_r: σ(π_r) = T_{u_r}^{-1} X_{ς(r)}^{-1} applied to 1
            let r = (0..n).find(|&i| pi.b[i] == 1).expect("minuscule");
            let d = pi_u_decompose(rd, &rd.fundamental(r));
            let xs: Weight = rd.varsigma(&rd.fundamental(r)).iter().map(|x| -x).collect();
            let g = apply_t_finite_inv(rd, ps, &d.u, &LaurentPoly::x(&xs));
            return self.finish(b, g);
        }
        let j = word[0];
        let rest = ExtWeyl::s(rd, j).mul(&pi_b);
        let b_prev: Weight = rest.b.clone();
        debug_assert_eq!(pi_u_decompose(rd, &b_prev).pi, rest);
        let prev = self.get(&b_prev)?;
        let z = &prev.point.xi;
        let (g, x_at) = if j == 0 {
            // σ(T_0) = T_{s_ϑ}^{-1} X_ϑ^{-1}
            let vt = rd.root(rd.vartheta).omega.clone();
            let nvt: Weight = vt.iter().map(|x| -x).collect();
            let sv = rd.root_reflection_matrix(rd.vartheta);
            let g = apply_t_finite_inv(rd, ps, &sv, &prev.poly.mul_monomial(&nvt, c1()));
            let x0 = ps.qpow(C64::new(1.0, 0.0) - rd.root_pair_c(rd.vartheta, z));
            (g, x0)
        } else {
            let g = apply_t(rd, ps, j, &prev.poly);
            (g, ps.qpow(rd.root_pair_c(rd.simple(j - 1), z)))
        };
        let nu = if j == 0 { 1 } else { rd.nu[j - 1] };
        let th = ps.t_half(nu);
        let den = x_at - 1.0;
        if den.norm() < self.generic_tol * (1.0 + x_at.norm()) {
            return Err(Error::NonGeneric(format!(
                "intertwiner denominator vanishes at node {j}, point {:?}",
                prev.point.xi
            )));
        }
        let coef = (th - 1.0 / th) / den;
        let out = &g + &prev.poly.scale(coef);
        self.finish(b, out)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `E_b` for one label.
pub fn macdonald_e(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> Result<MacdonaldPoly> {
    MacdonaldCache::new(rd, ps).get(b)
}

/// `f = Σ c_b E_b` by triangular elimination in the E-order.
pub fn expand_in_e(cache: &MacdonaldCache, f: &LaurentPoly) -> Result<Vec<(Weight, C64)>> {
    let rd = &cache.rd;
    let scale = f.norm_inf().max(1e-300);
    let mut rest = f.clone();
    let mut out: Vec<(Weight, C64)> = Vec::new();
    let mut guard = 0;
    while !rest.is_zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Internal("E-expansion did not terminate".into()));
        }
        let top = rest
            .terms
            .keys()
            .max_by(|a, b| e_order_key(rd, a).cmp(&e_order_key(rd, b)))
            .unwrap()
            .clone();
        let c = rest.coeff(&top);
        let e = cache.get(&top)?;
        rest = &rest - &e.poly.scale(c);
        rest.terms.remove(&top);
        rest = LaurentPoly {
            terms: rest.terms.into_iter().filter(|(_, v)| v.norm() > 1e-15 * scale).collect(),
        };
        if let Some(slot) = out.iter_mut().find(|(w, _)| *w == top) {
            slot.1 += c;
        } else {
            out.push((top, c));
        }
    }
    Ok(out)
}

/// The coefficient of `E_0` in `f`.
pub fn e0_coefficient(cache: &MacdonaldCache, f: &LaurentPoly) -> Result<C64> {
    let zero = cache.rd.zero_weight();
    Ok(expand_in_e(cache, f)?
        .into_iter()
        .find(|(b, _)| *b == zero)
        .map(|(_, c)| c)
        .unwrap_or_else(Complex64::zero))
}

/// Which operator is tested by [`diamond_adjoint_residual`].
#[derive(Clone, Debug)]
pub enum DiamondOp {
    T(usize),
    Y(Weight),
}

/// `|⟨H f, g⟩ − ⟨f, ◇(H) g⟩|` with `◇(T_i) = T_i`, `◇(Y_b) = Y_b` (and
/// `◇(T_w) = T_{w^{-1}}`), for a user-supplied bilinear pairing.
pub fn diamond_adjoint_residual<P>(
    rd: &RootDatum,
    ps: &ParamSet,
    h: &DiamondOp,
    f: &LaurentPoly,
    g: &LaurentPoly,
    pairing: P,
) -> Result<f64>
where
    P: Fn(&LaurentPoly, &LaurentPoly) -> Result<C64>,
{
    let apply = |p: &LaurentPoly| match h {
        DiamondOp::T(i) => apply_t(rd, ps, *i, p),
        DiamondOp::Y(b) => apply_y(rd, ps, b, p),
    };
    let lhs = pairing(&apply(f), g)?;
    let rhs = pairing(f, &apply(g))?;
    Ok((lhs - rhs).norm())
}

/// Numeric `(a, ξ)`-style helper for tests: `q^{(ρ_k, b)}`.
pub fn q_rho_k(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> C64 {
    ps.qpow(rd.pair_c(b, &ps.rho_k(rd)))
}

/// `t^{l(w_0)/2}` with the ν-split of the length.
pub fn t_half_len_w0(rd: &RootDatum, ps: &ParamSet) -> C64 {
    let (s, l) = ExtWeyl::finite(rd.w0.clone()).length_by_nu(rd);
    ps.t_half(1).powu(s as u32) * ps.t_half(rd.nu_lng).powu(l as u32)
}
