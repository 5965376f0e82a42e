//! Numeric parameters and Laurent polynomials over the weight lattice.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::{qf, RootDatum, Weight, Q};
use crate::weyl::ExtWeyl;

pub type C64 = Complex64;

/// Working precision. Only double precision is implemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Precision {
    #[default]
    Double,
    DoubleDouble,
}

/// `q ∈ (0,1)`, complex `k_sht`, `k_lng`, and truncation policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub q: f64,
    pub k_sht: C64,
    pub k_lng: C64,
    /// number of q-levels kept in infinite products beyond the shift of the argument
    pub n_trunc: usize,
    pub eps: f64,
    pub precision: Precision,
}

impl ParamSet {
    pub fn new(q: f64, k: C64) -> Result<Self> {
        Self::with_k(q, k, k)
    }

    pub fn with_k(q: f64, k_sht: C64, k_lng: C64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Invalid(format!("q = {q} must lie in (0,1)")));
        }
        Ok(ParamSet { q, k_sht, k_lng, n_trunc: 60, eps: 1e-14, precision: Precision::Double })
    }

    pub fn real(q: f64, k: f64) -> Self {
        Self::new(q, C64::new(k, 0.0)).expect("valid q")
    }

    pub fn check_precision(&self) -> Result<()> {
        match self.precision {
            Precision::Double => Ok(()),
            Precision::DoubleDouble => {
                Err(Error::Unsupported("double-double precision is not implemented".into()))
            }
        }
    }

    pub fn ln_q(&self) -> f64 {
        self.q.ln()
    }

    /// `q^z` on the principal branch.
    pub fn qpow(&self, z: C64) -> C64 {
        (z * self.ln_q()).exp()
    }

    pub fn qpow_r(&self, r: f64) -> f64 {
        self.q.powf(r)
    }

    pub fn k(&self, nu: i64) -> C64 {
        if nu == 1 {
            self.k_sht
        } else {
            self.k_lng
        }
    }

    /// `t_ν = q^{ν k_ν}`.
    pub fn t(&self, nu: i64) -> C64 {
        self.qpow(self.k(nu) * nu as f64)
    }

    /// `t_ν^{1/2} = q^{ν k_ν / 2}`.
    pub fn t_half(&self, nu: i64) -> C64 {
        self.qpow(self.k(nu) * (nu as f64 / 2.0))
    }

    /// `q^{(ρ_k, b)}`-type monomials need ρ_k in ω-coordinates.
    pub fn rho_k(&self, rd: &RootDatum) -> Vec<C64> {
        rd.rho_k(self.k_sht, self.k_lng)
    }

    /// The point `−ρ_k`.
    pub fn minus_rho_k(&self, rd: &RootDatum) -> SpectralPoint {
        SpectralPoint::tagged(self.rho_k(rd).into_iter().map(|x| -x).collect(), "-rho_k")
    }

    /// `t^{l}` for a pair of lengths `(l_sht, l_lng)`.
    pub fn t_len(&self, rd: &RootDatum, l: (usize, usize)) -> C64 {
        self.t(1).powu(l.0 as u32) * self.t(rd.nu_lng).powu(l.1 as u32)
    }

    /// Genericity: `q^m ≠ t_ν^l` for `|l|, |m| ≤ bound`, within `tol`.
    pub fn assert_generic(&self, rd: &RootDatum, bound: i64, tol: f64) -> Result<()> {
        let nus: Vec<i64> = if rd.nu_lng > 1 { vec![1, rd.nu_lng] } else { vec![1] };
        for &nu in &nus {
            for l in -bound..=bound {
                if l == 0 {
                    continue;
                }
                for m in -bound..=bound {
                    let v = self.qpow((self.k(nu) * (nu * l) as f64) - C64::new(m as f64, 0.0));
                    if (v - 1.0).norm() < tol {
                        return Err(Error::NonGeneric(format!("q^{m} = t_{nu}^{l}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A point `ξ ∈ ℂⁿ` in ω-coordinates, `ξ_i = (α_i^∨, ξ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub xi: Vec<C64>,
    pub tag: Option<String>,
}

impl SpectralPoint {
    pub fn new(xi: Vec<C64>) -> Self {
        SpectralPoint { xi, tag: None }
    }

    pub fn tagged(xi: Vec<C64>, tag: &str) -> Self {
        SpectralPoint { xi, tag: Some(tag.to_string()) }
    }

    /// The point with `(α_i, ξ) = z_i` for the simple roots.
    pub fn from_simple_values(rd: &RootDatum, z: &[C64]) -> Self {
        SpectralPoint::new(z.iter().zip(&rd.nu).map(|(x, &nu)| x / nu as f64).collect())
    }

    pub fn real(x: &[f64]) -> Self {
        SpectralPoint::new(x.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// `X_a(q^ξ) = q^{(a, ξ)}`.
    pub fn monomial(&self, rd: &RootDatum, ps: &ParamSet, a: &[i64]) -> C64 {
        ps.qpow(rd.pair_c(a, &self.xi))
    }

    pub fn act(&self, w: &ExtWeyl) -> SpectralPoint {
        SpectralPoint::new(w.act_on_point(&self.xi))
    }
}

/// Finite Laurent polynomial `Σ c_b X_b` over `P`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentPoly {
    pub terms: BTreeMap<Weight, C64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn constant(n: usize, c: C64) -> Self {
        Self::monomial(&vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, C64::new(1.0, 0.0))
    }

    pub fn monomial(b: &[i64], c: C64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(b, c);
        p
    }

    pub fn x(b: &[i64]) -> Self {
        Self::monomial(b, C64::new(1.0, 0.0))
    }

    pub fn from_terms(terms: &[(Weight, C64)]) -> Self {
        let mut p = LaurentPoly::zero();
        for (b, c) in terms {
            p.add_term(b, *c);
        }
        p
    }

    pub fn add_term(&mut self, b: &[i64], c: C64) {
        if c == C64::zero() {
            return;
        }
        let e = self.terms.entry(b.to_vec()).or_insert(C64::zero());
        *e += c;
        if *e == C64::zero() {
            self.terms.remove(b);
        }
    }

    pub fn coeff(&self, b: &[i64]) -> C64 {
        self.terms.get(b).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = LaurentPoly::zero();
        for (b, v) in &self.terms {
            out.add_term(b, v * c);
        }
        out
    }

    pub fn mul_monomial(&self, a: &[i64], c: C64) -> Self {
        let mut out = LaurentPoly::zero();
        for (b, v) in &self.terms {
            let s: Weight = b.iter().zip(a).map(|(x, y)| x + y).collect();
            out.add_term(&s, v * c);
        }
        out
    }

    /// Drop coefficients below `tol · max|c|`.
    pub fn prune(&self, tol: f64) -> Self {
        let m = self.norm_inf();
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.norm() > tol * m)
                .map(|(b, v)| (b.clone(), *v))
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Constant term.
    pub fn ct(&self) -> C64 {
        self.terms
            .iter()
            .find(|(b, _)| b.iter().all(|&x| x == 0))
            .map(|(_, v)| *v)
            .unwrap_or_default()
    }

    pub fn eval(&self, rd: &RootDatum, ps: &ParamSet, xi: &SpectralPoint) -> C64 {
        self.terms.iter().map(|(b, c)| c * xi.monomial(rd, ps, b)).sum()
    }

    /// `ŵ(X_a) = q^{−(wa, b)} X_{wa}`, extended linearly.
    pub fn weyl_act(&self, rd: &RootDatum, ps: &ParamSet, w: &ExtWeyl) -> Self {
        let mut out = LaurentPoly::zero();
        for (a, c) in &self.terms {
            let wa = w.w.apply(a);
            let e: Q = rd.pair(&wa, &w.b);
            out.add_term(&wa, c * ps.qpow_r(-qf(e)));
        }
        out
    }

    /// `f^ς`: `X_b ↦ X_{ς(b)}`.
    pub fn varsigma(&self, rd: &RootDatum) -> Self {
        let mut out = LaurentPoly::zero();
        for (a, c) in &self.terms {
            out.add_term(&rd.varsigma(a), *c);
        }
        out
    }

    /// Largest `|b_i|` over the support.
    pub fn degree(&self) -> i64 {
        self.terms.keys().flat_map(|b| b.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(b, c)| TermJson { exp: b.clone(), re: c.re, im: c.im })
            .collect();
        serde_json::to_value(v).expect("serializable")
    }

    pub fn from_json(rank: usize, s: &str) -> Result<Self> {
        let v: Vec<TermJson> =
            serde_json::from_str(s).map_err(|e| Error::Invalid(format!("Laurent JSON: {e}")))?;
        let mut p = LaurentPoly::zero();
        for t in v {
            if t.exp.len() != rank {
                return Err(Error::Invalid(format!(
                    "exponent {:?} has length {}, expected {rank}",
                    t.exp,
                    t.exp.len()
                )));
            }
            p.add_term(&t.exp, C64::new(t.re, t.im));
        }
        Ok(p)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b, *c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b, -*c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let s: Weight = a.iter().zip(b).map(|(u, v)| u + v).collect();
                out.add_term(&s, x * y);
            }
        }
        out
    }
}

/// Parse `"a+bi"`, `"a-bi"`, `"a"`, `"bi"`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not an exponent sign or leading
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        Ok(C64::new(re, im))
    } else {
        Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

/// Format as `"a+bi"`.
pub fn format_complex(z: C64) -> String {
    if !z.im.is_sign_negative() || z.im.is_nan() {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}
