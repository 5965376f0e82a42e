//! Reduced irreducible root systems in the twisted normalization.
//!
//! Everything here is exact. Simple roots are entered in Bourbaki
//! ε-coordinates, the bilinear form is rescaled so that short roots have
//! squared length 2, and from then on all data lives in the α- and
//! ω-bases. Weights are integer vectors in the ω-basis.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

pub type Q = Rational64;

/// Cartan family label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            other => Err(Error::Unsupported(format!("root system family {other:?}"))),
        }
    }
}

/// A weight `b = Σ b_i ω_i`, stored by its ω-coordinates.
pub type Weight = Vec<i64>;

/// One root of `R`, with its coordinates in the three bases we use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    /// coefficients in the simple roots
    pub alpha: Vec<i64>,
    /// coordinates `(α, α_i^∨)` in the ω-basis
    pub omega: Vec<i64>,
    /// coefficients of `α^∨` in the simple coroots
    pub coroot: Vec<i64>,
    /// `ν_α = (α,α)/2`
    pub nu: i64,
    pub height: i64,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        self.height > 0
    }
}

/// An integer matrix acting on ω-coordinates: `out[r] = Σ_c m[r][c] b[c]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WMat {
    pub n: usize,
    pub m: Vec<i64>,
}

impl WMat {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        WMat { n, m }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> i64 {
        self.m[r * self.n + c]
    }

    pub fn apply(&self, b: &[i64]) -> Weight {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.at(r, c) * b[c]).sum())
            .collect()
    }

    pub fn apply_f(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| x[c] * self.at(r, c) as f64).sum())
            .collect()
    }

    pub fn apply_q(&self, x: &[Q]) -> Vec<Q> {
        (0..self.n)
            .map(|r| {
                (0..self.n).fold(Q::zero(), |acc, c| acc + x[c] * Q::from_integer(self.at(r, c)))
            })
            .collect()
    }

    /// Matrix product `self ∘ other`.
    pub fn compose(&self, other: &WMat) -> WMat {
        let n = self.n;
        let mut m = vec![0; n * n];
        for r in 0..n {
            for c in 0..n {
                m[r * n + c] = (0..n).map(|k| self.at(r, k) * other.at(k, c)).sum();
            }
        }
        WMat { n, m }
    }

    /// Inverse of a Weyl group element. These matrices have determinant ±1
    /// and are of finite order, so the inverse is a power.
    pub fn inverse(&self) -> WMat {
        let id = WMat::identity(self.n);
        let mut prev = id.clone();
        let mut cur = self.clone();
        while cur != id {
            prev = cur.clone();
            cur = cur.compose(self);
        }
        prev
    }

    pub fn is_identity(&self) -> bool {
        *self == WMat::identity(self.n)
    }
}

/// The root datum together with derived constants.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub family: Family,
    pub rank: usize,
    /// simple roots in ε-coordinates
    pub simple_eps: Vec<Vec<Q>>,
    /// the ε-form is `eps_scale · (dot product)`
    pub eps_scale: Q,
    /// `(α_i, α_j)`
    pub gram_alpha: Vec<Vec<Q>>,
    /// `A[i][j] = (α_i, α_j^∨)`; row i is `α_i` in the ω-basis
    pub cartan: Vec<Vec<i64>>,
    /// `ν_i` for the simple roots
    pub nu: Vec<i64>,
    pub nu_lng: i64,
    /// `(ω_i, ω_j)`
    pub gram_omega: Vec<Vec<Q>>,
    pub gram_omega_f: Vec<Vec<f64>>,
    /// all roots; the positive ones come first
    pub roots: Vec<Root>,
    pub n_pos: usize,
    index: HashMap<Weight, usize>,
    /// maximal short root
    pub vartheta: usize,
    /// maximal root
    pub theta: usize,
    /// `|R|/n`
    pub coxeter_number: i64,
    /// `(ρ^∨, θ) + 1`
    pub dual_coxeter: Q,
    /// `(ρ^∨, ϑ) + 1`, the bound for contour shifts
    pub h_vartheta: Q,
    /// least m with `(P,P) ⊂ (1/m)ℤ`
    pub m_tilde: i64,
    /// minuscule fundamental weights, as 0-based indices
    pub minuscule: Vec<usize>,
    /// a reduced word for `w_0` (0-based simple indices, rightmost applied first)
    pub w0_word: Vec<usize>,
    pub w0: WMat,
    /// `ς(ω_i) = ω_{sigma[i]}`
    pub sigma: Vec<usize>,
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn half(n: i64) -> Q {
    Q::new(n, 2)
}

fn unit(dim: usize, i: usize, c: Q) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = c;
    v
}

fn diff(dim: usize, i: usize, j: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = Q::one();
    v[j] = -Q::one();
    v
}

/// Inverse of a square rational matrix by Gauss-Jordan.
pub(crate) fn invert_q(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let prow = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(prow.iter()) {
                    *x -= f * *y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn simple_roots_eps(family: Family, n: usize) -> Result<(usize, Vec<Vec<Q>>, Q)> {
    let bad = || Err(Error::Unsupported(format!("root system {family}{n}")));
    Ok(match family {
        Family::A => {
            if n < 1 {
                return bad();
            }
            (n + 1, (0..n).map(|i| diff(n + 1, i, i + 1)).collect(), q(1))
        }
        Family::B => {
            if n < 2 {
                return bad();
            }
            let mut s: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            s.push(unit(n, n - 1, q(1)));
            (n, s, q(2))
        }
        Family::C => {
            if n < 2 {
                return bad();
            }
            let mut s: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            s.push(unit(n, n - 1, q(2)));
            (n, s, q(1))
        }
        Family::D => {
            if n < 4 {
                return bad();
            }
            let mut s: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            let mut last = vec![Q::zero(); n];
            last[n - 2] = q(1);
            last[n - 1] = q(1);
            s.push(last);
            (n, s, q(1))
        }
        Family::E => {
            if !(6..=8).contains(&n) {
                return bad();
            }
            let mut a1 = vec![half(-1); 8];
            a1[0] = half(1);
            a1[7] = half(1);
            let mut a2 = vec![Q::zero(); 8];
            a2[0] = q(1);
            a2[1] = q(1);
            let mut s = vec![a1, a2];
            for k in 3..=8 {
                // α_k = ε_{k-1} − ε_{k-2} (1-based ε)
                s.push(diff(8, k - 2, k - 3));
            }
            s.truncate(n);
            (8, s, q(1))
        }
        Family::F => {
            if n != 4 {
                return bad();
            }
            let s = vec![
                diff(4, 1, 2),
                diff(4, 2, 3),
                unit(4, 3, q(1)),
                vec![half(1), half(-1), half(-1), half(-1)],
            ];
            (4, s, q(2))
        }
        Family::G => {
            if n != 2 {
                return bad();
            }
            let s = vec![
                vec![q(1), q(-1), q(0)],
                vec![q(-2), q(1), q(1)],
            ];
            (3, s, q(1))
        }
    })
}

impl RootDatum {
    /// Build the datum for a supported `(family, rank)`.
    pub fn build(family: Family, rank: usize) -> Result<Self> {
        let n = rank;
        let (_dim, simple_eps, eps_scale) = simple_roots_eps(family, n)?;
        let dot = |a: &[Q], b: &[Q]| -> Q {
            a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + *x * *y) * eps_scale
        };
        let gram_alpha: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&simple_eps[i], &simple_eps[j])).collect())
            .collect();
        let nu: Vec<i64> = (0..n)
            .map(|i| (gram_alpha[i][i] / q(2)).to_integer())
            .collect();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = q(2) * gram_alpha[i][j] / gram_alpha[j][j];
                        debug_assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        let nu_lng = *nu.iter().max().unwrap();

        // (ω_i, α_j) = ν_j δ_ij, so G_ω = D_ν (A^T)^{-1}
        let at: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| q(cartan[j][i])).collect())
            .collect();
        let at_inv = invert_q(&at).ok_or_else(|| Error::Internal("singular Cartan matrix".into()))?;
        let gram_omega: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| q(nu[i]) * at_inv[i][j]).collect())
            .collect();
        let gram_omega_f = gram_omega
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect())
            .collect();

        // roots: W-orbit of the simple roots, in α-coordinates
        let omega_of = |c: &[i64]| -> Vec<i64> {
            (0..n).map(|j| (0..n).map(|i| c[i] * cartan[i][j]).sum()).collect()
        };
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut stack: Vec<Vec<i64>> = Vec::new();
        for i in 0..n {
            let mut c = vec![0; n];
            c[i] = 1;
            seen.insert(c.clone(), ());
            stack.push(c);
        }
        while let Some(c) = stack.pop() {
            let om = omega_of(&c);
            for i in 0..n {
                let mut d = c.clone();
                d[i] -= om[i];
                if !seen.contains_key(&d) {
                    seen.insert(d.clone(), ());
                    stack.push(d);
                }
            }
        }
        let mut alist: Vec<Vec<i64>> = seen.into_keys().collect();
        // positive first, by height then lexicographically; negatives mirror positives
        alist.retain(|c| c.iter().all(|&x| x >= 0));
        alist.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let n_pos = alist.len();
        let negs: Vec<Vec<i64>> = alist.iter().map(|c| c.iter().map(|x| -x).collect()).collect();
        alist.extend(negs);
        let roots: Vec<Root> = alist
            .iter()
            .map(|c| {
                let mut len = Q::zero();
                for i in 0..n {
                    for j in 0..n {
                        len += q(c[i] * c[j]) * gram_alpha[i][j];
                    }
                }
                let nu_a = (len / q(2)).to_integer();
                let coroot = (0..n).map(|i| c[i] * nu[i] / nu_a).collect();
                Root {
                    alpha: c.clone(),
                    omega: omega_of(c),
                    coroot,
                    nu: nu_a,
                    height: c.iter().sum(),
                }
            })
            .collect();
        let index: HashMap<Weight, usize> =
            roots.iter().enumerate().map(|(i, r)| (r.omega.clone(), i)).collect();

        let theta = (0..n_pos).max_by_key(|&i| roots[i].height).unwrap();
        let vartheta = (0..n_pos)
            .filter(|&i| roots[i].nu == 1)
            .max_by_key(|&i| roots[i].height)
            .unwrap();

        let mut rd = RootDatum {
            family,
            rank: n,
            simple_eps,
            eps_scale,
            gram_alpha,
            cartan,
            nu,
            nu_lng,
            gram_omega,
            gram_omega_f,
            roots,
            n_pos,
            index,
            vartheta,
            theta,
            coxeter_number: 0,
            dual_coxeter: Q::zero(),
            h_vartheta: Q::zero(),
            m_tilde: 1,
            minuscule: vec![],
            w0_word: vec![],
            w0: WMat::identity(n),
            sigma: (0..n).collect(),
        };
        rd.coxeter_number = (2 * n_pos / n) as i64;
        let rv = rd.rho_vee();
        rd.dual_coxeter = rd.pair_q(&rv, &rd.root_q(theta)) + Q::one();
        rd.h_vartheta = rd.pair_q(&rv, &rd.root_q(vartheta)) + Q::one();
        rd.m_tilde = rd
            .gram_omega
            .iter()
            .flatten()
            .fold(1i64, |acc, x| num_integer_lcm(acc, *x.denom()));
        rd.minuscule = (0..n)
            .filter(|&r| {
                let w = rd.fundamental(r);
                (0..n_pos).all(|a| rd.coroot_pair(a, &w) <= 1)
            })
            .collect();
        let rho = vec![1i64; n];
        let (_, word) = rd.to_antidominant(&rho);
        rd.w0 = rd.word_matrix(&word);
        rd.w0_word = word;
        rd.sigma = (0..n)
            .map(|i| {
                let img = rd.w0.apply(&rd.fundamental(i));
                (0..n).find(|&j| img[j] == -1).unwrap()
            })
            .collect();
        Ok(rd)
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn fundamental(&self, i: usize) -> Weight {
        let mut w = vec![0; self.rank];
        w[i] = 1;
        w
    }

    pub fn zero_weight(&self) -> Weight {
        vec![0; self.rank]
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.roots[i]
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.n_pos]
    }

    /// Index of a root given by its ω-coordinates.
    pub fn root_index(&self, omega: &[i64]) -> Option<usize> {
        self.index.get(omega).copied()
    }

    /// Index of the negative of root `i`.
    pub fn neg(&self, i: usize) -> usize {
        if i < self.n_pos {
            i + self.n_pos
        } else {
            i - self.n_pos
        }
    }

    /// Index of the simple root α_i (0-based).
    pub fn simple(&self, i: usize) -> usize {
        self.index[&self.cartan[i]]
    }

    pub fn root_q(&self, i: usize) -> Vec<Q> {
        self.roots[i].omega.iter().map(|&x| q(x)).collect()
    }

    /// `(α^∨, b)` for root index `a`.
    pub fn coroot_pair(&self, a: usize, b: &[i64]) -> i64 {
        self.roots[a].coroot.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// `(a, b)` for weights.
    pub fn pair(&self, a: &[i64], b: &[i64]) -> Q {
        let mut s = Q::zero();
        for i in 0..self.rank {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                if b[j] != 0 {
                    s += self.gram_omega[i][j] * q(a[i] * b[j]);
                }
            }
        }
        s
    }

    pub fn pair_q(&self, a: &[Q], b: &[Q]) -> Q {
        let mut s = Q::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += self.gram_omega[i][j] * a[i] * b[j];
            }
        }
        s
    }

    /// `(a, ξ)` for an integer weight and a complex point in ω-coordinates.
    pub fn pair_c(&self, a: &[i64], xi: &[Complex64]) -> Complex64 {
        let mut s = Complex64::zero();
        for i in 0..self.rank {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                s += xi[j] * (self.gram_omega_f[i][j] * a[i] as f64);
            }
        }
        s
    }

    /// `(α_i, ξ)` for root index `a`, using `(α_i, ξ) = ν_i ξ_i` in ω-coordinates.
    pub fn root_pair_c(&self, a: usize, xi: &[Complex64]) -> Complex64 {
        let r = &self.roots[a];
        let mut s = Complex64::zero();
        for i in 0..self.rank {
            if r.alpha[i] != 0 {
                s += xi[i] * ((r.alpha[i] * self.nu[i]) as f64);
            }
        }
        s
    }

    /// `s_i(b) = b − (b, α_i^∨) α_i`.
    pub fn reflect(&self, i: usize, b: &[i64]) -> Weight {
        let bi = b[i];
        b.iter()
            .zip(&self.cartan[i])
            .map(|(x, a)| x - bi * a)
            .collect()
    }

    pub fn reflection_matrix(&self, i: usize) -> WMat {
        let n = self.rank;
        let mut m = WMat::identity(n);
        for r in 0..n {
            m.m[r * n + i] -= self.cartan[i][r];
        }
        m
    }

    /// Matrix of `s_{w[0]} s_{w[1]} ⋯` (rightmost factor acts first).
    pub fn word_matrix(&self, word: &[usize]) -> WMat {
        let mut m = WMat::identity(self.rank);
        for &i in word {
            m = m.compose(&self.reflection_matrix(i));
        }
        m
    }

    /// Reflection in an arbitrary root.
    pub fn root_reflection_matrix(&self, a: usize) -> WMat {
        let n = self.rank;
        let mut m = WMat::identity(n);
        let om = &self.roots[a].omega;
        let co = &self.roots[a].coroot;
        for r in 0..n {
            for c in 0..n {
                m.m[r * n + c] -= om[r] * co[c];
            }
        }
        m
    }

    /// Antidominant representative `u(b) ∈ P_−` and the word of minimal `u`
    /// (as a left-to-right product, `u = s_{w[0]} ⋯ s_{w[k-1]}`).
    pub fn to_antidominant(&self, b: &[i64]) -> (Weight, Vec<usize>) {
        let mut v = b.to_vec();
        let mut applied = Vec::new();
        while let Some(i) = (0..self.rank).find(|&i| v[i] > 0) {
            v = self.reflect(i, &v);
            applied.push(i);
        }
        applied.reverse();
        (v, applied)
    }

    /// Dominant representative `b_+`.
    pub fn to_dominant(&self, b: &[i64]) -> Weight {
        let mut v = b.to_vec();
        while let Some(i) = (0..self.rank).find(|&i| v[i] < 0) {
            v = self.reflect(i, &v);
        }
        v
    }

    pub fn is_dominant(&self, b: &[i64]) -> bool {
        b.iter().all(|&x| x >= 0)
    }

    /// `ρ^∨ = Σ ω_i / ν_i` in ω-coordinates.
    pub fn rho_vee(&self) -> Vec<Q> {
        self.nu.iter().map(|&v| Q::new(1, v)).collect()
    }

    pub fn rho(&self) -> Weight {
        vec![1; self.rank]
    }

    pub fn rho_sht(&self) -> Weight {
        self.nu.iter().map(|&v| i64::from(v == 1)).collect()
    }

    pub fn rho_lng(&self) -> Weight {
        self.nu
            .iter()
            .map(|&v| i64::from(v == self.nu_lng && self.nu_lng > 1))
            .collect()
    }

    /// `ρ_k = Σ k_{ν_i} ω_i` in ω-coordinates.
    pub fn rho_k(&self, k_sht: Complex64, k_lng: Complex64) -> Vec<Complex64> {
        self.nu
            .iter()
            .map(|&v| if v == 1 { k_sht } else { k_lng })
            .collect()
    }

    /// `ϑ = Σ n_i α_i` coefficients.
    pub fn vartheta_alpha(&self) -> &[i64] {
        &self.roots[self.vartheta].alpha
    }

    /// `ς(b) = −w_0(b)`.
    pub fn varsigma(&self, b: &[i64]) -> Weight {
        let mut out = vec![0; self.rank];
        for i in 0..self.rank {
            out[self.sigma[i]] = b[i];
        }
        out
    }

    /// `(b, b)/2` exactly.
    pub fn half_norm(&self, b: &[i64]) -> Q {
        self.pair(b, b) / q(2)
    }

    /// Serializable summary for CLI output.
    pub fn to_json(&self) -> serde_json::Value {
        let rs = |x: &Q| x.to_string();
        let alpha_name = |c: &[i64]| -> String {
            let mut parts = Vec::new();
            for (i, &m) in c.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let lead = if m == 1 {
                    String::new()
                } else if m == -1 {
                    "-".into()
                } else {
                    m.to_string()
                };
                parts.push(format!("{lead}a{}", i + 1));
            }
            parts.join("+").replace("+-", "-")
        };
        json!({
            "family": self.family.to_string(),
            "rank": self.rank,
            "cartan": self.cartan,
            "nu": self.nu,
            "nu_lng": self.nu_lng,
            "gram_omega": self.gram_omega.iter().map(|r| r.iter().map(rs).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "positive_roots": self.positive_roots().iter().map(|r| json!({
                "alpha": r.alpha, "omega": r.omega, "nu": r.nu, "name": alpha_name(&r.alpha)
            })).collect::<Vec<_>>(),
            "vartheta": alpha_name(&self.roots[self.vartheta].alpha),
            "theta": alpha_name(&self.roots[self.theta].alpha),
            "coxeter_number": self.coxeter_number,
            "dual_coxeter_theta": rs(&self.dual_coxeter),
            "h_vartheta": rs(&self.h_vartheta),
            "m_tilde": self.m_tilde,
            "minuscule": self.minuscule.iter().map(|r| format!("w{}", r + 1)).collect::<Vec<_>>(),
            "w0_word": self.w0_word.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "varsigma": self.sigma.iter().map(|i| i + 1).collect::<Vec<_>>(),
        })
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    (a / gcd(a, b) * b).abs()
}

/// Rational to f64.
pub fn qf(x: Q) -> f64 {
    x.to_f64().unwrap()
}

/// `|x|` for a rational.
pub fn qabs(x: Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_small() -> Vec<RootDatum> {
        let mut v = Vec::new();
        for (f, ns) in [
            (Family::A, vec![1, 2, 3, 4]),
            (Family::B, vec![2, 3, 4]),
            (Family::C, vec![2, 3, 4]),
            (Family::D, vec![4, 5]),
            (Family::E, vec![6, 7, 8]),
            (Family::F, vec![4]),
            (Family::G, vec![2]),
        ] {
            for n in ns {
                v.push(RootDatum::build(f, n).unwrap());
            }
        }
        v
    }

    #[test]
    fn a2_constants() {
        let rd = RootDatum::build(Family::A, 2).unwrap();
        assert_eq!(rd.roots[rd.vartheta].alpha, vec![1, 1]);
        assert_eq!(rd.vartheta, rd.theta);
        assert_eq!(rd.dual_coxeter, q(3));
        assert_eq!(rd.m_tilde, 3);
        let pos: Vec<_> = rd.positive_roots().iter().map(|r| r.alpha.clone()).collect();
        assert_eq!(pos, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(rd.sigma, vec![1, 0]);
    }

    #[test]
    fn b_series_minuscule_and_vartheta() {
        let rd = RootDatum::build(Family::B, 3).unwrap();
        assert_eq!(rd.vartheta_alpha(), &[1, 1, 1]);
        assert_eq!(rd.minuscule, vec![2]);
        assert_eq!(rd.nu, vec![2, 2, 1]);
        let b2 = RootDatum::build(Family::B, 2).unwrap();
        let pos: Vec<_> = b2.positive_roots().iter().map(|r| r.alpha.clone()).collect();
        assert_eq!(pos, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn g2_counts() {
        let rd = RootDatum::build(Family::G, 2).unwrap();
        assert_eq!(rd.n_pos, 6);
        assert_eq!(rd.positive_roots().iter().filter(|r| r.nu == 1).count(), 3);
        assert_eq!(rd.nu_lng, 3);
    }

    #[test]
    fn positive_root_counts() {
        let expected = [
            ("A1", 1), ("A2", 3), ("A3", 6), ("A4", 10), ("B2", 4), ("B3", 9), ("B4", 16),
            ("C2", 4), ("C3", 9), ("C4", 16), ("D4", 12), ("D5", 20), ("E6", 36), ("E7", 63),
            ("E8", 120), ("F4", 24), ("G2", 6),
        ];
        let all = all_small();
        for (name, cnt) in expected {
            let rd = all.iter().find(|r| r.label() == name).unwrap();
            assert_eq!(rd.n_pos, cnt, "{name}");
        }
    }

    #[test]
    fn minuscule_sets() {
        let m = |f, n| RootDatum::build(f, n).unwrap().minuscule;
        assert_eq!(m(Family::A, 3), vec![0, 1, 2]);
        assert_eq!(m(Family::C, 3), vec![0]);
        assert_eq!(m(Family::D, 4), vec![0, 2, 3]);
        assert_eq!(m(Family::E, 6), vec![0, 5]);
        assert!(m(Family::E, 7).len() == 1);
        assert!(m(Family::E, 8).is_empty());
        assert!(m(Family::F, 4).is_empty());
        assert!(m(Family::G, 2).is_empty());
    }

    #[test]
    fn invariants_all_types() {
        for rd in all_small() {
            let n = rd.rank;
            // (ω_i, α_j^∨) = δ_ij
            for i in 0..n {
                for j in 0..n {
                    let aj = rd.simple(j);
                    assert_eq!(rd.coroot_pair(aj, &rd.fundamental(i)), i64::from(i == j));
                }
            }
            // short roots have length 2
            for r in &rd.roots {
                assert!(r.nu == 1 || r.nu == rd.nu_lng);
                assert_eq!(rd.pair(&r.omega, &r.omega), q(2 * r.nu));
            }
            // (ρ_ν, α_i^∨)
            let rs = rd.rho_sht();
            let rl = rd.rho_lng();
            for i in 0..n {
                let ai = rd.simple(i);
                assert_eq!(rd.coroot_pair(ai, &rs), i64::from(rd.nu[i] == 1));
                if rd.nu_lng > 1 {
                    assert_eq!(rd.coroot_pair(ai, &rl), i64::from(rd.nu[i] == rd.nu_lng));
                }
            }
            // ς is an involution, identity iff −1 ∈ W
            for i in 0..n {
                assert_eq!(rd.sigma[rd.sigma[i]], i);
            }
            let minus_one = rd.w0.m.iter().enumerate().all(|(k, &x)| {
                x == if k % (n + 1) == 0 { -1 } else { 0 }
            });
            assert_eq!(minus_one, rd.sigma.iter().enumerate().all(|(i, &s)| i == s), "{}", rd.label());
            // the minuscule criterion via ϑ: ν_r n_r = 1
            for r in 0..n {
                let crit = rd.nu[r] * rd.vartheta_alpha()[r] == 1;
                assert_eq!(crit, rd.minuscule.contains(&r), "{} r={r}", rd.label());
            }
            // ϑ^∨ is the maximal coroot
            let vt = &rd.roots[rd.vartheta];
            let hv: i64 = vt.coroot.iter().sum();
            for r in rd.positive_roots() {
                assert!(r.coroot.iter().sum::<i64>() <= hv);
            }
            assert_eq!(rd.w0_word.len(), rd.n_pos);
        }
    }

    #[test]
    fn lattice_index() {
        let m = |f, n| RootDatum::build(f, n).unwrap().m_tilde;
        assert_eq!(m(Family::A, 1), 2);
        assert_eq!(m(Family::D, 4), 2);
        assert_eq!(m(Family::B, 2), 1);
        assert_eq!(m(Family::C, 3), 1);
        assert_eq!(m(Family::E, 6), 3);
    }

    #[test]
    fn unsupported() {
        assert!(RootDatum::build(Family::D, 3).is_err());
        assert!(RootDatum::build(Family::G, 3).is_err());
        assert!(RootDatum::build(Family::E, 9).is_err());
    }

    #[test]
    fn rho_k_b2() {
        let rd = RootDatum::build(Family::B, 2).unwrap();
        let ks = Complex64::new(0.3, 0.0);
        let kl = Complex64::new(-0.7, 0.0);
        assert_eq!(rd.rho_k(ks, kl), vec![kl, ks]);
    }
}
