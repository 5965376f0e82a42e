//! The extended affine Weyl group `Ŵ = W ⋉ P`.
//!
//! An element is a pair `(b, w)` acting on points by `x ↦ w(x) + b` and on
//! affine roots by `[α, ν_α j] ↦ [wα, ν_α (j − (wα^∨, b))]`. Affine nodes are
//! numbered `0..=n` with `0` the affine node `α_0 = [−ϑ, 1]`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_complex::Complex64;

use crate::rootdata::{RootDatum, WMat, Weight, Q};

/// The affine root `[α, ν_α j]`, with `α` given by its root index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineRoot {
    pub root: usize,
    pub j: i64,
}

impl AffineRoot {
    pub fn new(root: usize, j: i64) -> Self {
        AffineRoot { root, j }
    }

    pub fn is_positive(&self, rd: &RootDatum) -> bool {
        self.j > 0 || (self.j == 0 && rd.root(self.root).is_positive())
    }

    pub fn negate(&self, rd: &RootDatum) -> AffineRoot {
        AffineRoot { root: rd.neg(self.root), j: -self.j }
    }

    /// Simple affine root for node `i ∈ 0..=n`.
    pub fn simple(rd: &RootDatum, i: usize) -> AffineRoot {
        if i == 0 {
            AffineRoot { root: rd.neg(rd.vartheta), j: 1 }
        } else {
            AffineRoot { root: rd.simple(i - 1), j: 0 }
        }
    }

    /// `(α̃, ξ) = (α, ξ) + ν_α j`, so that `X_α̃(q^ξ) = q^{(α̃, ξ)}`.
    pub fn pair_c(&self, rd: &RootDatum, xi: &[Complex64]) -> Complex64 {
        rd.root_pair_c(self.root, xi) + (rd.root(self.root).nu * self.j) as f64
    }

    pub fn display(&self, rd: &RootDatum) -> String {
        let r = rd.root(self.root);
        format!("[{:?},{}]", r.alpha, r.nu * self.j)
    }
}

/// An element `(b, w)` of `Ŵ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtWeyl {
    pub b: Weight,
    pub w: WMat,
}

impl ExtWeyl {
    pub fn identity(n: usize) -> Self {
        ExtWeyl { b: vec![0; n], w: WMat::identity(n) }
    }

    pub fn translation(b: &[i64]) -> Self {
        ExtWeyl { b: b.to_vec(), w: WMat::identity(b.len()) }
    }

    pub fn finite(w: WMat) -> Self {
        ExtWeyl { b: vec![0; w.n], w }
    }

    /// The simple reflection for node `i ∈ 0..=n`; `s_0 = (ϑ, s_ϑ)`.
    pub fn s(rd: &RootDatum, i: usize) -> Self {
        if i == 0 {
            ExtWeyl {
                b: rd.root(rd.vartheta).omega.clone(),
                w: rd.root_reflection_matrix(rd.vartheta),
            }
        } else {
            ExtWeyl::finite(rd.reflection_matrix(i - 1))
        }
    }

    /// `π_r = (ω_r, u_r^{-1})` for a minuscule index `r` (0-based).
    pub fn pi(rd: &RootDatum, r: usize) -> Self {
        pi_u_decompose(rd, &rd.fundamental(r)).pi
    }

    pub fn is_identity(&self) -> bool {
        self.b.iter().all(|&x| x == 0) && self.w.is_identity()
    }

    /// Group law `(b,w)(b',w') = (b + w b', w w')`.
    pub fn mul(&self, other: &ExtWeyl) -> ExtWeyl {
        let wb = self.w.apply(&other.b);
        ExtWeyl {
            b: self.b.iter().zip(&wb).map(|(x, y)| x + y).collect(),
            w: self.w.compose(&other.w),
        }
    }

    pub fn inverse(&self) -> ExtWeyl {
        let wi = self.w.inverse();
        let b = wi.apply(&self.b).into_iter().map(|x| -x).collect();
        ExtWeyl { b, w: wi }
    }

    pub fn act_on_affine_root(&self, rd: &RootDatum, a: &AffineRoot) -> AffineRoot {
        let wa = self.w.apply(&rd.root(a.root).omega);
        let idx = rd.root_index(&wa).expect("W permutes roots");
        AffineRoot { root: idx, j: a.j - rd.coroot_pair(idx, &self.b) }
    }

    /// `ŵ((z)) = w(z) + b` for a point in ω-coordinates.
    pub fn act_on_point(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.w
            .apply_f(z)
            .into_iter()
            .zip(&self.b)
            .map(|(x, &b)| x + b as f64)
            .collect()
    }

    pub fn act_on_point_q(&self, z: &[Q]) -> Vec<Q> {
        self.w
            .apply_q(z)
            .into_iter()
            .zip(&self.b)
            .map(|(x, &b)| x + Q::from_integer(b))
            .collect()
    }

    /// The inversion set `Λ(ŵ) = {α̃ > 0 : ŵ(α̃) < 0}`.
    pub fn lambda_set(&self, rd: &RootDatum) -> Vec<AffineRoot> {
        let mut out = Vec::new();
        for a in 0..rd.roots.len() {
            let wa = self.w.apply(&rd.root(a).omega);
            let wi = rd.root_index(&wa).unwrap();
            let jj = rd.coroot_pair(wi, &self.b);
            let wneg = !rd.root(wi).is_positive();
            let jmin = if rd.root(a).is_positive() { 0 } else { 1 };
            let jmax = if wneg { jj } else { jj - 1 };
            for j in jmin..=jmax {
                out.push(AffineRoot { root: a, j });
            }
        }
        out.sort();
        out
    }

    pub fn length(&self, rd: &RootDatum) -> usize {
        let mut l = 0i64;
        for a in 0..rd.roots.len() {
            let wa = self.w.apply(&rd.root(a).omega);
            let wi = rd.root_index(&wa).unwrap();
            let jj = rd.coroot_pair(wi, &self.b);
            let wneg = !rd.root(wi).is_positive();
            let jmin = if rd.root(a).is_positive() { 0 } else { 1 };
            let jmax = if wneg { jj } else { jj - 1 };
            l += (jmax - jmin + 1).max(0);
        }
        l as usize
    }

    /// Lengths split by root length: `(l_sht, l_lng)`.
    pub fn length_by_nu(&self, rd: &RootDatum) -> (usize, usize) {
        let lam = self.lambda_set(rd);
        let s = lam.iter().filter(|a| rd.root(a.root).nu == 1).count();
        (s, lam.len() - s)
    }

    /// Greedy reduced decomposition `ŵ = π · s_{i_l} ⋯ s_{i_1}`. Returns `π`
    /// and the nodes `[i_1, …, i_l]` in order of application.
    pub fn reduced_word(&self, rd: &RootDatum) -> (ExtWeyl, Vec<usize>) {
        let mut cur = self.clone();
        let mut word = Vec::new();
        loop {
            let found = (0..=rd.rank).find(|&i| {
                !cur.act_on_affine_root(rd, &AffineRoot::simple(rd, i)).is_positive(rd)
            });
            match found {
                Some(i) => {
                    cur = cur.mul(&ExtWeyl::s(rd, i));
                    word.push(i);
                }
                None => return (cur, word),
            }
        }
    }

    /// Greedy reduced decomposition from the left: `ŵ = s_{j_1} ⋯ s_{j_l} π`,
    /// returned as `[j_1, …, j_l]` and `π`.
    pub fn reduced_word_left(&self, rd: &RootDatum) -> (Vec<usize>, ExtWeyl) {
        let (pi_inv, word) = self.inverse().reduced_word(rd);
        // ŵ^{-1} = π' s_{i_l} ⋯ s_{i_1}  ⇒  ŵ = s_{i_1} ⋯ s_{i_l} π'^{-1}
        (word, pi_inv.inverse())
    }

    /// Pretty form `"b | word"`.
    pub fn pretty(&self, rd: &RootDatum) -> String {
        let (pi, word) = self.reduced_word(rd);
        let w: Vec<String> = word.iter().rev().map(|i| format!("s{i}")).collect();
        format!("{:?} | pi{:?} {}", self.b, pi.b, w.join(" "))
    }
}

impl fmt::Display for ExtWeyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.b, self.w.m)
    }
}

/// `b = π_b u_b` with `u_b` of minimal length such that `u_b(b) ∈ P_−`.
#[derive(Clone, Debug)]
pub struct PiU {
    pub pi: ExtWeyl,
    pub u: WMat,
    /// left-to-right word of `u_b`
    pub u_word: Vec<usize>,
    pub b_minus: Weight,
}

pub fn pi_u_decompose(rd: &RootDatum, b: &[i64]) -> PiU {
    let (b_minus, u_word) = rd.to_antidominant(b);
    let u = rd.word_matrix(&u_word);
    let pi = ExtWeyl { b: b.to_vec(), w: u.inverse() };
    PiU { pi, u, u_word, b_minus }
}

/// `Λ′(π_b)`: the pairs `[α, ν_α j]`, `α > 0`, entering the closed form of
/// `μ(π_b)/μ(0)`.
pub fn lambda_prime_pi(rd: &RootDatum, b: &[i64]) -> Vec<AffineRoot> {
    let d = pi_u_decompose(rd, b);
    let uinv = d.u.inverse();
    let mut out = Vec::new();
    for a in 0..rd.n_pos {
        let top = -rd.coroot_pair(a, &d.b_minus);
        let img = uinv.apply(&rd.root(a).omega);
        let pos = rd.root(rd.root_index(&img).unwrap()).is_positive();
        let jmax = if pos { top } else { top - 1 };
        for j in 1..=jmax {
            out.push(AffineRoot { root: a, j });
        }
    }
    out
}

/// All elements of `Ŵ` of length `≤ max_len`, grouped by length.
/// Elements of length zero are the `π_r`, `r ∈ O`.
pub fn elements_by_length(rd: &RootDatum, max_len: usize) -> Vec<Vec<ExtWeyl>> {
    let n = rd.rank;
    let mut pis = vec![ExtWeyl::identity(n)];
    for &r in &rd.minuscule {
        pis.push(ExtWeyl::pi(rd, r));
    }
    let gens: Vec<ExtWeyl> = (0..=n).map(|i| ExtWeyl::s(rd, i)).collect();
    let mut levels = vec![pis];
    let mut seen: HashSet<ExtWeyl> = levels[0].iter().cloned().collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for x in levels.last().unwrap() {
            for (i, g) in gens.iter().enumerate() {
                let img = x.act_on_affine_root(rd, &AffineRoot::simple(rd, i));
                if img.is_positive(rd) {
                    let y = x.mul(g);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
        }
        next.sort();
        levels.push(next);
    }
    levels
}

/// All elements of the finite Weyl group with their lengths.
pub fn finite_weyl_group(rd: &RootDatum) -> Vec<(WMat, usize)> {
    let n = rd.rank;
    let gens: Vec<WMat> = (0..n).map(|i| rd.reflection_matrix(i)).collect();
    let mut seen: HashMap<WMat, usize> = HashMap::new();
    seen.insert(WMat::identity(n), 0);
    let mut frontier = vec![WMat::identity(n)];
    let mut len = 0;
    while !frontier.is_empty() {
        len += 1;
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.compose(g);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), len);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let mut v: Vec<(WMat, usize)> = seen.into_iter().collect();
    v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    v
}
