//! Independent check of `E_b`: build the matrix of a generic combination of
//! `Y_{ω_i}` on the smallest monomial span containing `X_b` that the `Y`s
//! preserve, and read `E_b` off as the null vector of `M − λ_b`.

use std::collections::BTreeSet;

use daha_core::polyrep::{apply_y, MacdonaldCache};
use daha_core::qlaurent::C64;
use daha_core::*;
use nalgebra::DMatrix;

fn y_span(rd: &RootDatum, ps: &ParamSet, b: &[i64]) -> Vec<Weight> {
    let mut seen: BTreeSet<Weight> = BTreeSet::new();
    let mut todo = vec![b.to_vec()];
    while let Some(c) = todo.pop() {
        if !seen.insert(c.clone()) {
            continue;
        }
        for i in 0..rd.rank {
            let img = apply_y(rd, ps, &rd.fundamental(i), &LaurentPoly::x(&c));
            for (m, v) in &img.terms {
                if v.norm() > 1e-13 && !seen.contains(m) {
                    todo.push(m.clone());
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Coefficients of the eigenvector with eigenvalue `lam`, normalized at `X_b`.
fn oracle(rd: &RootDatum, ps: &ParamSet, b: &[i64], weights: &[f64]) -> (Vec<Weight>, Vec<C64>, Vec<C64>) {
    let basis = y_span(rd, ps, b);
    let n = basis.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (col, c) in basis.iter().enumerate() {
        for (i, w) in weights.iter().enumerate() {
            let img = apply_y(rd, ps, &rd.fundamental(i), &LaurentPoly::x(c));
            for (row, d) in basis.iter().enumerate() {
                m[(row, col)] += img.coeff(d) * *w;
            }
        }
    }
    let eig: Vec<C64> = m.clone().schur().eigenvalues().expect("eigenvalues").iter().cloned().collect();
    // eigenvalue of E_b from the cache's spectral point
    let cache = MacdonaldCache::new(rd, ps);
    let e = cache.get(b).unwrap();
    let lam: C64 = (0..rd.rank)
        .map(|i| e.eigenvalue(rd, ps, &rd.fundamental(i)) * weights[i])
        .sum();
    let shifted = &m - DMatrix::<C64>::identity(n, n) * lam;
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.unwrap();
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let v: Vec<C64> = (0..n).map(|j| vt[(k, j)].conj()).collect();
    let lead = basis.iter().position(|w| w == b).unwrap();
    let v: Vec<C64> = v.iter().map(|x| x / v[lead]).collect();
    (basis, v, eig)
}

#[test]
fn eigen_oracle_matches_intertwiners() {
    let cases: Vec<(Family, usize, Vec<Vec<i64>>)> = vec![
        (Family::A, 1, vec![vec![2], vec![-2], vec![3], vec![-3]]),
        (Family::A, 2, vec![vec![1, 1], vec![-1, 2], vec![2, -1], vec![-2, 0]]),
        (Family::B, 2, vec![vec![1, 1], vec![-1, 1], vec![0, -2]]),
        (Family::C, 2, vec![vec![1, -1], vec![-1, 0]]),
        (Family::G, 2, vec![vec![1, 0], vec![-1, 1], vec![0, -1]]),
    ];
    let weights = [1.0, 0.618, 0.377, 0.21];
    for (fam, n, labels) in cases {
        let rd = RootDatum::build(fam, n).unwrap();
        let ps = ParamSet::with_k(0.45, C64::new(0.31, 0.07), C64::new(0.52, -0.04)).unwrap();
        let cache = MacdonaldCache::new(&rd, &ps);
        for b in labels {
            let (basis, v, eig) = oracle(&rd, &ps, &b, &weights[..n]);
            let e = cache.get(&b).unwrap();
            let err = basis
                .iter()
                .zip(&v)
                .map(|(w, x)| (e.poly.coeff(w) - x).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "{} b={b:?} err={err}", rd.label());
            // the spectrum is simple at generic parameters
            for i in 0..eig.len() {
                for j in 0..i {
                    assert!((eig[i] - eig[j]).norm() > 1e-9, "{} b={b:?} repeated eigenvalue", rd.label());
                }
            }
        }
    }
}

#[test]
fn frozen_a1_coefficients() {
    // A1, q = 1/2, t = 1/3, from the eigen oracle
    let rd = RootDatum::build(Family::A, 1).unwrap();
    let k = (1.0f64 / 3.0).ln() / 0.5f64.ln();
    let ps = ParamSet::new(0.5, C64::new(k, 0.0)).unwrap();
    let cache = MacdonaldCache::new(&rd, &ps);
    let (basis, v, _) = oracle(&rd, &ps, &[-2], &[1.0]);
    let e = cache.get(&[-2]).unwrap();
    for (w, x) in basis.iter().zip(&v) {
        assert!((e.poly.coeff(w) - x).norm() < 1e-10);
    }
    let frozen: [(i64, f64); 5] = FROZEN_EM2;
    for (m, c) in frozen {
        assert!((e.poly.coeff(&[m]) - c).norm() < 1e-12, "X^{m}: {}", e.poly.coeff(&[m]));
    }
}

// X^2 coefficient is (1−t)/(1−q²t) = 8/11
const FROZEN_EM2: [(i64, f64); 5] = [(-2, 1.0), (-1, 0.0), (0, 12.0 / 11.0), (1, 0.0), (2, 8.0 / 11.0)];
