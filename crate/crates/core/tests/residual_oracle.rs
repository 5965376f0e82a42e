//! Pole families against the closed forms for `A_3`, the sector
//! description, the fundamental domain and closed subsystems.

use std::collections::{BTreeMap, BTreeSet};

use daha_core::qlaurent::C64;
use daha_core::residual::*;
use daha_core::rootdata::Q;
use daha_core::*;

type Closed = fn(i64, i64, i64) -> [(i64, i64); 3];

/// `(constant, k)` parts of `ᾱ_1, ᾱ_2, ᾱ_3` for the standard order.
fn standard_order_oracle() -> Vec<([usize; 3], Closed)> {
    vec![
        ([7, 10, 12], |a, b, c| [(1 + a, 1), (1 + b, 1), (1 + c, 1)]),
        ([7, 11, 2], |a, b, c| [(1 + a, 1), (-1 - a - c, -2), (2 + a + b + c, 3)]),
        ([8, 1, 12], |a, b, c| [(-b, -1), (1 + a + b, 2), (1 + c, 1)]),
        ([8, 11, 4], |a, b, c| [(1 + a + c, 2), (-c, -1), (1 + b + c, 2)]),
        ([9, 1, 4], |a, b, c| [(-b, -1), (-c, -1), (1 + a + b + c, 3)]),
        ([9, 10, 2], |a, b, c| [(-1 - b - c, -2), (1 + b, 1), (1 + a + c, 2)]),
    ]
}

/// `ξ•` for the order `(α_1, α_3, α_2)`, in the printed labelling where the
/// second and third parameters are exchanged.
fn swapped_order_oracle() -> Vec<([usize; 3], fn(i64, i64, i64) -> [i64; 3])> {
    vec![
        ([7, 11, 6], |a, b, c| [1 + a, 1 + b + c, -b]),
        ([7, 12, 10], |a, b, _c| [1 + a, 1 + b, 1 + _c]),
        ([8, 11, 3], |a, b, c| [-1 - b - c, 2 + a + b + c, -1 - a - b]),
        ([8, 12, 1], |a, b, c| [-b, 1 + a + b, 1 + c]),
        ([9, 1, 6], |a, b, c| [-c, 1 + a + b + c, -b]),
        ([9, 2, 10], |a, b, c| [-1 - b - c, 1 + b, 1 + a + c]),
    ]
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

#[test]
fn a3_standard_order_families() {
    let rd = RootDatum::build(Family::A, 3).unwrap();
    let fams = enumerate_pole_points(&rd, &[0, 1, 2], 2).unwrap();
    let oracle = standard_order_oracle();
    let got: Vec<Vec<usize>> = fams.iter().map(|f| f.labels.clone()).collect();
    let want: Vec<Vec<usize>> = oracle.iter().map(|(l, _)| l.to_vec()).collect();
    assert_eq!(got, want);
    for (f, (_, closed)) in fams.iter().zip(&oracle) {
        assert_eq!(f.points.len(), 27);
        for p in &f.points {
            let expect = closed(p.n[0], p.n[1], p.n[2]);
            for i in 0..3 {
                assert_eq!(p.xi_bullet[i], q(expect[i].0));
                assert_eq!(p.xi_k[i], (q(expect[i].1), Q::from_integer(0)));
            }
        }
        assert!(f.coeffs.iter().all(|c| *c == q(-1)), "{:?}", f.coeffs);
    }
}

#[test]
fn a3_other_order_families() {
    let rd = RootDatum::build(Family::A, 3).unwrap();
    let fams = enumerate_pole_points(&rd, &[0, 2, 1], 2).unwrap();
    let oracle = swapped_order_oracle();
    let got: Vec<Vec<usize>> = fams.iter().map(|f| f.labels.clone()).collect();
    let want: Vec<Vec<usize>> = oracle.iter().map(|(l, _)| l.to_vec()).collect();
    assert_eq!(got, want);
    for (f, (_, closed)) in fams.iter().zip(&oracle) {
        assert_eq!(f.points.len(), 27);
        for p in &f.points {
            let expect = closed(p.n[0], p.n[2], p.n[1]);
            let xb: Vec<Q> = expect.iter().map(|&x| q(x)).collect();
            assert_eq!(p.xi_bullet, xb);
        }
    }
}

fn enumerated(rd: &RootDatum, mmax: i64) -> BTreeMap<Weight, Vec<PolePoint>> {
    let order: Vec<usize> = (0..rd.rank).collect();
    let mut out: BTreeMap<Weight, Vec<PolePoint>> = BTreeMap::new();
    for f in enumerate_pole_points(rd, &order, mmax).unwrap() {
        for p in f.points {
            let b: Weight = p.xi_bullet.iter().map(|x| x.to_integer()).collect();
            out.entry(b).or_default().push(p);
        }
    }
    out
}

fn box_points(n: usize, r: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut b = vec![-r; n];
    loop {
        out.push(b.clone());
        let mut i = 0;
        while i < n {
            if b[i] < r {
                b[i] += 1;
                break;
            }
            b[i] = -r;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

#[test]
fn sector_matches_enumeration() {
    for n in [1, 2, 3] {
        let rd = RootDatum::build(Family::A, n).unwrap();
        let e = enumerated(&rd, 3);
        for (b, pts) in &e {
            assert_eq!(pts.len(), 1, "{b:?} appears twice");
            assert!(an_sector_contains(&rd, b).unwrap(), "{b:?}");
            let (_, kpart) = an_sector_point(&rd, b).unwrap();
            let got: Vec<i64> = pts[0].xi_k.iter().map(|p| p.0.to_integer()).collect();
            assert_eq!(got, kpart, "{b:?}");
        }
        for b in box_points(n, 3) {
            if an_sector_contains(&rd, &b).unwrap() {
                assert!(e.contains_key(&b), "{b:?} missing");
            }
        }
    }
}

#[test]
fn a2_sector_vertex() {
    let rd = RootDatum::build(Family::A, 2).unwrap();
    let e = enumerated(&rd, 4);
    assert!(e.contains_key(&vec![0, 1]));
    // every point lies in the cone over ω_2
    for b in e.keys() {
        assert!(b[1] > 0 && b[0] + b[1] > 0);
    }
}

#[test]
fn fundamental_domain() {
    let r = check_pi_fundamental_domain(2, 6).unwrap();
    assert!(r.ok(), "{:?}", r.violations);
    assert_eq!(r.checked, 13 * 13);
    let r = check_pi_fundamental_domain(3, 4).unwrap();
    assert!(r.ok(), "{:?}", r.violations);
    assert_eq!(r.checked, 9 * 9 * 9);
}

fn eps(rd: &RootDatum, a: usize) -> Vec<Q> {
    let r = rd.root(a);
    let mut v = vec![Q::from_integer(0); rd.simple_eps[0].len()];
    for (c, s) in r.alpha.iter().zip(&rd.simple_eps) {
        for (x, y) in v.iter_mut().zip(s) {
            *x += *y * Q::from_integer(*c);
        }
    }
    v
}

fn eps_set(rd: &RootDatum, w: &SubsystemWitness) -> BTreeSet<Vec<Q>> {
    w.roots.iter().map(|f| eps(rd, f.root)).collect()
}

fn eps_vec(x: &[i64]) -> Vec<Q> {
    x.iter().map(|&v| q(v)).collect()
}

#[test]
fn closed_subsystem_examples() {
    for n in 1..=4 {
        let rd = RootDatum::build(Family::A, n).unwrap();
        let s = closed_subsystems(&rd, false).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].roots.len(), rd.roots.len());
    }

    let c2 = RootDatum::build(Family::C, 2).unwrap();
    let want: BTreeSet<Vec<Q>> =
        [[2, 0], [-2, 0], [0, 2], [0, -2]].iter().map(|x| eps_vec(x)).collect();
    let s = closed_subsystems(&c2, false).unwrap();
    assert!(s.iter().any(|w| eps_set(&c2, w) == want && w.label() == "A1+A1"));

    let d4 = RootDatum::build(Family::D, 4).unwrap();
    let mut want = BTreeSet::new();
    for s1 in [1, -1] {
        for s2 in [1, -1] {
            want.insert(eps_vec(&[s1, s2, 0, 0]));
            want.insert(eps_vec(&[0, 0, s1, s2]));
        }
    }
    let s = closed_subsystems(&d4, false).unwrap();
    let hit = s.iter().find(|w| eps_set(&d4, w) == want).expect("A1^4 in D4");
    assert_eq!(hit.label(), "A1+A1+A1+A1");
    for w in &s {
        assert_eq!(w.rank, 4);
        assert_eq!(w.simple.len(), 4);
    }

    let a5 = RootDatum::build(Family::A, 5).unwrap();
    assert!(closed_subsystems(&a5, false).is_err());
}

#[test]
fn closed_subsystem_candidates_contain_rho_point() {
    let rd = RootDatum::build(Family::A, 2).unwrap();
    let ps = ParamSet::new(0.37, C64::new(-0.31, 0.07)).unwrap();
    let w = &closed_subsystems(&rd, false).unwrap()[0];
    let cands = w.candidate_points(&rd, &ps);
    assert_eq!(cands.len(), 4);
    let target = ps.minus_rho_k(&rd).xi;
    let hit = cands.iter().find(|c| c.xi.iter().zip(&target).all(|(a, b)| (a - b).norm() < 1e-12));
    let hit = hit.expect("−ρ_k among candidates");
    assert!(is_mu_residual(&rd, &ps, hit, 6).is_residual());
}

#[test]
fn residue_binomials_at_pi_b() {
    let a2 = RootDatum::build(Family::A, 2).unwrap();
    let ps = ParamSet::new(0.37, C64::new(-0.31, 0.07)).unwrap();
    for b in box_points(2, 2) {
        assert!(residue_binomials_match(&a2, &ps, &b, 8), "A2 {b:?}");
    }
    let b2 = RootDatum::build(Family::B, 2).unwrap();
    let ps = ParamSet::with_k(0.37, C64::new(-0.31, 0.07), C64::new(-0.23, 0.05)).unwrap();
    for b in box_points(2, 2) {
        assert!(residue_binomials_match(&b2, &ps, &b, 8), "B2 {b:?}");
    }
}
