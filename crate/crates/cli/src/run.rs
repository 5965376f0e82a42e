//! Dispatch of a resolved configuration to the library.

use std::fs;
use std::path::Path;

use anyhow::Context;
use daha_core::mumeasure::{ct_mu_closed, ct_mu_of, nsym_norm};
use daha_core::polyrep::{DiamondOp, MacdonaldCache};
use daha_core::qlaurent::{format_complex, C64};
use daha_core::residual::{an_sector_contains, an_sector_point, enumerate_pole_points};
use daha_core::traceform::{
    a1_ct_formula, a1_jackson_series, a2_ct_formula, a2_sigma, a2_strip, affine_symmetrizer_ratio,
    noncompact_adjoint_residual, noncompact_kernel, noncompact_multiplier, quad_ct_f_mu, A2Strip,
    QuadratureSpec,
};
use daha_core::{Error, LaurentPoly, ParamSet, RootDatum};
use serde_json::{json, Value};

use crate::config::{Command, CtMethod, Identity, RunConfig};

/// A report body and, for verifications, whether the check passed.
pub struct Outcome {
    pub body: Value,
    pub pass: Option<bool>,
}

fn cjson(z: C64) -> Value {
    json!(format_complex(z))
}

fn poly(rd: &RootDatum, f: &Value) -> daha_core::Result<LaurentPoly> {
    LaurentPoly::from_json(rd.rank, &f.to_string())
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, Error> {
    let rd = cfg.root_datum()?;
    match &cfg.command {
        Command::Rootinfo => Ok(Outcome { body: rd.to_json(), pass: None }),
        Command::Macdonald { b } => {
            let ps = cfg.params()?;
            if b.len() != rd.rank {
                return Err(Error::Invalid(format!("b has {} entries, rank is {}", b.len(), rd.rank)));
            }
            let e = MacdonaldCache::new(&rd, &ps).get(b)?;
            let eig: Vec<Value> = (0..rd.rank).map(|i| cjson(e.eigenvalue(&rd, &ps, &rd.fundamental(i)))).collect();
            Ok(Outcome {
                body: json!({
                    "b": b,
                    "terms": e.poly.to_json(),
                    "spherical_value": cjson(e.spherical_value),
                    "eigenvalues": eig,
                    "eigen_residual": e.eigen_residual(&rd, &ps),
                }),
                pass: None,
            })
        }
        Command::Ct { f, method } => {
            let ps = cfg.params()?;
            let f = poly(&rd, f)?;
            let v = match method {
                CtMethod::Oracle => ct_mu_of(&MacdonaldCache::new(&rd, &ps), &f)?,
                CtMethod::Quadrature => quad_ct_f_mu(&rd, &ps, &f, &QuadratureSpec::default())?.value,
                CtMethod::Formula => match rd.rank {
                    1 => a1_ct_formula(&rd, &ps, &f, &QuadratureSpec::default())?,
                    2 => a2_ct_formula(&rd, &ps, &f, &QuadratureSpec::default())?,
                    _ => return Err(Error::Unsupported("pole decompositions exist for A1 and A2".into())),
                },
            };
            Ok(Outcome { body: json!({ "ct": cjson(v) }), pass: None })
        }
        Command::ResidualPoints { order, mmax, csv } => {
            let order0: Vec<usize> = order.iter().map(|&i| i.wrapping_sub(1)).collect();
            let fams = enumerate_pole_points(&rd, &order0, *mmax)?;
            if let Some(path) = csv {
                let mut w = csv::Writer::from_path(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
                let mut head = vec!["family".to_string()];
                head.extend((1..=rd.rank).map(|i| format!("b{i}")));
                w.write_record(&head).map_err(|e| Error::Invalid(e.to_string()))?;
                for f in &fams {
                    let lab = f.labels.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-");
                    for p in &f.points {
                        let mut row = vec![lab.clone()];
                        row.extend(p.xi_bullet.iter().map(|x| x.to_string()));
                        w.write_record(&row).map_err(|e| Error::Invalid(e.to_string()))?;
                    }
                }
                w.flush().map_err(|e| Error::Invalid(e.to_string()))?;
            }
            Ok(Outcome {
                body: json!({
                    "count": fams.len(),
                    "families": fams.iter().map(|f| f.to_json(&rd)).collect::<Vec<_>>(),
                }),
                pass: None,
            })
        }
        Command::Verify { identity, f, tol, cutoff, radius, max_len } => {
            let ps = cfg.params()?;
            verify(&rd, &ps, *identity, f, *tol, *cutoff, *radius, *max_len)
        }
        Command::PlotData { out_dir, radius, mmax, ell } => {
            plot_data(&rd, out_dir, *radius, *mmax, *ell).map_err(|e| Error::Invalid(format!("{e:#}")))
        }
    }
}

fn check(lhs: C64, rhs: C64, tol: f64) -> (f64, bool) {
    let d = (lhs - rhs).norm();
    (d, d <= tol * (1.0 + rhs.norm()))
}

#[allow(clippy::too_many_arguments)]
fn verify(
    rd: &RootDatum,
    ps: &ParamSet,
    id: Identity,
    f: &Value,
    tol: f64,
    cutoff: usize,
    radius: i64,
    max_len: usize,
) -> Result<Outcome, Error> {
    let spec = QuadratureSpec::default();
    let cache = MacdonaldCache::new(rd, ps);
    let one_sided = |lhs: C64, rhs: C64, extra: Value| {
        let (delta, pass) = check(lhs, rhs, tol);
        Outcome {
            body: json!({ "lhs": cjson(lhs), "rhs": cjson(rhs), "delta": delta, "tol": tol, "pass": pass, "extra": extra }),
            pass: Some(pass),
        }
    };
    match id {
        Identity::A1 => {
            let f = poly(rd, f)?;
            Ok(one_sided(a1_ct_formula(rd, ps, &f, &spec)?, ct_mu_of(&cache, &f)?, Value::Null))
        }
        Identity::Jackson => {
            let f = poly(rd, f)?;
            Ok(one_sided(a1_jackson_series(rd, ps, &f, cutoff)?, ct_mu_of(&cache, &f)?, Value::Null))
        }
        Identity::A2 => {
            let f = poly(rd, f)?;
            let strip = match a2_strip(ps.k_sht.re)? {
                A2Strip::Positive => "positive".to_string(),
                A2Strip::Main(l) => format!("main({l})"),
                A2Strip::Second => "second".to_string(),
            };
            let lhs = a2_ct_formula(rd, ps, &f, &spec)?;
            let sym = a2_ct_formula(rd, ps, &f.varsigma(rd), &spec)?;
            let (dsym, psym) = check(sym, lhs, tol);
            let mut out = one_sided(lhs, ct_mu_of(&cache, &f)?, json!({ "strip": strip, "varsigma_delta": dsym }));
            out.pass = Some(out.pass == Some(true) && psym);
            out.body["pass"] = json!(out.pass);
            Ok(out)
        }
        Identity::SigmaA2 => {
            let f = poly(rd, f)?;
            Ok(one_sided(a2_sigma(rd, ps, &f, cutoff)?, ct_mu_of(&cache, &f)?, Value::Null))
        }
        Identity::NsymNorm => {
            let mut worst: f64 = 0.0;
            let mut worst_free: f64 = 0.0;
            let mut count = 0;
            let pts = lattice_box(rd.rank, radius);
            for b in &pts {
                for c in &pts {
                    let (l, r) = nsym_norm(&cache, b, c, true)?;
                    worst = worst.max((l - r).norm() / (1.0 + r.norm()));
                    let (l, r) = nsym_norm(&cache, b, c, false)?;
                    worst_free = worst_free.max((l - r).norm() / (1.0 + r.norm()));
                    count += 1;
                }
            }
            let pass = worst <= tol && worst_free <= tol;
            Ok(Outcome {
                body: json!({ "pairs": count, "delta": worst, "delta_without_varsigma": worst_free, "tol": tol, "pass": pass }),
                pass: Some(pass),
            })
        }
        Identity::Symmetrizer => {
            let f = poly(rd, f)?;
            let x: Vec<C64> = (0..rd.rank).map(|i| C64::new(0.137 + 0.05 * i as f64, 0.0412)).collect();
            let rep = affine_symmetrizer_ratio(rd, ps, &f, max_len, &x)?;
            let mut neg = ps.clone();
            neg.k_sht = -ps.k_sht;
            neg.k_lng = -ps.k_lng;
            let target = ct_mu_closed(rd, &neg)?.value;
            let extra = json!({ "p_hat": cjson(rep.p_hat), "i_hat": cjson(rep.i_hat), "cauchy": rep.cauchy });
            Ok(one_sided(rep.ratio, target, extra))
        }
        Identity::Noncompact => {
            let basis: Vec<LaurentPoly> = if f.as_array().map(|a| a.is_empty()).unwrap_or(true) {
                lattice_box(rd.rank, 1).iter().map(|b| LaurentPoly::x(b)).collect()
            } else {
                vec![poly(rd, f)?]
            };
            let mut worst: f64 = 0.0;
            let mut ops: Vec<DiamondOp> = (1..=rd.rank).map(DiamondOp::T).collect();
            ops.extend(rd.minuscule.iter().map(|&r| DiamondOp::Y(rd.fundamental(r))));
            for h in &ops {
                for a in &basis {
                    for g in lattice_box(rd.rank, 1).iter().map(|b| LaurentPoly::x(b)) {
                        worst = worst.max(noncompact_adjoint_residual(rd, ps, h, a, &g, 1, 1e-12)?);
                    }
                }
            }
            let mut mult: f64 = 0.0;
            for s in [-1.3, 0.4, 1.7] {
                let xi: Vec<f64> = (0..rd.rank).map(|i| s + 0.21 * i as f64).collect();
                for j in 0..rd.rank {
                    let y: Vec<f64> = xi.iter().zip(rd.fundamental(j)).map(|(a, w)| a + w as f64).collect();
                    let direct = noncompact_kernel(rd, ps, &y) / noncompact_kernel(rd, ps, &xi);
                    let closed = noncompact_multiplier(rd, ps, &xi, j)?;
                    mult = mult.max((direct - closed).norm() / (1.0 + closed.norm()));
                }
            }
            let pass = worst <= tol && mult <= 1e-9;
            Ok(Outcome {
                body: json!({ "adjoint_delta": worst, "multiplier_delta": mult, "tol": tol, "pass": pass }),
                pass: Some(pass),
            })
        }
    }
}

fn lattice_box(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// `sector.csv`: lattice points `b` with the sector flag and the `k`-part of
/// `π_b(−kρ)`. `arrows.csv`: line families of the rank-two enumeration
/// (`thick`, from each family with one parameter frozen) and the lines of the
/// one-dimensional residual integrals for strips up to `ℓ` (`thin`).
fn plot_data(rd: &RootDatum, out_dir: &str, radius: i64, mmax: i64, ell: i64) -> anyhow::Result<Outcome> {
    if rd.family != daha_core::Family::A || rd.rank != 2 {
        anyhow::bail!("plot-data is defined for A2");
    }
    let dir = Path::new(out_dir);
    fs::create_dir_all(dir).with_context(|| format!("creating {out_dir}"))?;
    let sector_path = dir.join("sector.csv");
    let mut w = csv::Writer::from_path(&sector_path)?;
    w.write_record(["b1", "b2", "in_sector", "k1", "k2"])?;
    let mut in_sector = 0;
    for b in lattice_box(2, radius) {
        let inside = an_sector_contains(rd, &b)?;
        in_sector += usize::from(inside);
        let (_, k) = an_sector_point(rd, &b)?;
        w.write_record([b[0].to_string(), b[1].to_string(), inside.to_string(), k[0].to_string(), k[1].to_string()])?;
    }
    w.flush()?;

    let arrows_path = dir.join("arrows.csv");
    let mut w = csv::Writer::from_path(&arrows_path)?;
    w.write_record(["kind", "family", "m", "start1", "start2", "dir1", "dir2"])?;
    let fams = enumerate_pole_points(rd, &[0, 1], mmax)?;
    for f in &fams {
        let lab = f.labels.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-");
        // direction in ω-coordinates as n_2 grows
        let dir: Vec<_> = f.alpha_values.iter().map(|v| v.n_coeff(1)).collect();
        for n1 in 0..=mmax {
            let start: Vec<_> = f.alpha_values.iter().map(|v| v.bullet_at(&[n1, 0])).collect();
            w.write_record([
                "thick".to_string(),
                lab.clone(),
                n1.to_string(),
                start[0].to_string(),
                start[1].to_string(),
                dir[0].to_string(),
                dir[1].to_string(),
            ])?;
        }
    }
    // ᾱ_1 = −k−m, ᾱ_2 = −k−m and ᾱ_1 + ᾱ_2 = −k−m at k → 0
    for m in 0..=ell {
        for (start, dir) in [([-m, 0], [0, 1]), ([0, -m], [1, 0]), ([-m, 0], [1, -1])] {
            w.write_record([
                "thin".to_string(),
                String::new(),
                m.to_string(),
                start[0].to_string(),
                start[1].to_string(),
                dir[0].to_string(),
                dir[1].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(Outcome {
        body: json!({
            "sector_csv": sector_path.display().to_string(),
            "arrows_csv": arrows_path.display().to_string(),
            "lattice_points": (2 * radius + 1).pow(2),
            "in_sector": in_sector,
            "families": fams.len(),
        }),
        pass: None,
    })
}
