//! `daha`: command-line access to the root data, Macdonald polynomials,
//! constant terms, residual points and the identity checks.

mod config;
mod run;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use daha_core::qlaurent::Precision;
use daha_core::{Error, Family};
use serde_json::{json, Value};

use config::{Command, CtMethod, Identity, RunConfig};

#[derive(Parser)]
#[command(name = "daha", version, about = "Macdonald polynomials, the μ-measure and its residues")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// root system family (A..G)
    #[arg(long = "type", default_value = "A")]
    family: Family,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    q: f64,
    /// `k_sht` as `a+bi`
    #[arg(long, default_value = "-0.37+0.11i", allow_hyphen_values = true)]
    k: String,
    /// defaults to `k`
    #[arg(long, allow_hyphen_values = true)]
    k_lng: Option<String>,
    #[arg(long, value_parser = parse_precision, default_value = "double")]
    precision: Precision,
    /// q-levels kept in infinite products
    #[arg(long, default_value_t = 60)]
    n_trunc: usize,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    match s {
        "double" => Ok(Precision::Double),
        "double-double" => Ok(Precision::DoubleDouble),
        _ => Err(format!("unknown precision {s:?}")),
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Root datum summary.
    Rootinfo(#[command(flatten)] Common),
    /// The nonsymmetric Macdonald polynomial `E_b`.
    Macdonald {
        #[command(flatten)]
        common: Common,
        /// ω-coordinates, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<i64>,
    },
    /// The constant term `ct(f μ)`.
    Ct {
        #[command(flatten)]
        common: Common,
        /// JSON list of `{"exp":[..],"re":..,"im":..}`
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value = "oracle")]
        method: CtMethod,
    },
    /// Pole families of the iterated residue algorithm.
    ResidualPoints {
        #[command(flatten)]
        common: Common,
        /// integration order, 1-based, comma separated
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long, default_value_t = 4)]
        mmax: i64,
        /// also write the lattice points `ξ•` as CSV
        #[arg(long)]
        csv: Option<String>,
    },
    /// Check one of the identities against the constant-term oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        identity: Identity,
        #[arg(long, default_value = "[]")]
        f: String,
        #[arg(long)]
        tol: Option<f64>,
        /// length cutoff for Jackson and Σ-sums
        #[arg(long, default_value_t = 400)]
        cutoff: usize,
        /// box radius for the norm formula
        #[arg(long, default_value_t = 1)]
        radius: i64,
        /// largest `l(ŵ)` in the affine symmetrizers
        #[arg(long, default_value_t = 40)]
        max_len: usize,
    },
    /// CSV data for the A2 sector and its line families.
    PlotData {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = ".")]
        out_dir: String,
        #[arg(long, default_value_t = 6)]
        radius: i64,
        #[arg(long, default_value_t = 4)]
        mmax: i64,
        /// strips `−ℓ−1/2 < Re k < −ℓ` up to this `ℓ`
        #[arg(long, default_value_t = 2)]
        ell: i64,
    },
    /// Re-run the configuration embedded in a report (or a bare config).
    Replay { path: String },
}

fn resolve(common: &Common, rank: usize, command: Command) -> RunConfig {
    RunConfig {
        family: common.family,
        rank: common.rank.unwrap_or(rank),
        q: common.q,
        k_sht: common.k.clone(),
        k_lng: common.k_lng.clone().unwrap_or_else(|| common.k.clone()),
        precision: common.precision,
        n_trunc: common.n_trunc,
        command,
    }
}

fn parse_json(s: &str) -> Result<Value, Error> {
    serde_json::from_str(s).map_err(|e| Error::Invalid(format!("function JSON: {e}")))
}

fn build(cmd: Cmd) -> Result<RunConfig, Error> {
    let cfg = match cmd {
        Cmd::Rootinfo(c) => resolve(&c, 1, Command::Rootinfo),
        Cmd::Macdonald { common, b } => {
            let rank = b.len().max(1);
            resolve(&common, rank, Command::Macdonald { b })
        }
        Cmd::Ct { common, f, method } => {
            let f = parse_json(&f)?;
            let rank = f.get(0).and_then(|t| t.get("exp")).and_then(|e| e.as_array()).map(|e| e.len()).unwrap_or(1);
            resolve(&common, rank, Command::Ct { f, method })
        }
        Cmd::ResidualPoints { common, order, mmax, csv } => {
            let rank = common.rank.or(order.as_ref().map(|o| o.len())).unwrap_or(2);
            let order = order.unwrap_or_else(|| (1..=rank).collect());
            resolve(&common, rank, Command::ResidualPoints { order, mmax, csv })
        }
        Cmd::Verify { common, identity, f, tol, cutoff, radius, max_len } => {
            let (fam, rank) = identity.default_datum();
            let mut common = common;
            if common.rank.is_none() {
                common.family = fam;
            }
            let tol = tol.unwrap_or(match identity {
                Identity::A1 | Identity::Jackson | Identity::NsymNorm => 1e-8,
                _ => 1e-6,
            });
            let mut f = parse_json(&f)?;
            if f.as_array().map(|a| a.is_empty()).unwrap_or(false) && identity != Identity::Noncompact {
                // default test function: 1
                f = json!([{ "exp": vec![0; common.rank.unwrap_or(rank)], "re": 1.0, "im": 0.0 }]);
            }
            resolve(&common, rank, Command::Verify { identity, f, tol, cutoff, radius, max_len })
        }
        Cmd::PlotData { common, out_dir, radius, mmax, ell } => {
            resolve(&common, 2, Command::PlotData { out_dir, radius, mmax, ell })
        }
        Cmd::Replay { path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
            let v = parse_json(&text)?;
            let cfg = v.get("config").cloned().unwrap_or(v);
            serde_json::from_value(cfg).map_err(|e| Error::Invalid(format!("config: {e}")))?
        }
    };
    cfg.normalize()
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedStrip(_) | Error::Unsupported(_) | Error::Cone(_) | Error::NonGeneric(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build(cli.cmd) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config = serde_json::to_value(&cfg).expect("config serializes");
    let (report, code) = match run::execute(&cfg) {
        Ok(out) => {
            let code = if out.pass == Some(false) { 2 } else { 0 };
            (json!({ "schema": 1, "config": config, "result": out.body }), code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let kind = format!("{e:?}");
            let kind = kind.split('(').next().unwrap_or("Error").to_string();
            (json!({ "schema": 1, "config": config, "error": { "kind": kind, "message": e.to_string() } }), exit_code(&e))
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(code)
}
