//! The resolved run configuration embedded in every report.

use daha_core::qlaurent::{format_complex, parse_complex, Precision};
use daha_core::{Family, ParamSet, RootDatum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    A1,
    A2,
    SigmaA2,
    NsymNorm,
    Symmetrizer,
    Noncompact,
    Jackson,
}

impl Identity {
    pub fn default_datum(self) -> (Family, usize) {
        match self {
            Identity::A2 | Identity::SigmaA2 => (Family::A, 2),
            _ => (Family::A, 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CtMethod {
    /// `E_0`-coefficient times the closed `ct(μ)`
    Oracle,
    /// torus quadrature on the unshifted contour
    Quadrature,
    /// the rank-one or rank-two pole decomposition
    Formula,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Rootinfo,
    Macdonald {
        b: Vec<i64>,
    },
    Ct {
        f: Value,
        method: CtMethod,
    },
    ResidualPoints {
        /// 1-based
        order: Vec<usize>,
        mmax: i64,
        csv: Option<String>,
    },
    Verify {
        identity: Identity,
        f: Value,
        tol: f64,
        cutoff: usize,
        radius: i64,
        max_len: usize,
    },
    PlotData {
        out_dir: String,
        radius: i64,
        mmax: i64,
        ell: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub family: Family,
    pub rank: usize,
    pub q: f64,
    pub k_sht: String,
    pub k_lng: String,
    pub precision: Precision,
    pub n_trunc: usize,
    pub command: Command,
}

impl RunConfig {
    pub fn root_datum(&self) -> daha_core::Result<RootDatum> {
        RootDatum::build(self.family, self.rank)
    }

    pub fn params(&self) -> daha_core::Result<ParamSet> {
        let mut ps = ParamSet::with_k(self.q, parse_complex(&self.k_sht)?, parse_complex(&self.k_lng)?)?;
        ps.precision = self.precision;
        ps.n_trunc = self.n_trunc;
        ps.check_precision()?;
        Ok(ps)
    }

    /// Canonical spelling of the k values, so that a replay parses the same bits.
    pub fn normalize(mut self) -> daha_core::Result<Self> {
        self.k_sht = format_complex(parse_complex(&self.k_sht)?);
        self.k_lng = format_complex(parse_complex(&self.k_lng)?);
        Ok(self)
    }
}
