//! Affine root systems, the extended affine Weyl group, the polynomial
//! representation of the double affine Hecke algebra, nonsymmetric
//! Macdonald polynomials, the μ-measure and its residues, and numerical
//! trace formulas in ranks one and two.

pub mod error;
pub mod mumeasure;
pub mod polyrep;
pub mod qlaurent;
pub mod residual;
pub mod rootdata;
pub mod traceform;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qlaurent::{LaurentPoly, ParamSet, SpectralPoint};
pub use rootdata::{Family, RootDatum, Weight};
pub use weyl::{AffineRoot, ExtWeyl};
