//! Error type shared by all modules.

/// Failures raised by the library.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-generic parameters: {0}")]
    NonGeneric(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("outside the convergence cone: {0}")]
    Cone(String),
    #[error("unsupported strip: {0}")]
    UnsupportedStrip(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
