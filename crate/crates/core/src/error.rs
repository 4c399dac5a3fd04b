//! Error type shared by every module of the crate.

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Errors raised while building models or running analyses.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve has zero length")]
    ZeroLength,
    #[error("polyline is not simple: segment {first} meets segment {second}")]
    SelfIntersection { first: usize, second: usize },
    #[error("parameter {t} lies outside [0, {length}]")]
    OutOfRange { t: f64, length: f64 },
    #[error("invalid measure at {path}: {reason}")]
    InvalidMeasure { path: String, reason: String },
    #[error("weight at {path} has infinite mass ({reason})")]
    InfiniteMass { path: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("Gram matrix is singular: degree {degree} polynomial has zero Sobolev norm")]
    GramSingular {
        degree: usize,
        /// Coefficients of the null polynomial in the monomial basis of z.
        null_polynomial: Vec<Complex64>,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn measure_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidMeasure { path: path.into(), reason: reason.into() }
}
