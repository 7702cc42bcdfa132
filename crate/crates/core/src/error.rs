use thiserror::Error;

use crate::analytics::pcf::PcfError;

/// Errors produced by state construction, evolution and the closed forms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LzError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation too small: n_max = {n_max} leaves tail weight {tail:.3e} > {tolerance:.3e}")]
    TruncationTooSmall { n_max: usize, tail: f64, tolerance: f64 },

    #[error("Fock index {index} outside 0..={n_max}")]
    IndexOutOfRange { index: usize, n_max: usize },

    #[error("dimension mismatch: expected {expected} levels, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("step size underflow at t = {t}: h = {h:.3e}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("norm drift {drift:.3e} at t = {t} exceeds {limit:.1e}")]
    NormDrift { t: f64, drift: f64, limit: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Pcf(#[from] PcfError),
}

pub type Result<T> = std::result::Result<T, LzError>;
