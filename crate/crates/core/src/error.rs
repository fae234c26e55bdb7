use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("box bounds inverted at index {index}: lo = {lo}, hi = {hi}")]
    InvalidBox { index: usize, lo: f64, hi: f64 },

    #[error("invalid t-sequence: {0}")]
    InvalidSequence(String),

    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("schedule horizon {available} is shorter than the requested {requested} iterations")]
    HorizonMismatch { available: usize, requested: usize },

    #[error("reference solver hit the cap of {iterations} iterations (residual {residual:e})")]
    IterationCap { iterations: usize, residual: f64 },

    #[error("subgradient membership check failed at coordinate {index}: {detail}")]
    SubgradientCheck { index: usize, detail: String },

    #[error("N = {n} is below the validity threshold {min} of {formula}")]
    BelowValidity { formula: &'static str, n: usize, min: usize },

    #[error("missing reference solution; run the reference solver first")]
    MissingReference,
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
