use thiserror::Error;

/// Errors raised by state construction, channels and checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon number {n} is outside the truncated space of cutoff {cutoff}")]
    OutOfRange { n: usize, cutoff: usize },

    #[error("cutoff must be at least 1")]
    EmptySpace,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator trace {0} is not 1")]
    BadTrace(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("transmission {0} is outside [0, 1]")]
    NonPhysicalTransmission(f64),

    #[error("transmission T = 0 is a singular point of this expression")]
    SingularTransmission,

    #[error("purity {0:e} too small to normalise by")]
    PurityUnderflow(f64),

    #[error("order s = {0} is not supported here")]
    UnsupportedOrder(f64),

    #[error("quadrature accuracy: {0}")]
    Accuracy(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
