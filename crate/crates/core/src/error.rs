use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    #[error("operator is not Hermitian: entry ({row}, {col}) has no matching conjugate")]
    NotHermitian { row: usize, col: usize },

    #[error("expectation value has imaginary part {imag:e}; operator is not Hermitian")]
    ImaginaryExpectation { imag: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("non-finite value encountered during {0}")]
    NonFinite(&'static str),

    #[error("Krylov evolution did not converge (subspace {subspace}, step {step:e}, estimate {estimate:e})")]
    KrylovNonConvergence {
        subspace: usize,
        step: f64,
        estimate: f64,
    },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("cavity probabilities sum to {total}, expected 1")]
    ProbabilityNormalization { total: f64 },

    #[error("state has amplitude {weight:e} outside the zero-photon sector")]
    CavityNotEmpty { weight: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
