use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires a pure state")]
    MixedStateUnsupported,

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),

    #[error("variance {0:.3e} is negative beyond round-off")]
    NegativeVariance(f64),

    #[error("expected {expected} parameters, found {found}")]
    BadParameterCount { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
