use thiserror::Error;

/// Errors produced by the numerical kernels and the parallel-sum constructions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not Hermitian positive semidefinite: {0}")]
    NotPsd(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("functional is not representable: {0}")]
    NotRepresentable(String),

    #[error("algebra has no unit element")]
    MissingUnit,

    #[error("iteration did not converge after {sweeps} sweeps ({context})")]
    NoConvergence { context: String, sweeps: usize },

    #[error("route disagreement in {context}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    RouteDisagreement {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True when the error marks an ill-formed input object rather than a
    /// failure discovered during computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NotPsd(_)
                | Error::InvalidInput(_)
                | Error::NotRepresentable(_)
                | Error::MissingUnit
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
