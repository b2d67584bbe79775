use thiserror::Error;

/// Errors raised by the numerical toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("density operator trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid wedge index: {0}")]
    InvalidWedge(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not an isometry on its declared domain (deviation {0:e})")]
    NotIsometry(f64),

    #[error("Kraus operators increase trace (excess {0:e})")]
    TraceIncreasing(f64),

    #[error("map is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("state leaks out of the antisymmetric subspace (weight {0:e})")]
    Leakage(f64),

    #[error("problem too large for dense simulation: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
