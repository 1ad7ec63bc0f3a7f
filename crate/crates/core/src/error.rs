use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid qubit selection: {0}")]
    InvalidQubits(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed encoding: {0}")]
    Malformed(String),

    /// The requested instance is beyond the exhaustive-search limits of the
    /// algorithm that was asked for.
    #[error("capability limit exceeded: {0}")]
    Capability(String),

    /// The quantity is not defined for this input (e.g. sQCD of a k-separable state).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("no distinguisher registered for prefix {0}")]
    MissingPair(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
