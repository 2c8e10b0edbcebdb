use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A hyperbolic rotation met a non-positive pivot; the factor must be rebuilt.
    #[error("cholesky downdate failed at index {index}")]
    DowndateFailure { index: usize },

    /// Column replacement lost positive definiteness numerically.
    #[error("numerical breakdown while replacing column {position}")]
    NumericalBreakdown { position: usize },

    #[error("gradient estimate is zero but the search direction is not")]
    ZeroGradient,

    #[error("invalid denominator {0} in Wolfe constant bound (must be negative)")]
    InvalidDenominator(f64),

    #[error("non-finite input")]
    NonFinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset has no samples")]
    EmptyDataset,

    #[error("line {line}: malformed token {token:?}")]
    MalformedLine { line: usize, token: String },

    #[error("line {line}: feature indices must be strictly increasing")]
    NonIncreasingIndex { line: usize },

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
