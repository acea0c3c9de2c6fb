use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cyclotomic modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),

    #[error("invalid lens space: {0}")]
    InvalidLens(String),

    #[error("invalid Type I data: {0}")]
    InvalidTypeOne(String),

    #[error("group closure exceeded {limit} elements")]
    ClosureOverflow { limit: usize },

    /// A character sum that must be a rational integer (or divisible by the
    /// group order) was not. This always indicates an arithmetic bug.
    #[error("integrality check failed: {0}")]
    NotIntegral(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension table bound {have} is below the required {need}")]
    InsufficientBound { have: usize, need: usize },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0} is not an odd prime >= 5")]
    NotOddPrime(u64),

    #[error("invalid pair parameters: {0}")]
    InvalidPair(String),

    #[error("the eigenvalue 0 of the Kohn Laplacian has infinite multiplicity")]
    InfiniteMultiplicity,

    #[error("inconsistent certificates: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
