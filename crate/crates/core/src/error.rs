//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data (non-finite coordinates, empty samples, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Disintegration was requested at a prefix that carries no mass.
    #[error("unsupported prefix: the measure has no mass at the given history")]
    UnsupportedPrefix,

    /// Exact enumeration was requested on a law that is too large.
    #[error("state space too large: {0}")]
    StateSpaceTooLarge(String),

    /// The transition matrix has no unique stationary distribution.
    #[error("reducible chain: no unique stationary distribution")]
    ReducibleChain,

    /// Two measures passed to a solver do not live on the same space.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
