use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApspError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    /// The requested configuration cannot be served; the message names the fallback.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("malformed witness matrix: {0}")]
    MalformedWitness(String),

    #[error("malformed successor matrix: {0}")]
    MalformedSuccessor(String),

    #[error("no path from {from} to {to}")]
    NoPath { from: usize, to: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ApspError>;
