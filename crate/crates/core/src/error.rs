use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape {shape}: {reason}")]
    InvalidShape { shape: String, reason: String },

    #[error("unknown shape {0}")]
    UnknownShape(String),

    #[error("invalid board: {0}")]
    InvalidBoard(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("assignment has {actual} bits, model has {expected} variables")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("brute force limited to {limit} variables, got {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
