use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration is not maximal: {0}")]
    NotMaximal(String),

    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: String, size: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("conditioning event has zero weight")]
    EmptyConditioning,

    #[error("corrupted payload block {block}: {msg}")]
    Corrupted { block: usize, msg: String },

    /// An internal construction that is guaranteed to succeed did not.
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
