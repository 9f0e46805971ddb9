use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable index {index} out of range 1..={n}")]
    VarOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("dimension {n} exceeds the configured limit {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("formula is not reduced (negation above a variable)")]
    NotReduced,
    #[error("covering matrix row {0} has no nonzero entry")]
    ZeroRow(usize),
    #[error("operation needs a nonempty set or polytope")]
    EmptyInput,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("format error on line {line}: {msg}")]
    Format { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
