use thiserror::Error;

/// Errors raised by the library.
///
/// The variants fall into three families that the command-line front end maps
/// onto distinct exit codes: malformed input, violated mathematical
/// preconditions, and exhausted oracle budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("operands belong to different rings")]
    RingMismatch,

    #[error("division by a zero divisor")]
    ZeroDivisor,

    #[error("element is not a square")]
    NotASquare,

    #[error("square root is not representable exactly in this ring")]
    NotRepresentable,

    #[error("quadratic form is degenerate")]
    Degenerate,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("graph has {vertices} vertices, above the cap of {cap}")]
    CapExceeded { vertices: u64, cap: u64 },

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
