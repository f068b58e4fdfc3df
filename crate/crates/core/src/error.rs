use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("normal {0} is the zero covector")]
    ZeroNormal(usize),

    #[error("index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("operation requires k = {expected}, arrangement has k = {found}")]
    WrongRank { expected: usize, found: usize },

    #[error("expected a subset of size {expected}, got {found}")]
    WrongSubsetSize { expected: usize, found: usize },

    #[error("arrangement is not generic")]
    NotGeneric,

    #[error("arrangement is not essential")]
    NotEssential,

    #[error("{0} is not a circuit of the arrangement")]
    NotACircuit(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid wheel labeling: {0}")]
    InvalidLabeling(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("retry budget of {budget} attempts exhausted: {context}")]
    RetryBudgetExhausted { budget: usize, context: String },

    #[error("search budget of {budget} states exceeded")]
    BudgetExceeded { budget: usize },

    #[error("desk-scale bounds exceeded: {0}")]
    BoundsExceeded(String),

    #[error("{0} is not a prime in (2^20, 2^62)")]
    BadModulus(u64),

    #[error("value {value} has no image modulo {modulus}")]
    NotReducible { value: String, modulus: u64 },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
