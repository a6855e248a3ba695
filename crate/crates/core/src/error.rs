use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate carpet: {0}")]
    DegenerateCarpet(String),
    #[error("bad probabilities: {0}")]
    BadProbabilities(String),
    #[error("duplicate digit ({i}, {j})")]
    DuplicateDigit { i: u32, j: u32 },
    #[error("digit ({i}, {j}) outside the {n}x{m} grid")]
    OutOfRangeDigit { i: u32, j: u32, n: u32, m: u32 },
    #[error("digit ({i}, {j}) is not in the digit set")]
    UnknownDigit { i: u32, j: u32 },
    #[error("config error: {0}")]
    Config(String),

    #[error("invalid sample count {0}")]
    InvalidCount(usize),
    #[error("word of depth 1 has no parent")]
    RootHasNoParent,
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("enumeration exceeded the node budget of {budget}")]
    BudgetExceeded { budget: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("no bracket: {0}")]
    NoBracket(String),
    #[error("no sign change: {0}")]
    NoSignChange(String),
    #[error("invalid r = {0}; use s0 for r = 0")]
    InvalidR(f64),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("operation requires the separation hypothesis")]
    SeparationRequired,

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("invalid codebook size k = {k} for a cloud of {atoms} atoms")]
    InvalidK { k: usize, atoms: usize },
    #[error("objective increased from {before} to {after}")]
    NonDecreaseDetected { before: f64, after: f64 },
    #[error("cloud too large: {0}")]
    CloudTooLarge(String),

    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
