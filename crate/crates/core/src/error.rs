use thiserror::Error;

/// Errors raised by the ranking library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} items, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("item {item} out of range for n = {n}")]
    ItemOutOfRange { item: usize, n: usize },

    #[error("expected two distinct items, got {0} twice")]
    SameItem(usize),

    #[error("k = {k} exceeds n/2 for n = {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("feedback violates setting: {0}")]
    SettingViolation(String),

    #[error("non-finite weight {value} at item {item}")]
    NonFiniteWeight { item: usize, value: f64 },

    #[error("horizon exhausted: round {round} requested but horizon is {horizon}")]
    HorizonExhausted { round: usize, horizon: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("n = {n} is too large for explicit enumeration (max {max})")]
    TooLarge { n: usize, max: usize },

    #[error("feedback sequence is empty")]
    EmptySequence,

    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
