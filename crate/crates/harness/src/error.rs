use thiserror::Error;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("trace error: {0}")]
    Trace(String),

    #[error("{0}")]
    Runtime(String),

    #[error("unsupported schema version {found} in {what} (expected {expected})")]
    Schema { what: String, found: u64, expected: u64 },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Runtime(_) | HarnessError::Schema { .. } => 1,
            HarnessError::Config(_) => 2,
            HarnessError::Trace(_) => 3,
        }
    }
}

impl From<onlinerank::Error> for HarnessError {
    fn from(err: onlinerank::Error) -> Self {
        match err {
            onlinerank::Error::Trace { .. } => HarnessError::Trace(err.to_string()),
            other => HarnessError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(err: std::io::Error) -> Self {
        HarnessError::Runtime(err.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(err: csv::Error) -> Self {
        HarnessError::Runtime(err.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(err: serde_json::Error) -> Self {
        HarnessError::Runtime(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
