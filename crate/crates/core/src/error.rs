use thiserror::Error;

/// Errors raised by the toolkit. Verdict failures (a check that does not
/// pass) are never errors; they are report entries.
#[derive(Debug, Error)]
pub enum BlidError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("state error: {0}")]
    State(String),

    #[error("capacity error: window index {needed} required but k_max = {k_max}")]
    Capacity { needed: usize, k_max: usize },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("domain fault: local map applied at norm {norm} outside its ball of radius {radius}")]
    DomainFault { norm: f64, radius: f64 },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, BlidError>;

pub(crate) fn argument(msg: impl Into<String>) -> BlidError {
    BlidError::Argument(msg.into())
}
