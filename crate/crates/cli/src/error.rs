use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed record on line {line}: {reason}")]
    Record { line: u64, reason: String },
    #[error(transparent)]
    Core(#[from] sdcs_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
