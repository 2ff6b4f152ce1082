use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] irs_deploy::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input or flags, 1 for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Invalid { .. } | CliError::Usage(_) => 2,
            CliError::Model(_) | CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
