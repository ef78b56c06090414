use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("solver failed: {0}")]
    Runtime(#[from] bvchain::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: 2 parse, 3 validation, 4 solver or i/o failure.
    /// Tolerance failures are not errors and exit with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Runtime(_) | CliError::Io(_) | CliError::Csv(_) => 4,
        }
    }
}
