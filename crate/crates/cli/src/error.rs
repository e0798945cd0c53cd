use eprkit_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("verification failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }

    /// Core errors raised while validating command-line values.
    pub fn usage(e: CoreError) -> Self {
        CliError::Usage(e.to_string())
    }

    /// Core errors raised by file contents or computed data.
    pub fn data(e: CoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
