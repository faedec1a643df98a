use std::fmt::Display;

use thiserror::Error;

/// A failed command, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0:#}")]
    Data(anyhow::Error),
    #[error("{0:#}")]
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Attaches context and an exit class to fallible calls.
pub trait Classify<T> {
    fn data(self, context: impl Display) -> Result<T>;
    fn internal(self, context: impl Display) -> Result<T>;
}

impl<T, E> Classify<T> for std::result::Result<T, E>
where
    E: Into<anyhow::Error>,
{
    fn data(self, context: impl Display) -> Result<T> {
        self.map_err(|e| CliError::Data(e.into().context(context.to_string())))
    }

    fn internal(self, context: impl Display) -> Result<T> {
        self.map_err(|e| CliError::Internal(e.into().context(context.to_string())))
    }
}
