use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: parse failures, invariant violations, bad flags.
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn io(context: impl std::fmt::Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<uavsim_core::Error> for CliError {
    fn from(e: uavsim_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
