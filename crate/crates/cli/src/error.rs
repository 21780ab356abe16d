use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config file {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("state file {}: {message}", path.display())]
    StateFile { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] qcircle_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for a failed internal identity, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qcircle_core::Error::Consistency { .. }) => 3,
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
