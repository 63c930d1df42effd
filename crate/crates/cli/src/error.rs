//! Process-level error classification. Every failure maps to one of three
//! exit codes so scripts can distinguish bad configs from bad math from bad
//! disks.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or inconsistent configuration. Exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// Failure inside the simulation or analysis pipeline. Exit code 3.
    #[error("numerical error: {0}")]
    Numerics(#[from] hyperpure::Error),
    /// Filesystem trouble while emitting reports. Exit code 4.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
