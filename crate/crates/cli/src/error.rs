use std::path::{Path, PathBuf};
use std::process::ExitCode;

use thiserror::Error;

/// CLI failures, each mapped to a fixed process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    /// One or more scenario constraints failed.
    #[error("{} configuration error(s):\n  {}", .0.len(), .0.join("\n  "))]
    Invalid(Vec<String>),

    #[error("{0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_status(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.exit_status())
    }
}

impl From<mmwave::Error> for CliError {
    fn from(e: mmwave::Error) -> Self {
        match e {
            mmwave::Error::InvariantViolation { .. } => CliError::Invariant(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
