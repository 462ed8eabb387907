use std::path::PathBuf;

use prompt_pricing::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid scenario {path}:\n{}", .violations.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation {
        path: PathBuf,
        violations: Vec<String>,
    },
    #[error("configuration rejected: {0}")]
    Config(CoreError),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 4,
            Self::Validation { .. } | Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 1,
        }
    }
}

/// Errors raised after validation are either configuration the solver
/// rejects or a numerical breakdown.
impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonFinite { .. } | CoreError::NoBracket { .. } => Self::Numerical(e),
            other => Self::Config(other),
        }
    }
}
