use std::path::PathBuf;

use lindblad_core::{Error as CoreError, SpecViolation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("{0}")]
    InvalidSpec(#[from] SpecViolation),
    #[error("{0}")]
    Core(CoreError),
    #[error("{0}")]
    Output(String),
    #[error("failed checks: {}", .0.join(", "))]
    VerificationFailed(Vec<String>),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidSpec(v) => Self::InvalidSpec(v),
            CoreError::InvalidState(msg) | CoreError::InvalidCutoff(msg) => Self::InvalidConfig(msg),
            CoreError::InvalidTime(_) | CoreError::TimesNotAscending { .. } | CoreError::MissingSpareLevel { .. } => {
                Self::InvalidConfig(e.to_string())
            }
            other => Self::Core(other),
        }
    }
}

impl CliError {
    /// Machine-readable category, the first field of the error line.
    pub fn code(&self) -> String {
        match self {
            Self::Io { .. } => "io".into(),
            Self::Parse(_) => "config_parse".into(),
            Self::InvalidConfig(_) => "invalid_config".into(),
            Self::InvalidSpec(v) => format!("invalid_spec.{}", v.code()),
            Self::Core(_) => "computation".into(),
            Self::Output(_) => "output".into(),
            Self::VerificationFailed(_) => "verification_failed".into(),
        }
    }

    /// 1 for failed checks, 2 for everything that stopped the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::VerificationFailed(_) => 1,
            _ => 2,
        }
    }

    /// `error: <code>: <message>` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error: {}: {msg}", self.code())
    }
}
