use std::path::PathBuf;

use relspec_core::Error as CoreError;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Config = 2,
    Data = 3,
    Numerical = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config(_) => ExitCode::Config,
            Self::Data(_) | Self::Io { .. } => ExitCode::Data,
            Self::Numerical(_) => ExitCode::Numerical,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn data(msg: impl std::fmt::Display) -> Self {
        Self::Data(msg.to_string())
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Diverged { .. } | CoreError::NonFinite(_) | CoreError::ZeroVariance(_) => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Data(e.to_string()),
        }
    }
}
