use std::path::PathBuf;

use fewbody::FewBodyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{context}: {source}")]
    Solve {
        context: String,
        source: FewBodyError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn solve(context: impl Into<String>) -> impl FnOnce(FewBodyError) -> Self {
        let context = context.into();
        move |source| CliError::Solve { context, source }
    }

    /// 2 for invalid input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Invalid { .. } => 2,
            CliError::Solve { source, .. } if source.is_validation() => 2,
            CliError::Solve { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}
