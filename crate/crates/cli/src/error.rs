use std::process::ExitCode;

use cyclewalk::WalkError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("numerical assertion failed: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        })
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Domain { .. } | WalkError::Precondition(_) | WalkError::Unsupported(_) => {
                CliError::Usage(e.to_string())
            }
            WalkError::NoConvergence { .. } | WalkError::Numerical(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}
