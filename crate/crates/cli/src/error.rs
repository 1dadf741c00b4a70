use std::path::PathBuf;

use subqsl_core::{BoundViolation, QslError};

/// Process exit status for usage, configuration and I/O problems.
pub const EXIT_USAGE: i32 = 1;
/// Process exit status when a bound is breached or a verification fails.
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("instance {instance}: {source}")]
    Numeric {
        instance: String,
        #[source]
        source: QslError,
    },
    #[error("instance {instance}: bound violated: {violation}")]
    Violation { instance: String, violation: BoundViolation },
    #[error("{failed} verification check(s) failed")]
    VerificationFailed { failed: usize },
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation { .. } | CliError::VerificationFailed { .. } => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Splits bound violations from other numerical failures.
    pub fn numeric(instance: &str, source: QslError) -> Self {
        match source {
            QslError::BoundViolation(violation) => CliError::Violation { instance: instance.to_string(), violation },
            source => CliError::Numeric { instance: instance.to_string(), source },
        }
    }
}
