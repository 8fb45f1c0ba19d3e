use std::path::PathBuf;

use qsl_core::QslError;

/// Errors surfaced by the command-line runner, each tied to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration values (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Input file does not match the JSON schema (exit 2).
    #[error("invalid input at `{field}`: {message}")]
    Schema { field: String, message: String },
    /// Well-formed data that violates a physical invariant (exit 3).
    #[error("{0}")]
    Invariant(String),
    /// Solver failure or failed self-check (exit 4).
    #[error("{0}")]
    Numerical(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Schema { .. } => 2,
            CliError::Invariant(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<QslError> for CliError {
    fn from(err: QslError) -> Self {
        match err {
            QslError::InvalidParameter(_)
            | QslError::InvalidOptions(_)
            | QslError::DimensionCapExceeded { .. }
            | QslError::EmptyLayout
            | QslError::ZeroDimension { .. } => CliError::Usage(err.to_string()),
            QslError::NumericalFailure(_) => CliError::Numerical(err.to_string()),
            _ => CliError::Invariant(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
