use std::path::Path;

use mrh_core::ErrorClass;
use serde_json::json;
use thiserror::Error;

/// Exit status for inputs that violate a precondition.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit status for numerical failures and failed checks.
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: {message}")]
    Table { origin: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mrh_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn table(origin: &Path, message: impl Into<String>) -> Self {
        CliError::Table { origin: origin.display().to_string(), message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Table { .. } => "table",
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => "validation",
                ErrorClass::Numerical => "numerical",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.class() == ErrorClass::Numerical => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}
