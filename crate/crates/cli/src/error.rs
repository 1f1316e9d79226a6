//! Driver-level failures and their process exit codes.

use carleman_chem::ChemError;
use thiserror::Error;

/// Anything that can stop a command. Exit codes: 1 for command-line usage
/// problems, 2 for configuration or input-file problems, 3 for numerical
/// failures (divergence, singular solves, rate overflow).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numerics(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) | CliError::Io(_) => 2,
            CliError::Numerics(_) => 3,
        }
    }
}

impl From<carleman_core::Error> for CliError {
    fn from(e: carleman_core::Error) -> Self {
        use carleman_core::Error as E;
        match e {
            E::DivergenceDetected { .. }
            | E::SingularMatrix { .. }
            | E::SingularBlock { .. }
            | E::NonFiniteEntry { .. } => CliError::Numerics(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<ChemError> for CliError {
    fn from(e: ChemError) -> Self {
        match e {
            ChemError::RateOverflow { .. } => CliError::Numerics(e.to_string()),
            ChemError::Numeric(inner) => CliError::from(inner),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("configuration: {e}"))
    }
}
