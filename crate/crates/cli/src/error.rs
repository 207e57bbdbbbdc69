use std::process::ExitCode;

use qsampler_core::Error;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid or missing configuration: exit 2.
    Config(String),
    /// A numerical contract was violated: exit 3.
    Contract(String),
    /// Anything else (I/O): exit 1.
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Contract(_) => ExitCode::from(3),
            CliError::Other(_) => ExitCode::from(1),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Contract(m) => write!(f, "numerical contract violation: {m}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ContractViolation(m) => CliError::Contract(m),
            Error::Io(e) => CliError::Other(e.into()),
            Error::Json(e) => CliError::Other(e.into()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Other(e.into())
    }
}
