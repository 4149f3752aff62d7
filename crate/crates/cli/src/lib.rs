//! Scenario runner, artifact writers, and verification suites for the
//! dispersia laboratory.

pub mod runner;
pub mod scenario;
pub mod suites;
pub mod templates;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("solver unstable at t = {time:.6}: {reason}")]
    Unstable { time: f64, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<dispersia_core::Error> for CliError {
    fn from(e: dispersia_core::Error) -> Self {
        match e {
            dispersia_core::Error::Instability { time, reason } => {
                CliError::Unstable { time, reason }
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 3 for instability.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Unstable { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Output root: `DISPERSIA_OUT` if set, else `./out`.
pub fn output_root() -> std::path::PathBuf {
    std::env::var_os("DISPERSIA_OUT")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::path::PathBuf::from("out"))
}
