//! Config-driven experiment runner for `hypstab-core`.

use std::path::PathBuf;

use thiserror::Error;

pub mod catalogue;
pub mod config;
pub mod output;
pub mod run;

pub use config::{Experiment, ExperimentConfig};
pub use run::{execute, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Numeric(hypstab_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

impl From<hypstab_core::Error> for CliError {
    fn from(e: hypstab_core::Error) -> Self {
        use hypstab_core::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::InvalidGrid(_) | E::LawMismatch { .. } | E::NonFiniteInitial { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}
