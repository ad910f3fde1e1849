pub mod benchmark;
pub mod cluster;
pub mod evaluate;
pub mod generate;
pub mod tune;

use thiserror::Error;

/// Exit codes: 0 success, 2 usage/input error, 3 internal numerical
/// failure, 1 for environment failures (unwritable output and the like).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

impl From<ewp_core::Error> for CliError {
    fn from(e: ewp_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Algorithm names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    Ewp,
    Power,
    Lloyd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ewp => "ewp",
            Algorithm::Power => "power",
            Algorithm::Lloyd => "lloyd",
        }
    }
}
