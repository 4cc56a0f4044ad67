use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] qnoise_core::Error),

    #[error("maximum deviation {max_dev:e} exceeds tolerance {tolerance:e}")]
    Tolerance { max_dev: f64, tolerance: f64 },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 1 usage/config, 2 tolerance exceeded, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(_) => 1,
            CliError::Tolerance { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
