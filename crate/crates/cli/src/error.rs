use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration, detected before any compute.
    #[error("config error: {0}")]
    Config(String),

    #[error("regime refusal: {0}")]
    Regime(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Anything else the core library rejected.
    #[error(transparent)]
    Core(itlab_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 config, 3 regime, 4 I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Core(_) => 1,
        }
    }
}

impl From<itlab_core::Error> for CliError {
    fn from(e: itlab_core::Error) -> Self {
        match e {
            itlab_core::Error::Regime(m) => CliError::Regime(m),
            itlab_core::Error::InvalidParameter(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}
