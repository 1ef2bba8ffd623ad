use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qii_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(qii_core::Error::Argument(_)) => 2,
            CliError::Core(qii_core::Error::Capacity(_)) => 3,
            CliError::Core(qii_core::Error::Integration { .. }) => 4,
            CliError::Io(_) => 1,
        }
    }
}
