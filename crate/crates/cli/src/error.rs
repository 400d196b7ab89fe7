//! Stage failures and their exit codes.

use thiserror::Error;

use reckmine_core::artifacts::ArtifactError;

#[derive(Debug, Error)]
pub enum CliError {
    /// A stage input does not exist. Exit code 2.
    #[error("{0}")]
    MissingInput(String),
    /// The configuration or a file it names is unusable. Exit code 3.
    #[error("config error: {0}")]
    Config(String),
    /// A remote provider failed after retries. Exit code 4.
    #[error("provider failure: {0}")]
    Provider(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) => 2,
            CliError::Config(_) => 3,
            CliError::Provider(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<ArtifactError> for CliError {
    fn from(e: ArtifactError) -> Self {
        match e {
            ArtifactError::Missing(p) => {
                CliError::MissingInput(format!("missing input: {}", p.display()))
            }
            e => CliError::Other(e.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
