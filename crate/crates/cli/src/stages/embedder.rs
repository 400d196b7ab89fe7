//! The embedder selected by configuration.

use reckmine_core::embed::{EmbedError, Embedder, HashingEmbedder, RemoteEmbedder, TextVector};
use reckmine_core::provider::RetryPolicy;

use crate::config::{EmbedBackend, EmbedConfig};
use crate::error::{CliError, CliResult};

pub enum CliEmbedder {
    Hashing(HashingEmbedder),
    Remote(RemoteEmbedder),
}

impl CliEmbedder {
    pub fn from_config(c: &EmbedConfig) -> CliResult<Self> {
        match c.backend {
            EmbedBackend::Hashing => HashingEmbedder::new(c.dims)
                .map(CliEmbedder::Hashing)
                .map_err(|e| CliError::Config(e.to_string())),
            EmbedBackend::Remote => {
                let endpoint = c.endpoint.clone().ok_or_else(|| {
                    CliError::Config("the remote embedding backend needs an endpoint".into())
                })?;
                let mut remote = RemoteEmbedder::new(endpoint, c.model.clone());
                remote.batch_size = c.batch_size;
                remote.retry = RetryPolicy {
                    max_retries: c.max_retries,
                    ..RetryPolicy::default()
                };
                Ok(CliEmbedder::Remote(remote))
            }
        }
    }
}

impl Embedder for CliEmbedder {
    fn embed(&self, texts: &[&str]) -> Result<Vec<TextVector>, EmbedError> {
        match self {
            CliEmbedder::Hashing(h) => h.embed(texts),
            CliEmbedder::Remote(r) => r.embed(texts),
        }
    }
}

/// Provider failures exit with code 4; anything else is a plain error.
pub fn embed_error(e: EmbedError) -> CliError {
    match e {
        EmbedError::Provider(p) => CliError::Provider(p.to_string()),
        e => CliError::Other(e.into()),
    }
}
