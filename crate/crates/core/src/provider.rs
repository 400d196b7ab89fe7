//! Shared plumbing for remote providers (translation, embedding, completion).

use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed provider response: {0}")]
    Protocol(String),
}

/// Bounded retries with exponential backoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_backoff: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        RetryPolicy {
            max_retries: 0,
            initial_backoff: Duration::ZERO,
        }
    }

    pub fn immediate(max_retries: u32) -> Self {
        RetryPolicy {
            max_retries,
            initial_backoff: Duration::ZERO,
        }
    }

    /// Runs `op` until it succeeds or the retry budget is spent. Protocol
    /// errors are not retried: a malformed reply will not fix itself.
    pub fn run<T, F>(&self, mut op: F) -> Result<T, ProviderError>
    where
        F: FnMut() -> Result<T, ProviderError>,
    {
        let mut backoff = self.initial_backoff;
        let mut attempt = 0;
        loop {
            match op() {
                Ok(v) => return Ok(v),
                Err(ProviderError::Transport(msg)) if attempt < self.max_retries => {
                    log::warn!("provider call failed (attempt {}): {msg}", attempt + 1);
                    if !backoff.is_zero() {
                        thread::sleep(backoff);
                    }
                    backoff = backoff.saturating_mul(2);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// POSTs `body` as JSON and decodes the JSON reply.
pub fn post_json<Req, Resp>(
    endpoint: &str,
    api_key: Option<&str>,
    body: &Req,
) -> Result<Resp, ProviderError>
where
    Req: Serialize,
    Resp: DeserializeOwned,
{
    let mut request = ureq::post(endpoint).header("Content-Type", "application/json");
    if let Some(key) = api_key {
        request = request.header("Authorization", &format!("Bearer {key}"));
    }
    let mut response = request
        .send_json(body)
        .map_err(|e| ProviderError::Transport(e.to_string()))?;
    response
        .body_mut()
        .read_json::<Resp>()
        .map_err(|e| ProviderError::Protocol(e.to_string()))
}

/// Reads a credential from the environment, treating an empty value as unset.
pub fn api_key_from_env(var: &str) -> Option<String> {
    std::env::var(var).ok().filter(|v| !v.is_empty())
}
