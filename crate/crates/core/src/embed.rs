//! Text embeddings: a deterministic signed feature-hashing embedder that runs
//! offline, a client for a remote embedding service, and cosine similarity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::provider::{self, ProviderError, RetryPolicy};
use crate::text::{fnv1a64, words};

pub const DEFAULT_DIMS: usize = 512;
pub const MIN_HASHING_DIMS: usize = 16;
const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("hashing embedder needs at least {MIN_HASHING_DIMS} dimensions, got {0}")]
    DimsTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("embedding provider returned {found} vectors for {expected} texts")]
    CountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// A fixed-dimension embedding. `normalized` is false only for vectors that
/// could not be scaled to unit length (the zero vector) or were built raw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextVector {
    values: Vec<f64>,
    normalized: bool,
}

impl TextVector {
    /// Scales `values` to unit L2 norm. The zero vector stays zero and is
    /// flagged as not normalized.
    pub fn normalize(mut values: Vec<f64>) -> Self {
        let norm = l2_norm(&values);
        if norm == 0.0 || !norm.is_finite() {
            return TextVector {
                values,
                normalized: false,
            };
        }
        for v in &mut values {
            *v /= norm;
        }
        TextVector {
            values,
            normalized: true,
        }
    }

    /// Wraps values as-is. Marked normalized only if already unit length.
    pub fn raw(values: Vec<f64>) -> Self {
        let normalized = (l2_norm(&values) - 1.0).abs() <= NORM_TOLERANCE;
        TextVector { values, normalized }
    }

    pub fn dims(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }
}

impl AsRef<[f64]> for TextVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn l2_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub trait Embedder: Sync {
    /// One vector per text, in input order.
    fn embed(&self, texts: &[&str]) -> Result<Vec<TextVector>, EmbedError>;

    fn embed_one(&self, text: &str) -> Result<TextVector, EmbedError> {
        let mut v = self.embed(&[text])?;
        v.pop().ok_or(EmbedError::CountMismatch {
            expected: 1,
            found: 0,
        })
    }
}

/// Signed feature hashing over lowercased word unigrams and character
/// trigrams. Each token lands in bucket `h mod dims` with sign taken from
/// the top bit of its hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingEmbedder {
    dims: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        HashingEmbedder { dims: DEFAULT_DIMS }
    }
}

impl HashingEmbedder {
    pub fn new(dims: usize) -> Result<Self, EmbedError> {
        if dims < MIN_HASHING_DIMS {
            return Err(EmbedError::DimsTooSmall(dims));
        }
        Ok(HashingEmbedder { dims })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    fn add_token(&self, acc: &mut [f64], kind: u8, token: &str) {
        let mut bytes = Vec::with_capacity(token.len() + 2);
        bytes.push(kind);
        bytes.push(0x1f);
        bytes.extend_from_slice(token.as_bytes());
        let h = fnv1a64(&bytes);
        let bucket = (h % self.dims as u64) as usize;
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        acc[bucket] += sign;
    }

    pub fn embed_text(&self, text: &str) -> TextVector {
        let mut acc = vec![0.0; self.dims];
        for w in words(text) {
            self.add_token(&mut acc, b'w', &w);
        }
        let collapsed = text
            .to_lowercase()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        if !collapsed.is_empty() {
            let padded: Vec<char> = format!(" {collapsed} ").chars().collect();
            let mut buf = String::new();
            for window in padded.windows(3) {
                buf.clear();
                buf.extend(window);
                self.add_token(&mut acc, b'c', &buf);
            }
        }
        TextVector::normalize(acc)
    }
}

impl Embedder for HashingEmbedder {
    fn embed(&self, texts: &[&str]) -> Result<Vec<TextVector>, EmbedError> {
        Ok(texts.par_iter().map(|t| self.embed_text(t)).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedRequest<'a> {
    pub model: &'a str,
    pub texts: Vec<&'a str>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub vectors: Vec<Vec<f64>>,
}

/// Client for `POST {model, texts} -> {vectors}`.
#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub batch_size: usize,
    pub retry: RetryPolicy,
}

impl RemoteEmbedder {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        RemoteEmbedder {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: provider::api_key_from_env("EMBED_API_KEY"),
            batch_size: 64,
            retry: RetryPolicy::default(),
        }
    }
}

impl Embedder for RemoteEmbedder {
    fn embed(&self, texts: &[&str]) -> Result<Vec<TextVector>, EmbedError> {
        let mut out = Vec::with_capacity(texts.len());
        let mut dims: Option<usize> = None;
        for chunk in texts.chunks(self.batch_size.max(1)) {
            let request = EmbedRequest {
                model: &self.model,
                texts: chunk.to_vec(),
            };
            let response: EmbedResponse = self
                .retry
                .run(|| provider::post_json(&self.endpoint, self.api_key.as_deref(), &request))?;
            if response.vectors.len() != chunk.len() {
                return Err(EmbedError::CountMismatch {
                    expected: chunk.len(),
                    found: response.vectors.len(),
                });
            }
            for values in response.vectors {
                let expected = *dims.get_or_insert(values.len());
                if values.len() != expected {
                    return Err(EmbedError::DimensionMismatch {
                        expected,
                        found: values.len(),
                    });
                }
                let raw = TextVector::raw(values);
                out.push(if raw.is_normalized() {
                    raw
                } else {
                    TextVector::normalize(raw.into_values())
                });
            }
        }
        Ok(out)
    }
}

/// `dot(u, v) / (|u| |v|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, EmbedError> {
    if u.len() != v.len() {
        return Err(EmbedError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    Ok((dot / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}
