//! Translation of non-English red-packet reviews through a pluggable
//! provider, with a content-addressed cache.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::RedPacketReview;
use crate::provider::{self, ProviderError, RetryPolicy};
use crate::text::fnv1a64;

pub const TARGET_LANG: &str = "en";

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("translation failed for {} review(s): {}", .untranslated.len(), .untranslated.join(", "))]
    Partial {
        untranslated: Vec<String>,
        /// Input order; reviews that could not be translated are left as-is.
        reviews: Vec<RedPacketReview>,
        cause: String,
    },
    #[error("translation cache: {0}")]
    Cache(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationEntry {
    pub source_hash: u64,
    pub source_lang: String,
    pub target_lang: String,
    pub translated_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRequest {
    pub id: String,
    pub text: String,
    pub source_lang: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationResponse {
    pub id: String,
    pub text: String,
}

pub trait TranslationProvider {
    /// Translates a batch into English. Responses may come back in any order
    /// and are matched by `id`.
    fn translate(
        &self,
        batch: &[TranslationRequest],
    ) -> Result<Vec<TranslationResponse>, ProviderError>;
}

/// Returns every text unchanged. Useful offline and in tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassthroughProvider;

impl TranslationProvider for PassthroughProvider {
    fn translate(
        &self,
        batch: &[TranslationRequest],
    ) -> Result<Vec<TranslationResponse>, ProviderError> {
        Ok(batch
            .iter()
            .map(|r| TranslationResponse {
                id: r.id.clone(),
                text: r.text.clone(),
            })
            .collect())
    }
}

/// Posts `[{id, text, source_lang}]` and expects `[{id, text}]` back.
#[derive(Debug, Clone)]
pub struct HttpTranslationProvider {
    pub endpoint: String,
    pub api_key: Option<String>,
}

impl HttpTranslationProvider {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpTranslationProvider {
            endpoint: endpoint.into(),
            api_key: provider::api_key_from_env("TRANSLATE_API_KEY"),
        }
    }
}

impl TranslationProvider for HttpTranslationProvider {
    fn translate(
        &self,
        batch: &[TranslationRequest],
    ) -> Result<Vec<TranslationResponse>, ProviderError> {
        provider::post_json(&self.endpoint, self.api_key.as_deref(), &batch)
    }
}

/// Cache keyed by `(content hash, source language)`.
#[derive(Debug, Clone, Default)]
pub struct TranslationCache {
    entries: HashMap<(u64, String), TranslationEntry>,
    order: Vec<(u64, String)>,
}

impl TranslationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, text: &str, source_lang: &str) -> Option<&TranslationEntry> {
        self.entries
            .get(&(fnv1a64(text.as_bytes()), source_lang.to_string()))
    }

    pub fn insert(&mut self, entry: TranslationEntry) {
        let key = (entry.source_hash, entry.source_lang.clone());
        if self.entries.insert(key.clone(), entry).is_none() {
            self.order.push(key);
        }
    }

    /// Reads a JSON-lines cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> io::Result<Self> {
        let mut cache = TranslationCache::new();
        if !path.exists() {
            return Ok(cache);
        }
        for line in BufReader::new(File::open(path)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: TranslationEntry = serde_json::from_str(&line)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            cache.insert(entry);
        }
        Ok(cache)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        for key in &self.order {
            serde_json::to_writer(&mut out, &self.entries[key])?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

/// True when the primary subtag of a language tag is English.
pub fn is_english(tag: &str) -> bool {
    let primary = tag.split(['-', '_']).next().unwrap_or("");
    primary.eq_ignore_ascii_case("en")
}

#[derive(Debug, Clone, Copy)]
pub struct TranslateOptions {
    pub batch_size: usize,
    pub retry: RetryPolicy,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            batch_size: 64,
            retry: RetryPolicy::default(),
        }
    }
}

/// Translates every non-English review into English, in input order.
///
/// English reviews bypass the provider. Each distinct `(text, language)`
/// pair is sent at most once; repeats and previously cached texts are
/// served from `cache`.
pub fn translate_reviews(
    reviews: Vec<RedPacketReview>,
    provider: &dyn TranslationProvider,
    cache: &mut TranslationCache,
    options: &TranslateOptions,
) -> Result<Vec<RedPacketReview>, TranslateError> {
    let key_of = |r: &RedPacketReview| (fnv1a64(r.joined_text.as_bytes()), r.language.clone());

    let mut pending: Vec<TranslationRequest> = Vec::new();
    let mut queued: HashSet<(u64, String)> = HashSet::new();
    for r in &reviews {
        if is_english(&r.language) {
            continue;
        }
        let key = key_of(r);
        if cache.entries.contains_key(&key) || !queued.insert(key.clone()) {
            continue;
        }
        pending.push(TranslationRequest {
            id: format!("{:016x}:{}", key.0, key.1),
            text: r.joined_text.clone(),
            source_lang: r.language.clone(),
        });
    }

    let mut failure: Option<String> = None;
    for batch in pending.chunks(options.batch_size.max(1)) {
        match options.retry.run(|| provider.translate(batch)) {
            Ok(responses) => {
                let by_id: HashMap<&str, &str> = responses
                    .iter()
                    .map(|r| (r.id.as_str(), r.text.as_str()))
                    .collect();
                for req in batch {
                    match by_id.get(req.id.as_str()) {
                        Some(text) => cache.insert(TranslationEntry {
                            source_hash: fnv1a64(req.text.as_bytes()),
                            source_lang: req.source_lang.clone(),
                            target_lang: TARGET_LANG.into(),
                            translated_text: text.to_string(),
                        }),
                        None => {
                            failure.get_or_insert_with(|| {
                                format!("no translation returned for {}", req.id)
                            });
                        }
                    }
                }
            }
            Err(e) => {
                failure.get_or_insert_with(|| e.to_string());
            }
        }
    }

    let mut untranslated = Vec::new();
    let out: Vec<RedPacketReview> = reviews
        .into_iter()
        .map(|mut r| {
            if is_english(&r.language) {
                return r;
            }
            match cache.entries.get(&key_of(&r)) {
                Some(entry) => {
                    r.source_text = Some(std::mem::replace(
                        &mut r.joined_text,
                        entry.translated_text.clone(),
                    ));
                    r.language = TARGET_LANG.into();
                }
                None => untranslated.push(r.review_id.clone()),
            }
            r
        })
        .collect();

    if untranslated.is_empty() {
        Ok(out)
    } else {
        Err(TranslateError::Partial {
            untranslated,
            reviews: out,
            cause: failure.unwrap_or_else(|| "unknown provider failure".into()),
        })
    }
}
