//! JSON configuration. Every field has a default, so an empty object is a
//! valid config; command-line flags override individual fields.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use reckmine_api::TokenTable;
use reckmine_core::cluster::KMeansConfig;
use reckmine_core::embed::DEFAULT_DIMS;
use reckmine_core::popdetect::DEFAULT_THRESHOLD;
use reckmine_core::report::DEFAULT_HOT_WORD_MIN_FREQ;
use reckmine_core::sentiment::TrainConfig;
use reckmine_core::summarize::{DEFAULT_MAX_REVIEWS, DEFAULT_TOP_K};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub import: ImportConfig,
    pub filter: FilterConfig,
    pub translate: TranslateConfig,
    pub embed: EmbedConfig,
    pub train: TrainSection,
    pub cluster: ClusterSection,
    pub summarize: SummarizeConfig,
    pub report: ReportConfig,
    pub popup: PopupConfig,
    pub serve: ServeConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImportConfig {
    /// Market of every imported file; otherwise taken from each file name.
    pub market: Option<String>,
    pub apps: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub keywords_en: Option<PathBuf>,
    pub keywords_zh: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslateConfig {
    pub endpoint: Option<String>,
    /// Leave texts untranslated instead of calling a provider.
    pub passthrough: bool,
    pub batch_size: usize,
    pub max_retries: u32,
}

impl Default for TranslateConfig {
    fn default() -> Self {
        TranslateConfig {
            endpoint: None,
            passthrough: false,
            batch_size: 64,
            max_retries: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EmbedBackend {
    Hashing,
    Remote,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub backend: EmbedBackend,
    pub dims: usize,
    pub endpoint: Option<String>,
    pub model: String,
    pub batch_size: usize,
    pub max_retries: u32,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            backend: EmbedBackend::Hashing,
            dims: DEFAULT_DIMS,
            endpoint: None,
            model: "default".into(),
            batch_size: 64,
            max_retries: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    /// Labelled texts; defaults to `labeled.jsonl` in the input directory.
    pub labels: Option<PathBuf>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_penalty: f64,
    /// Training examples per class; the rest are held out. Defaults to 80%
    /// of the smaller class.
    pub train_per_class: Option<usize>,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainSection {
            labels: None,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            l2_penalty: t.l2_penalty,
            train_per_class: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    /// Fixed k; when absent the elbow of the SSE sweep is used.
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ClusterSection {
    fn default() -> Self {
        let d = KMeansConfig::default();
        ClusterSection {
            k: None,
            k_min: 1,
            k_max: 10,
            restarts: d.restarts,
            max_iter: d.max_iter,
            tol: d.tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummarizeConfig {
    /// Chat-completion endpoint; without one summaries are extractive.
    pub endpoint: Option<String>,
    pub model: String,
    pub template: Option<PathBuf>,
    pub max_reviews: usize,
    pub char_budget: Option<usize>,
    pub top_k: usize,
    pub stopwords: Option<PathBuf>,
    pub max_retries: u32,
}

impl Default for SummarizeConfig {
    fn default() -> Self {
        SummarizeConfig {
            endpoint: None,
            model: "default".into(),
            template: None,
            max_reviews: DEFAULT_MAX_REVIEWS,
            char_budget: None,
            top_k: DEFAULT_TOP_K,
            stopwords: None,
            max_retries: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub hot_word_min_freq: u64,
    pub stopwords: Option<PathBuf>,
    pub av_flags: Option<PathBuf>,
    pub market_counts: Option<PathBuf>,
    pub category_counts: Option<PathBuf>,
    pub fraud_counts: Option<PathBuf>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            hot_word_min_freq: DEFAULT_HOT_WORD_MIN_FREQ,
            stopwords: None,
            av_flags: None,
            market_counts: None,
            category_counts: None,
            fraud_counts: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopupConfig {
    pub rules: Option<PathBuf>,
    pub generic_texts: Option<PathBuf>,
    pub threshold: f64,
}

impl Default for PopupConfig {
    fn default() -> Self {
        PopupConfig {
            rules: None,
            generic_texts: None,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    /// Annotation snapshot; defaults to `annotations.json` in the input directory.
    pub store: Option<PathBuf>,
    pub tokens: TokenTable,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            store: None,
            tokens: TokenTable::default(),
        }
    }
}

impl Config {
    /// Reads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut config: Config = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.import.apps);
        fix(&mut self.filter.keywords_en);
        fix(&mut self.filter.keywords_zh);
        fix(&mut self.train.labels);
        fix(&mut self.summarize.template);
        fix(&mut self.summarize.stopwords);
        fix(&mut self.report.stopwords);
        fix(&mut self.report.av_flags);
        fix(&mut self.report.market_counts);
        fix(&mut self.report.category_counts);
        fix(&mut self.report.fraud_counts);
        fix(&mut self.popup.rules);
        fix(&mut self.popup.generic_texts);
        fix(&mut self.serve.store);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let c: Config = serde_json::from_str("{}").unwrap();
        assert_eq!(c.cluster.k_max, 10);
        assert_eq!(c.embed.backend, EmbedBackend::Hashing);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"clustr": {}}"#).is_err());
        assert!(serde_json::from_str::<Config>(r#"{"cluster": {"kk": 3}}"#).is_err());
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"filter": {"keywords_en": "kw.txt"}, "report": {"av_flags": "/abs/av.jsonl"}}"#,
        )
        .unwrap();
        let c = Config::load(&path).unwrap();
        assert_eq!(c.filter.keywords_en.unwrap(), dir.path().join("kw.txt"));
        assert_eq!(c.report.av_flags.unwrap(), PathBuf::from("/abs/av.jsonl"));
    }
}
