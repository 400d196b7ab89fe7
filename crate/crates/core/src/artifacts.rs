//! File names and record types of the artifacts pipeline stages exchange.
//! A run directory holds one of each; the HTTP service reads the same files.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::KMeansConfig;
use crate::corpus::MarketId;
use crate::embed::TextVector;
use crate::summarize::ClusterSummary;

pub const IMPORT_REPORT_FILE: &str = "import_report.json";
pub const RED_PACKET_FILE: &str = "red_packet.jsonl";
pub const TRANSLATED_FILE: &str = "translated.jsonl";
pub const TRANSLATION_CACHE_FILE: &str = "translation_cache.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.jsonl";
pub const LABELED_FILE: &str = "labeled.jsonl";
pub const MODEL_FILE: &str = "model.json";
pub const CLASSIFIED_FILE: &str = "classified.jsonl";
pub const CLUSTERS_FILE: &str = "clusters.json";
pub const SSE_CURVE_FILE: &str = "sse_curve.csv";
pub const ELBOW_FILE: &str = "elbow.json";
pub const SUMMARIES_FILE: &str = "summaries.json";
pub const MARKET_TABLE_CSV: &str = "market_table.csv";
pub const MARKET_TABLE_JSON: &str = "market_table.json";
pub const CATEGORY_TABLE_CSV: &str = "category_table.csv";
pub const CATEGORY_TABLE_JSON: &str = "category_table.json";
pub const FRAUD_TABLE_CSV: &str = "fraud_table.csv";
pub const FRAUD_TABLE_JSON: &str = "fraud_table.json";
pub const HOT_WORDS_JSON: &str = "hot_words.json";
pub const WORDCLOUD_CSV: &str = "wordcloud.csv";
pub const AV_VERDICTS_CSV: &str = "av_verdicts.csv";
pub const AV_HISTOGRAM_CSV: &str = "av_histogram.csv";
pub const AV_REPORT_JSON: &str = "av_report.json";
pub const POPUP_DETECTIONS_FILE: &str = "popup_detections.jsonl";
pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{0}: not found")]
    Missing(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

fn open(path: &Path) -> Result<File, ArtifactError> {
    File::open(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            ArtifactError::Missing(path.to_path_buf())
        } else {
            ArtifactError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ArtifactError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| ArtifactError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                reason: e.to_string(),
            })?,
        );
    }
    Ok(out)
}

/// Either JSON lines or a single JSON array, so a downloaded export can be
/// used where a JSON-lines file is expected.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ArtifactError> {
    let contents = fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            ArtifactError::Missing(path.to_path_buf())
        } else {
            ArtifactError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    if contents.trim_start().starts_with('[') {
        return serde_json::from_str(&contents).map_err(|e| ArtifactError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            reason: e.to_string(),
        });
    }
    read_jsonl(path)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), ArtifactError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| io_err(path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ArtifactError> {
    serde_json::from_reader(BufReader::new(open(path)?)).map_err(|e| ArtifactError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        reason: e.to_string(),
    })
}

/// Pretty-printed with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ArtifactError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path)(e.into()))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Embedding of one red-packet review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedReview {
    pub review_id: String,
    pub market: MarketId,
    pub vector: TextVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub review_id: String,
    pub market: MarketId,
    pub cluster: usize,
    /// Euclidean distance to the assigned centroid.
    pub distance: f64,
}

/// Exported cluster model: centroids plus review-to-cluster assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterExport {
    pub k: usize,
    pub sse: f64,
    pub config: KMeansConfig,
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<ClusterAssignment>,
}

impl ClusterExport {
    pub fn sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0; self.k];
        for a in &self.assignments {
            sizes[a.cluster] += 1;
        }
        sizes
    }

    /// Members of `cluster`, nearest to the centroid first (ties by review id).
    pub fn members(&self, cluster: usize) -> Vec<&ClusterAssignment> {
        let mut m: Vec<&ClusterAssignment> = self
            .assignments
            .iter()
            .filter(|a| a.cluster == cluster)
            .collect();
        m.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then_with(|| a.review_id.cmp(&b.review_id))
        });
        m
    }
}

/// Keywords and summary of one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDigest {
    pub cluster_id: usize,
    pub size: u64,
    pub keywords: Vec<(String, f64)>,
    pub summary: ClusterSummary,
}
