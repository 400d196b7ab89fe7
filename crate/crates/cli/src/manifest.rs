//! Run manifest: one JSON line per stage invocation, appended to
//! `manifest.jsonl` in the stage's output directory.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use reckmine_core::artifacts::MANIFEST_FILE;

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub stage: String,
    pub status: &'static str,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: u64,
    pub config: Value,
    pub tool_version: &'static str,
    pub started_at_unix: u64,
    pub wall_time_ms: u128,
}

pub fn append(dir: &Path, entry: &ManifestEntry) -> std::io::Result<()> {
    let mut line = serde_json::to_string(entry)?;
    line.push('\n');
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join(MANIFEST_FILE))?
        .write_all(line.as_bytes())
}
