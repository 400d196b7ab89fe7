#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    repo_root().join("fixtures").join(name)
}

pub fn reckmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reckmine"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("run reckmine")
}

/// Runs a stage and fails the test with its stderr unless it exits 0.
pub fn ok(args: &[&str]) -> String {
    let out = reckmine(args);
    assert!(
        out.status.success(),
        "reckmine {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The deterministic pipeline on the bundled demo corpus, import to report.
pub fn run_pipeline(run: &Path) {
    let demo = fixture("demo");
    let r = s(run);
    ok(&["import", "--in", s(&demo), "--out", r]);
    ok(&["filter", "--in", r]);
    ok(&["translate", "--in", r, "--passthrough"]);
    ok(&["embed", "--in", r]);
    ok(&[
        "train",
        "--in",
        r,
        "--labels",
        s(&demo.join("labeled.jsonl")),
    ]);
    ok(&["classify", "--in", r]);
    ok(&["elbow", "--in", r]);
    ok(&["cluster", "--in", r]);
    ok(&["summarize", "--in", r]);
    ok(&[
        "report",
        "--in",
        r,
        "--min-freq",
        "5",
        "--av-flags",
        s(&fixture("av_flags.jsonl")),
    ]);
}

/// Every file in `dir` except the manifest, by name.
pub fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && p.file_name().unwrap() != "manifest.jsonl")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

pub fn read_jsonl(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of a CSV file as string fields; naive split, fine for our numeric tables.
pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
