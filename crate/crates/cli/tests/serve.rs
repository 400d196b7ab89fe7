//! The `serve` subcommand as a real process.

mod common;

use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use common::*;
use serde_json::{json, Value};

struct Server {
    child: Child,
    base: String,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(5)))
        .build()
        .into()
}

fn free_port() -> u16 {
    std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("serve.json");
    let body = json!({"serve": {"tokens": {
        "t-ann": {"user": "ann", "role": "annotator"},
        "t-ben": {"user": "ben", "role": "annotator"},
    }}});
    std::fs::write(&cfg, body.to_string()).unwrap();
    cfg
}

fn start(run: &Path, cfg: &Path) -> Server {
    let addr = format!("127.0.0.1:{}", free_port());
    let child = Command::new(env!("CARGO_BIN_EXE_reckmine"))
        .args(["serve", "--in", s(run), "--config", s(cfg), "--addr", &addr])
        .env("RUST_LOG", "error")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let server = Server {
        child,
        base: format!("http://{addr}"),
    };
    let deadline = Instant::now() + Duration::from_secs(20);
    while Instant::now() < deadline {
        if agent()
            .get(format!("{}/health", server.base))
            .call()
            .is_ok()
        {
            return server;
        }
        std::thread::sleep(Duration::from_millis(100));
    }
    panic!("server did not come up");
}

fn get(url: String, token: &str) -> (u16, Value) {
    let mut resp = agent()
        .get(url)
        .header("Authorization", format!("Bearer {token}"))
        .call()
        .unwrap();
    (resp.status().as_u16(), resp.body_mut().read_json().unwrap())
}

fn post(url: String, token: &str, body: Value) -> (u16, Value) {
    let mut resp = agent()
        .post(url)
        .header("Authorization", format!("Bearer {token}"))
        .send_json(body)
        .unwrap();
    (resp.status().as_u16(), resp.body_mut().read_json().unwrap())
}

#[test]
fn serve_labels_over_http_and_persists() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    ok(&["import", "--in", s(&fixture("demo")), "--out", s(&run)]);
    ok(&["filter", "--in", s(&run)]);
    let cfg = write_config(dir.path());
    let queued = read_jsonl(&run.join("red_packet.jsonl")).len() as u64;

    let server = start(&run, &cfg);
    let (status, task) = get(format!("{}/tasks/next?annotator=ann", server.base), "t-ann");
    assert_eq!(status, 200);
    let (status, _) = post(
        format!("{}/labels", server.base),
        "t-ann",
        json!({"task_id": task["task_id"], "label": "negative"}),
    );
    assert_eq!(status, 200);
    let (status, _) = get(format!("{}/progress", server.base), "nope");
    assert_eq!(status, 401);
    let (_, progress) = get(format!("{}/progress", server.base), "t-ben");
    assert_eq!(progress["reviews"], queued);
    assert_eq!(progress["tasks_labeled"], 1);
    drop(server);

    // a restarted server resumes from the snapshot
    let server = start(&run, &cfg);
    let (_, progress) = get(format!("{}/progress", server.base), "t-ann");
    assert_eq!(progress["tasks_labeled"], 1);
    drop(server);
    assert!(run.join("annotations.json").is_file());
    let stages: Vec<Value> = read_jsonl(&run.join("manifest.jsonl"))
        .into_iter()
        .map(|e| e["stage"].clone())
        .collect();
    assert_eq!(stages.iter().filter(|s| *s == "serve").count(), 2);
}

#[test]
fn serve_without_tokens_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    ok(&["import", "--in", s(&fixture("demo")), "--out", s(&run)]);
    ok(&["filter", "--in", s(&run)]);
    assert_eq!(code(&reckmine(&["serve", "--in", s(&run)])), 3);
}
