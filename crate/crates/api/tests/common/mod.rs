#![allow(dead_code)]

use serde_json::Value;
use ureq::Agent;

use reckmine_api::{router, AnnotationStore, AppState, QueueItem, Role, TokenTable};

pub fn serve(state: AppState) -> String {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router(state)).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

pub fn tokens() -> TokenTable {
    let mut t = TokenTable::default();
    t.insert("tok-alice", "alice", Role::Annotator);
    t.insert("tok-bob", "bob", Role::Annotator);
    t.insert("tok-lead", "lead", Role::Adjudicator);
    t.insert("tok-view", "viewer", Role::Viewer);
    t
}

pub fn queue(n: usize) -> Vec<QueueItem> {
    (0..n)
        .map(|i| QueueItem {
            review_id: format!("r{i:03}"),
            text: format!("review number {i}"),
        })
        .collect()
}

pub fn state(n: usize, run_dir: &std::path::Path) -> AppState {
    AppState::new(AnnotationStore::new(queue(n)).unwrap(), run_dir, tokens())
}

/// HTTP client that reports 4xx/5xx as ordinary responses.
pub struct Client {
    pub base: String,
    agent: Agent,
}

impl Client {
    pub fn new(base: String) -> Self {
        let agent: Agent = Agent::config_builder()
            .http_status_as_error(false)
            .build()
            .into();
        Client { base, agent }
    }

    pub fn get(&self, path: &str, token: Option<&str>) -> (u16, Value) {
        let mut req = self.agent.get(format!("{}{path}", self.base));
        if let Some(t) = token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp = req.call().unwrap();
        (resp.status().as_u16(), resp.body_mut().read_json().unwrap())
    }

    pub fn post(&self, path: &str, token: &str, body: &str) -> (u16, Value) {
        let mut resp = self
            .agent
            .post(format!("{}{path}", self.base))
            .header("Authorization", format!("Bearer {token}"))
            .header("Content-Type", "application/json")
            .send(body)
            .unwrap();
        (resp.status().as_u16(), resp.body_mut().read_json().unwrap())
    }
}
