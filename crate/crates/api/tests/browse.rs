mod common;

use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use serde_json::Value;

use common::Client;
use reckmine_core::artifacts::{self, ClusterAssignment, ClusterDigest, ClusterExport};
use reckmine_core::cluster::KMeansConfig;
use reckmine_core::corpus::MarketId;
use reckmine_core::filter::RedPacketReview;
use reckmine_core::report::{hot_words, DistributionTable, FraudTable};
use reckmine_core::summarize::{ClusterSummary, SummaryMethod};
use reckmine_core::text::Stopwords;

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn review(id: &str, text: &str) -> RedPacketReview {
    RedPacketReview {
        review_id: id.into(),
        app_id: "app".into(),
        market: MarketId::Xiaomi,
        category: None,
        rating: 1,
        language: "en".into(),
        retained_segments: vec![text.into()],
        joined_text: text.into(),
        matched_terms: BTreeSet::new(),
        source_text: None,
    }
}

fn populate(dir: &Path) {
    let reviews: Vec<RedPacketReview> = (0..6)
        .map(|i| review(&format!("r{i}"), &format!("red packet text {i}")))
        .collect();
    artifacts::write_jsonl(&dir.join(artifacts::RED_PACKET_FILE), &reviews).unwrap();
    let assignments = (0..6)
        .map(|i| ClusterAssignment {
            review_id: format!("r{i}"),
            market: MarketId::Xiaomi,
            cluster: i % 2,
            distance: 1.0 - i as f64 / 10.0,
        })
        .collect();
    let clusters = ClusterExport {
        k: 2,
        sse: 1.5,
        config: KMeansConfig::with_k(2),
        centroids: vec![vec![0.0; 2], vec![1.0; 2]],
        assignments,
    };
    artifacts::write_json(&dir.join(artifacts::CLUSTERS_FILE), &clusters).unwrap();
    let market = DistributionTable::read_counts_csv(
        File::open(fixture("market_counts.csv")).unwrap(),
    )
    .unwrap();
    artifacts::write_json(&dir.join(artifacts::MARKET_TABLE_JSON), &market).unwrap();
    let category = DistributionTable::read_counts_csv(
        File::open(fixture("category_counts.csv")).unwrap(),
    )
    .unwrap();
    artifacts::write_json(&dir.join(artifacts::CATEGORY_TABLE_JSON), &category).unwrap();
    let fraud =
        FraudTable::read_counts_csv(File::open(fixture("fraud_counts.csv")).unwrap())
            .unwrap();
    artifacts::write_json(&dir.join(artifacts::FRAUD_TABLE_JSON), &fraud).unwrap();
    let words = hot_words(
        &["coins coins cash", "coins cash"],
        2,
        &Stopwords::english(),
    );
    artifacts::write_json(&dir.join(artifacts::HOT_WORDS_JSON), &words).unwrap();
}

fn file_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn reports_mirror_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    populate(dir.path());
    let c = Client::new(common::serve(common::state(0, dir.path())));
    for (kind, file) in [
        ("market", artifacts::MARKET_TABLE_JSON),
        ("category", artifacts::CATEGORY_TABLE_JSON),
        ("fraud", artifacts::FRAUD_TABLE_JSON),
    ] {
        let (status, body) = c.get(&format!("/reports/{kind}"), Some("tok-view"));
        assert_eq!(status, 200);
        assert_eq!(body, file_json(dir.path(), file));
    }
    let (_, market) = c.get("/reports/market", Some("tok-view"));
    assert_eq!(market["total"]["negative_pct"], "33.2%");
    let (_, fraud) = c.get("/reports/fraud", Some("tok-view"));
    assert_eq!(fraud["rows"][0]["pct"], "35.1%");
    let (status, words) = c.get("/hotwords", Some("tok-view"));
    assert_eq!(status, 200);
    assert_eq!(words[0]["term"], "coins");
    assert_eq!(words[0]["frequency"], 3);
    assert_eq!(c.get("/reports/apps", Some("tok-view")).0, 404);
    assert_eq!(c.get("/reports/market", None).0, 401);
}

#[test]
fn clusters_without_summaries_show_sizes() {
    let dir = tempfile::tempdir().unwrap();
    populate(dir.path());
    let c = Client::new(common::serve(common::state(0, dir.path())));
    let (status, list) = c.get("/clusters", Some("tok-view"));
    assert_eq!(status, 200);
    assert_eq!(list[0]["size"], 3);
    assert!(list[0]["summary"].is_null());

    let (_, members) = c.get("/clusters/1/reviews?limit=2", Some("tok-view"));
    assert_eq!(members["size"], 3);
    let ids: Vec<&str> = members["reviews"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["review_id"].as_str().unwrap())
        .collect();
    // nearest first: r5 (0.5), r3 (0.7)
    assert_eq!(ids, ["r5", "r3"]);
    assert_eq!(members["reviews"][0]["text"], "red packet text 5");

    let (_, all) = c.get("/clusters/0/reviews", Some("tok-view"));
    assert_eq!(all["reviews"].as_array().unwrap().len(), 3);
    assert_eq!(c.get("/clusters/2/reviews", Some("tok-view")).0, 404);
    assert_eq!(c.get("/clusters/x/reviews", Some("tok-view")).0, 400);
    assert_eq!(
        c.get("/clusters/0/reviews?limit=-1", Some("tok-view")).0,
        400
    );
}

#[test]
fn clusters_with_summaries() {
    let dir = tempfile::tempdir().unwrap();
    populate(dir.path());
    let digests: Vec<ClusterDigest> = (0..2)
        .map(|i| ClusterDigest {
            cluster_id: i,
            size: 3,
            keywords: vec![("coins".into(), 0.25)],
            summary: ClusterSummary {
                cluster_id: i,
                summary: format!("Summary {i}."),
                method: SummaryMethod::Extractive,
                sample_size: 1,
            },
        })
        .collect();
    artifacts::write_json(&dir.path().join(artifacts::SUMMARIES_FILE), &digests).unwrap();
    let c = Client::new(common::serve(common::state(0, dir.path())));
    let (_, list) = c.get("/clusters", Some("tok-view"));
    assert_eq!(list[1]["summary"], "Summary 1.");
    assert_eq!(list[1]["method"], "extractive");
    assert_eq!(list[1]["keywords"][0][1], 0.25);
}

#[test]
fn missing_artifacts_are_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let c = Client::new(common::serve(common::state(0, dir.path())));
    for path in [
        "/clusters",
        "/clusters/0/reviews",
        "/reports/market",
        "/hotwords",
    ] {
        let (status, body) = c.get(path, Some("tok-view"));
        assert_eq!(status, 404, "{path}");
        assert_eq!(body["error"], "not_found");
    }
    let (status, body) = c.get("/health", None);
    assert_eq!((status, body["status"].as_str()), (200, Some("ok")));
}

#[test]
fn queue_built_from_run_dir() {
    let dir = tempfile::tempdir().unwrap();
    populate(dir.path());
    let q = reckmine_api::queue_from_run_dir(dir.path()).unwrap();
    assert_eq!(q.len(), 6);
    assert_eq!(q[2].text, "red packet text 2");
}
