//! Review and app records: ingestion, deduplication, persistence and counts.
//!
//! The on-disk format is JSON-lines, one review object per line with the
//! keys `review_id, app_id, market, category, rating, text, language, likes,
//! timestamp`. Keys outside that set are carried through untouched so an
//! import followed by an export does not lose information.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::percent::Percent;

pub const REVIEWS_FILE: &str = "reviews.jsonl";
pub const INDEX_FILE: &str = "index.jsonl";
pub const APPS_FILE: &str = "apps.jsonl";

/// The ten app categories sampled per market.
pub const KNOWN_CATEGORIES: [&str; 10] = [
    "shopping & payment",
    "sports & fitness",
    "video",
    "reading",
    "system tools",
    "browsers",
    "news",
    "comprehensive services",
    "leisure puzzle",
    "music",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Unreadable { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("invalid market label: {0:?}")]
    InvalidMarket(String),
    #[error("app record on line {line}: {reason}")]
    InvalidApp { line: usize, reason: String },
    #[error("duplicate app {app_id} in market {market}")]
    DuplicateApp { market: MarketId, app_id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MarketId {
    Tencent,
    Huawei,
    Xiaomi,
    GooglePlay,
    Other(String),
}

impl MarketId {
    pub fn as_str(&self) -> &str {
        match self {
            MarketId::Tencent => "tencent",
            MarketId::Huawei => "huawei",
            MarketId::Xiaomi => "xiaomi",
            MarketId::GooglePlay => "google_play",
            MarketId::Other(label) => label,
        }
    }

    /// Name used in report tables.
    pub fn display_name(&self) -> &str {
        match self {
            MarketId::Tencent => "Tencent",
            MarketId::Huawei => "Huawei",
            MarketId::Xiaomi => "Xiaomi",
            MarketId::GooglePlay => "Google Play",
            MarketId::Other(label) => label,
        }
    }
}

impl FromStr for MarketId {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .to_lowercase()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c })
            .collect();
        Ok(match norm.as_str() {
            "" => return Err(CorpusError::InvalidMarket(s.to_string())),
            "tencent" => MarketId::Tencent,
            "huawei" => MarketId::Huawei,
            "xiaomi" => MarketId::Xiaomi,
            "google_play" | "googleplay" => MarketId::GooglePlay,
            _ => MarketId::Other(norm),
        })
    }
}

impl fmt::Display for MarketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for MarketId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for MarketId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppRecord {
    pub app_id: String,
    pub market: MarketId,
    pub category: String,
    #[serde(default)]
    pub has_red_packet: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReviewRecord {
    pub review_id: String,
    pub app_id: String,
    pub market: MarketId,
    pub category: Option<String>,
    pub rating: u8,
    pub text: String,
    pub language: String,
    pub likes: u64,
    pub timestamp: i64,
    /// Keys not in the known schema, in their original order.
    pub extra: Map<String, Value>,
}

const KNOWN_KEYS: [&str; 9] = [
    "review_id",
    "app_id",
    "market",
    "category",
    "rating",
    "text",
    "language",
    "likes",
    "timestamp",
];

impl ReviewRecord {
    /// Validates one decoded JSON object. `default_market` fills a missing
    /// `market` key; a present key that disagrees is rejected.
    pub fn from_json(
        object: Map<String, Value>,
        default_market: &MarketId,
    ) -> Result<Self, String> {
        let mut object = object;
        let review_id = take_string(&mut object, "review_id")?;
        let app_id = take_string(&mut object, "app_id")?;
        let market = match object.shift_remove("market") {
            None | Some(Value::Null) => default_market.clone(),
            Some(Value::String(s)) => {
                let m: MarketId = s.parse().map_err(|_| "invalid market".to_string())?;
                if &m != default_market {
                    return Err(format!(
                        "market mismatch: record says {m}, import is for {default_market}"
                    ));
                }
                m
            }
            Some(_) => return Err("market must be a string".into()),
        };
        let category = match object.shift_remove("category") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) if !s.trim().is_empty() => Some(s),
            Some(Value::String(_)) => None,
            Some(_) => return Err("category must be a string".into()),
        };
        let rating = match object.shift_remove("rating") {
            Some(Value::Number(n)) => match n.as_i64() {
                Some(r) if (1..=5).contains(&r) => r as u8,
                Some(_) => return Err("rating out of range".into()),
                None => return Err("rating must be an integer".into()),
            },
            None => return Err("missing field rating".into()),
            Some(_) => return Err("rating must be an integer".into()),
        };
        let text = take_string(&mut object, "text")?;
        let language = take_string(&mut object, "language")?;
        let likes = match object.shift_remove("likes") {
            None | Some(Value::Null) => 0,
            Some(Value::Number(n)) => n
                .as_u64()
                .ok_or_else(|| "likes must be a non-negative integer".to_string())?,
            Some(_) => return Err("likes must be a non-negative integer".into()),
        };
        let timestamp = match object.shift_remove("timestamp") {
            Some(Value::Number(n)) => n
                .as_i64()
                .ok_or_else(|| "timestamp must be integer seconds".to_string())?,
            None => return Err("missing field timestamp".into()),
            Some(_) => return Err("timestamp must be integer seconds".into()),
        };
        Ok(ReviewRecord {
            review_id,
            app_id,
            market,
            category,
            rating,
            text,
            language,
            likes,
            timestamp,
            extra: object,
        })
    }

    pub fn to_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("review_id".into(), self.review_id.clone().into());
        m.insert("app_id".into(), self.app_id.clone().into());
        m.insert("market".into(), self.market.as_str().into());
        if let Some(c) = &self.category {
            m.insert("category".into(), c.clone().into());
        }
        m.insert("rating".into(), self.rating.into());
        m.insert("text".into(), self.text.clone().into());
        m.insert("language".into(), self.language.clone().into());
        m.insert("likes".into(), self.likes.into());
        m.insert("timestamp".into(), self.timestamp.into());
        for (k, v) in &self.extra {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                m.insert(k.clone(), v.clone());
            }
        }
        m
    }

    pub fn key(&self) -> (&MarketId, &str) {
        (&self.market, &self.review_id)
    }

    pub fn is_low_rating(&self) -> bool {
        self.rating <= 2
    }
}

fn take_string(object: &mut Map<String, Value>, key: &str) -> Result<String, String> {
    match object.shift_remove(key) {
        Some(Value::String(s)) if !s.trim().is_empty() => Ok(s),
        Some(Value::String(_)) => Err(format!("empty {key}")),
        Some(Value::Null) | None => Err(format!("missing field {key}")),
        Some(_) => Err(format!("{key} must be a string")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRecord {
    pub line: usize,
    pub review_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub accepted: usize,
    pub skipped: Vec<SkippedRecord>,
}

/// In-memory review store backed by an append log plus an index file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReviewStore {
    records: Vec<ReviewRecord>,
}

impl ReviewStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: Vec<ReviewRecord>) -> Self {
        ReviewStore { records }
    }

    pub fn records(&self) -> &[ReviewRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ReviewRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, record: ReviewRecord) {
        self.records.push(record);
    }

    /// Writes every record as one JSON line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, &r.to_json())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Rewrites `dir/reviews.jsonl` and `dir/index.jsonl`.
    pub fn save(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut log = BufWriter::new(File::create(dir.join(REVIEWS_FILE))?);
        self.write_jsonl(&mut log)?;
        log.flush()?;
        let mut index = BufWriter::new(File::create(dir.join(INDEX_FILE))?);
        for (line, r) in self.records.iter().enumerate() {
            let entry = serde_json::json!({
                "market": r.market.as_str(),
                "review_id": r.review_id,
                "line": line,
            });
            serde_json::to_writer(&mut index, &entry)?;
            index.write_all(b"\n")?;
        }
        index.flush()
    }

    /// Loads a store previously written by [`ReviewStore::save`]. Records are
    /// re-validated against their own market.
    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let path = dir.join(REVIEWS_FILE);
        let file = File::open(&path).map_err(|source| CorpusError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        let mut store = ReviewStore::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let object: Map<String, Value> = serde_json::from_str(&line).map_err(|e| {
                CorpusError::Io(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: {e}", path.display(), i + 1),
                ))
            })?;
            let market = match object.get("market") {
                Some(Value::String(s)) => s.parse()?,
                _ => return Err(CorpusError::InvalidMarket(String::new())),
            };
            let record = ReviewRecord::from_json(object, &market).map_err(|reason| {
                CorpusError::Io(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: {reason}", path.display(), i + 1),
                ))
            })?;
            store.push(record);
        }
        Ok(store)
    }
}

/// Reads JSON-lines review records from `source`, appending the valid ones
/// to `store`. Malformed or invalid records are skipped and reported.
pub fn import_reviews<R: BufRead>(
    source: R,
    market: &MarketId,
    store: &mut ReviewStore,
) -> Result<ImportReport, CorpusError> {
    let mut report = ImportReport::default();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let object: Map<String, Value> = match serde_json::from_str(&line) {
            Ok(o) => o,
            Err(e) => {
                report.skipped.push(SkippedRecord {
                    line: line_no,
                    review_id: None,
                    reason: format!("malformed json: {e}"),
                });
                continue;
            }
        };
        let review_id = object
            .get("review_id")
            .and_then(Value::as_str)
            .map(str::to_string);
        match ReviewRecord::from_json(object, market) {
            Ok(record) => {
                store.push(record);
                report.accepted += 1;
            }
            Err(reason) => report.skipped.push(SkippedRecord {
                line: line_no,
                review_id,
                reason,
            }),
        }
    }
    Ok(report)
}

/// Keeps one record per `(market, review_id)`, the one with the earliest
/// timestamp (first occurrence on ties). Returns how many were removed.
pub fn dedup_reviews(store: &mut ReviewStore) -> usize {
    let mut best: HashMap<(MarketId, String), usize> = HashMap::new();
    for (i, r) in store.records.iter().enumerate() {
        let key = (r.market.clone(), r.review_id.clone());
        match best.get(&key) {
            Some(&j) if store.records[j].timestamp <= r.timestamp => {}
            _ => {
                best.insert(key, i);
            }
        }
    }
    let keep: HashSet<usize> = best.into_values().collect();
    let before = store.records.len();
    let mut idx = 0;
    store.records.retain(|_| {
        let k = keep.contains(&idx);
        idx += 1;
        k
    });
    before - store.records.len()
}

/// Reads an apps JSON-lines file, enforcing unique `(market, app_id)` and a
/// non-empty category.
pub fn load_apps<R: BufRead>(source: R) -> Result<Vec<AppRecord>, CorpusError> {
    let mut apps = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let app: AppRecord = serde_json::from_str(&line).map_err(|e| CorpusError::InvalidApp {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if app.category.trim().is_empty() {
            return Err(CorpusError::InvalidApp {
                line: i + 1,
                reason: "empty category".into(),
            });
        }
        if app.app_id.trim().is_empty() {
            return Err(CorpusError::InvalidApp {
                line: i + 1,
                reason: "empty app_id".into(),
            });
        }
        if !seen.insert((app.market.clone(), app.app_id.clone())) {
            return Err(CorpusError::DuplicateApp {
                market: app.market,
                app_id: app.app_id,
            });
        }
        apps.push(app);
    }
    Ok(apps)
}

pub fn write_apps<W: Write>(apps: &[AppRecord], mut out: W) -> io::Result<()> {
    for a in apps {
        serde_json::to_writer(&mut out, a)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Apps and reviews loaded together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub apps: Vec<AppRecord>,
    pub reviews: ReviewStore,
}

impl Corpus {
    /// Loads `reviews.jsonl` and, when present, `apps.jsonl` from `dir`.
    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let reviews = ReviewStore::load(dir)?;
        let apps_path = dir.join(APPS_FILE);
        let apps = if apps_path.exists() {
            load_apps(BufReader::new(File::open(apps_path)?))?
        } else {
            Vec::new()
        };
        Ok(Corpus { apps, reviews })
    }

    /// Category of a review: its own field, else its app's category.
    pub fn category_of(&self, review: &ReviewRecord) -> Option<String> {
        if let Some(c) = &review.category {
            return Some(c.clone());
        }
        self.apps
            .iter()
            .find(|a| a.market == review.market && a.app_id == review.app_id)
            .map(|a| a.category.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsRow {
    pub key: String,
    pub apps: u64,
    pub apps_with_red_packets: u64,
    /// Apps with red packets among this row's apps.
    pub red_packet_pct: Option<Percent>,
    /// This row's apps as a share of all apps.
    pub app_share: Option<Percent>,
    pub reviews: u64,
    /// This row's reviews as a share of all reviews.
    pub review_share: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub markets: Vec<StatsRow>,
    pub categories: Vec<StatsRow>,
    pub total: StatsRow,
}

#[derive(Default)]
struct Tally {
    apps: u64,
    red: u64,
    reviews: u64,
}

fn finish_rows<K: Ord>(
    tallies: BTreeMap<K, (String, Tally)>,
    total_apps: u64,
    total_reviews: u64,
) -> Vec<StatsRow> {
    tallies
        .into_values()
        .map(|(key, t)| StatsRow {
            key,
            apps: t.apps,
            apps_with_red_packets: t.red,
            red_packet_pct: Percent::of(t.red, t.apps),
            app_share: Percent::of(t.apps, total_apps),
            reviews: t.reviews,
            review_share: Percent::of(t.reviews, total_reviews),
        })
        .collect()
}

/// Per-market and per-category app and review counts.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut markets: BTreeMap<MarketId, (String, Tally)> = BTreeMap::new();
    let mut categories: BTreeMap<String, (String, Tally)> = BTreeMap::new();
    let mut app_category: HashMap<(&MarketId, &str), &str> = HashMap::new();
    let mut total = Tally::default();

    for app in &corpus.apps {
        app_category.insert((&app.market, app.app_id.as_str()), app.category.as_str());
        let red = app.has_red_packet as u64;
        let m = markets
            .entry(app.market.clone())
            .or_insert_with(|| (app.market.display_name().to_string(), Tally::default()));
        m.1.apps += 1;
        m.1.red += red;
        let c = categories
            .entry(app.category.clone())
            .or_insert_with(|| (app.category.clone(), Tally::default()));
        c.1.apps += 1;
        c.1.red += red;
        total.apps += 1;
        total.red += red;
    }
    for r in corpus.reviews.records() {
        markets
            .entry(r.market.clone())
            .or_insert_with(|| (r.market.display_name().to_string(), Tally::default()))
            .1
            .reviews += 1;
        let category = r
            .category
            .as_deref()
            .or_else(|| app_category.get(&(&r.market, r.app_id.as_str())).copied())
            .unwrap_or("uncategorized")
            .to_string();
        categories
            .entry(category.clone())
            .or_insert_with(|| (category, Tally::default()))
            .1
            .reviews += 1;
        total.reviews += 1;
    }

    let (ta, tr) = (total.apps, total.reviews);
    CorpusStats {
        markets: finish_rows(markets, ta, tr),
        categories: finish_rows(categories, ta, tr),
        total: StatsRow {
            key: "Total".into(),
            apps: ta,
            apps_with_red_packets: total.red,
            red_packet_pct: Percent::of(total.red, ta),
            app_share: Percent::of(ta, ta),
            reviews: tr,
            review_share: Percent::of(tr, tr),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn line(id: &str, rating: i64, ts: i64) -> String {
        json!({
            "review_id": id, "app_id": "app1", "market": "tencent",
            "category": "video", "rating": rating, "text": "red packet never arrived",
            "language": "en", "likes": 3, "timestamp": ts
        })
        .to_string()
    }

    fn import(lines: &[String]) -> (ReviewStore, ImportReport) {
        let mut store = ReviewStore::new();
        let src = lines.join("\n");
        let report = import_reviews(src.as_bytes(), &MarketId::Tencent, &mut store).unwrap();
        (store, report)
    }

    #[test]
    fn market_labels_parse() {
        assert_eq!(
            "Google Play".parse::<MarketId>().unwrap(),
            MarketId::GooglePlay
        );
        assert_eq!(
            "google_play".parse::<MarketId>().unwrap(),
            MarketId::GooglePlay
        );
        assert_eq!(
            "Vivo".parse::<MarketId>().unwrap(),
            MarketId::Other("vivo".into())
        );
        assert!("  ".parse::<MarketId>().is_err());
    }

    #[test]
    fn accepts_valid_records() {
        let (store, report) = import(&[line("1", 1, 10), line("2", 5, 11), line("3", 3, 12)]);
        assert_eq!(report.accepted, 3);
        assert!(report.skipped.is_empty());
        assert_eq!(store.len(), 3);
    }

    #[test]
    fn rejects_rating_zero_with_reason() {
        let (store, report) = import(&[line("1", 0, 10)]);
        assert_eq!(report.accepted, 0);
        assert_eq!(store.len(), 0);
        assert_eq!(report.skipped[0].reason, "rating out of range");
        assert_eq!(report.skipped[0].review_id.as_deref(), Some("1"));
    }

    #[test]
    fn rejects_blank_text_and_bad_json() {
        let blank = json!({"review_id": "x", "app_id": "a", "rating": 2, "text": "   ",
            "language": "en", "timestamp": 1})
        .to_string();
        let (_, report) = import(&[blank, "{not json".into(), line("ok", 2, 1)]);
        assert_eq!(report.accepted, 1);
        assert_eq!(report.skipped[0].reason, "empty text");
        assert!(report.skipped[1].reason.starts_with("malformed json"));
    }

    #[test]
    fn rejects_market_mismatch() {
        let other = json!({"review_id": "x", "app_id": "a", "market": "huawei", "rating": 2,
            "text": "t", "language": "en", "timestamp": 1})
        .to_string();
        let (_, report) = import(&[other]);
        assert!(report.skipped[0].reason.starts_with("market mismatch"));
    }

    #[test]
    fn missing_market_takes_import_market() {
        let rec = json!({"review_id": "x", "app_id": "a", "rating": 2,
            "text": "t", "language": "zh", "timestamp": 1})
        .to_string();
        let (store, _) = import(&[rec]);
        assert_eq!(store.records()[0].market, MarketId::Tencent);
        assert_eq!(store.records()[0].likes, 0);
    }

    #[test]
    fn dedup_keeps_earliest() {
        let (mut store, _) = import(&[line("1", 1, 20), line("1", 2, 10), line("2", 1, 5)]);
        assert_eq!(dedup_reviews(&mut store), 1);
        assert_eq!(store.len(), 2);
        let kept = store.records().iter().find(|r| r.review_id == "1").unwrap();
        assert_eq!(kept.timestamp, 10);
    }

    #[test]
    fn dedup_distinct_keys_removes_nothing() {
        let (mut store, _) = import(&[line("1", 1, 20), line("2", 2, 10)]);
        assert_eq!(dedup_reviews(&mut store), 0);
    }

    #[test]
    fn unknown_keys_round_trip() {
        let src = r#"{"review_id":"9","app_id":"a","market":"tencent","rating":1,"text":"红包 没有到账 ","language":"zh","likes":0,"timestamp":7,"device":"pixel","nested":{"a":[1,2]}}"#;
        let mut store = ReviewStore::new();
        import_reviews(src.as_bytes(), &MarketId::Tencent, &mut store).unwrap();
        let mut out = Vec::new();
        store.write_jsonl(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().trim_end(), src);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let (store, _) = import(&[line("1", 1, 20), line("2", 4, 10)]);
        store.save(dir.path()).unwrap();
        let index = fs::read_to_string(dir.path().join(INDEX_FILE)).unwrap();
        assert_eq!(index.lines().count(), 2);
        assert_eq!(ReviewStore::load(dir.path()).unwrap(), store);
    }

    #[test]
    fn missing_store_is_unreadable() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            ReviewStore::load(&dir.path().join("nope")),
            Err(CorpusError::Unreadable { .. })
        ));
    }

    #[test]
    fn duplicate_apps_rejected() {
        let src = "{\"app_id\":\"a\",\"market\":\"xiaomi\",\"category\":\"news\"}\n\
                   {\"app_id\":\"a\",\"market\":\"xiaomi\",\"category\":\"news\"}";
        assert!(matches!(
            load_apps(src.as_bytes()),
            Err(CorpusError::DuplicateApp { .. })
        ));
    }

    #[test]
    fn empty_corpus_stats_are_zero() {
        let stats = corpus_stats(&Corpus::default());
        assert!(stats.markets.is_empty());
        assert_eq!(stats.total.apps, 0);
        assert_eq!(stats.total.reviews, 0);
        assert_eq!(stats.total.red_packet_pct, None);
    }
}
