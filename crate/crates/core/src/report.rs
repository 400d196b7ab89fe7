//! Distribution tables, hot words, word-cloud export and anti-virus
//! verdicts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, MarketId};
use crate::filter::RedPacketReview;
use crate::percent::{display_opt, Percent};
use crate::sentiment::{ClassifiedReview, Label};
use crate::summarize::ClusterSummary;
use crate::text::{words, Stopwords};

pub const DEFAULT_HOT_WORD_MIN_FREQ: u64 = 50;
pub const MALICIOUS_MIN_FLAGS: u64 = 3;
pub const UNCATEGORIZED: &str = "uncategorized";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{} red-packet reviews have no classification: {}", .0.len(), preview(.0))]
    Unclassified(Vec<String>),
    #[error("app {app_id}: negative engine flag count {flags}")]
    NegativeFlags { app_id: String, flags: i64 },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn preview(ids: &[String]) -> String {
    let mut s = ids.iter().take(10).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > 10 {
        s.push_str(", ...");
    }
    s
}

/// Raw counts behind one distribution row. `user_reviews` and
/// `low_ratings` are optional because category count fixtures do not
/// always carry them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCounts {
    pub key: String,
    #[serde(default)]
    pub user_reviews: Option<u64>,
    pub red_packet_reviews: u64,
    #[serde(default)]
    pub low_ratings: Option<u64>,
    pub negative_reviews: u64,
    pub apps_with_red_packets: u64,
    pub apps_with_negative: u64,
}

/// One row of the market or category table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistributionRow {
    pub key: String,
    pub user_reviews: Option<u64>,
    pub red_packet_reviews: u64,
    pub low_ratings: Option<u64>,
    pub low_rating_pct: Option<Percent>,
    pub negative_reviews: u64,
    pub negative_pct: Option<Percent>,
    pub apps_with_red_packets: u64,
    pub apps_with_negative: u64,
    pub app_pct: Option<Percent>,
}

pub type MarketRow = DistributionRow;

impl DistributionRow {
    pub fn from_counts(c: RowCounts) -> Self {
        DistributionRow {
            low_rating_pct: c
                .low_ratings
                .and_then(|l| Percent::of(l, c.red_packet_reviews)),
            negative_pct: Percent::of(c.negative_reviews, c.red_packet_reviews),
            app_pct: Percent::of(c.apps_with_negative, c.apps_with_red_packets),
            key: c.key,
            user_reviews: c.user_reviews,
            red_packet_reviews: c.red_packet_reviews,
            low_ratings: c.low_ratings,
            negative_reviews: c.negative_reviews,
            apps_with_red_packets: c.apps_with_red_packets,
            apps_with_negative: c.apps_with_negative,
        }
    }

    pub fn counts(&self) -> RowCounts {
        RowCounts {
            key: self.key.clone(),
            user_reviews: self.user_reviews,
            red_packet_reviews: self.red_packet_reviews,
            low_ratings: self.low_ratings,
            negative_reviews: self.negative_reviews,
            apps_with_red_packets: self.apps_with_red_packets,
            apps_with_negative: self.apps_with_negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistributionTable {
    /// Name of the key column: `market` or `category`.
    pub key_name: String,
    pub rows: Vec<DistributionRow>,
    pub total: DistributionRow,
}

fn sum_opt(values: impl Iterator<Item = Option<u64>>) -> Option<u64> {
    values.sum()
}

impl DistributionTable {
    /// Builds rows and a column-sum totals row from raw counts.
    pub fn from_counts(key_name: &str, counts: Vec<RowCounts>) -> Self {
        let total = RowCounts {
            key: "Total".into(),
            user_reviews: sum_opt(counts.iter().map(|c| c.user_reviews)),
            red_packet_reviews: counts.iter().map(|c| c.red_packet_reviews).sum(),
            low_ratings: sum_opt(counts.iter().map(|c| c.low_ratings)),
            negative_reviews: counts.iter().map(|c| c.negative_reviews).sum(),
            apps_with_red_packets: counts.iter().map(|c| c.apps_with_red_packets).sum(),
            apps_with_negative: counts.iter().map(|c| c.apps_with_negative).sum(),
        };
        DistributionTable {
            key_name: key_name.to_string(),
            rows: counts
                .into_iter()
                .map(DistributionRow::from_counts)
                .collect(),
            total: DistributionRow::from_counts(total),
        }
    }

    pub fn row(&self, key: &str) -> Option<&DistributionRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    /// Reads raw counts from CSV with a header naming the key column first,
    /// followed by the `RowCounts` fields. Empty optional fields are absent.
    /// A `Total` row is skipped; totals are always recomputed.
    pub fn read_counts_csv<R: io::Read>(input: R) -> Result<Self, ReportError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let key_name = headers.get(0).unwrap_or("key").to_string();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let mut counts = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            if rec.get(0).is_some_and(|k| k.trim() == "Total") {
                continue;
            }
            let get = |name: &str| -> Result<Option<u64>, ReportError> {
                match col(name).and_then(|c| rec.get(c)).map(str::trim) {
                    None | Some("") => Ok(None),
                    Some(v) => {
                        v.replace(',', "")
                            .parse()
                            .map(Some)
                            .map_err(|_| ReportError::Parse {
                                line,
                                reason: format!("{name}: not a count: {v:?}"),
                            })
                    }
                }
            };
            let req = |name: &str| -> Result<u64, ReportError> {
                get(name)?.ok_or_else(|| ReportError::Parse {
                    line,
                    reason: format!("missing {name}"),
                })
            };
            counts.push(RowCounts {
                key: rec.get(0).unwrap_or("").to_string(),
                user_reviews: get("user_reviews")?,
                red_packet_reviews: req("red_packet_reviews")?,
                low_ratings: get("low_ratings")?,
                negative_reviews: req("negative_reviews")?,
                apps_with_red_packets: req("apps_with_red_packets")?,
                apps_with_negative: req("apps_with_negative")?,
            });
        }
        Ok(Self::from_counts(&key_name, counts))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            self.key_name.as_str(),
            "user_reviews",
            "red_packet_reviews",
            "low_ratings",
            "low_rating_pct",
            "negative_reviews",
            "negative_pct",
            "apps_with_red_packets",
            "apps_with_negative",
            "app_pct",
        ])?;
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            w.write_record([
                r.key.clone(),
                r.user_reviews.map(|v| v.to_string()).unwrap_or_default(),
                r.red_packet_reviews.to_string(),
                r.low_ratings.map(|v| v.to_string()).unwrap_or_default(),
                display_opt(r.low_rating_pct),
                r.negative_reviews.to_string(),
                display_opt(r.negative_pct),
                r.apps_with_red_packets.to_string(),
                r.apps_with_negative.to_string(),
                display_opt(r.app_pct),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let header = vec![
            self.key_name.clone(),
            "User reviews".into(),
            "Red-packet".into(),
            "Low rating".into(),
            "Negative".into(),
            "Neg %".into(),
            "Apps".into(),
            "Apps neg".into(),
            "App %".into(),
        ];
        let body = self
            .rows
            .iter()
            .chain(std::iter::once(&self.total))
            .map(|r| {
                vec![
                    r.key.clone(),
                    r.user_reviews.map(thousands).unwrap_or_else(|| "-".into()),
                    thousands(r.red_packet_reviews),
                    r.low_ratings.map(thousands).unwrap_or_else(|| "-".into()),
                    thousands(r.negative_reviews),
                    opt_or_dash(r.negative_pct),
                    thousands(r.apps_with_red_packets),
                    thousands(r.apps_with_negative),
                    opt_or_dash(r.app_pct),
                ]
            })
            .collect();
        align(header, body)
    }
}

fn opt_or_dash(p: Option<Percent>) -> String {
    p.map(|p| p.to_string()).unwrap_or_else(|| "-".into())
}

/// `54763` → `54,763`.
pub fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Left-aligns the first column and right-aligns the rest.
fn align(header: Vec<String>, body: Vec<Vec<String>>) -> String {
    let cols = header.len();
    let mut widths = vec![0; cols];
    for row in std::iter::once(&header).chain(&body) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&body) {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    format!("{c:<w$}", w = widths[i])
                } else {
                    format!("{c:>w$}", w = widths[i])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

type ClassKey = (MarketId, String);

fn classification_map(classifications: &[ClassifiedReview]) -> HashMap<ClassKey, Label> {
    classifications
        .iter()
        .map(|c| ((c.market.clone(), c.review_id.clone()), c.label))
        .collect()
}

#[derive(Default)]
struct Acc {
    user_reviews: u64,
    red_packet_reviews: u64,
    low_ratings: u64,
    negative_reviews: u64,
    red_packet_apps: BTreeSet<(MarketId, String)>,
    negative_apps: BTreeSet<(MarketId, String)>,
}

impl Acc {
    fn counts(self, key: String) -> RowCounts {
        RowCounts {
            key,
            user_reviews: Some(self.user_reviews),
            red_packet_reviews: self.red_packet_reviews,
            low_ratings: Some(self.low_ratings),
            negative_reviews: self.negative_reviews,
            apps_with_red_packets: self.red_packet_apps.len() as u64,
            apps_with_negative: self.negative_apps.len() as u64,
        }
    }
}

fn distribution<K: Ord + Clone>(
    key_name: &str,
    corpus: &Corpus,
    red_packet: &[RedPacketReview],
    classifications: &[ClassifiedReview],
    app_key: impl Fn(&MarketId, &str, Option<&str>) -> K,
    label_of: impl Fn(&K) -> String,
) -> Result<DistributionTable, ReportError> {
    let labels = classification_map(classifications);
    let missing: Vec<String> = red_packet
        .iter()
        .filter(|r| !labels.contains_key(&(r.market.clone(), r.review_id.clone())))
        .map(|r| r.review_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::Unclassified(missing));
    }

    let app_category: HashMap<(&MarketId, &str), &str> = corpus
        .apps
        .iter()
        .map(|a| ((&a.market, a.app_id.as_str()), a.category.as_str()))
        .collect();
    let category = |market: &MarketId, app_id: &str, own: Option<&str>| -> Option<String> {
        own.or_else(|| app_category.get(&(market, app_id)).copied())
            .map(str::to_string)
    };

    let mut acc: BTreeMap<K, Acc> = BTreeMap::new();
    for app in corpus.apps.iter().filter(|a| a.has_red_packet) {
        let k = app_key(&app.market, &app.app_id, Some(&app.category));
        acc.entry(k)
            .or_default()
            .red_packet_apps
            .insert((app.market.clone(), app.app_id.clone()));
    }
    for r in corpus.reviews.records() {
        let cat = category(&r.market, &r.app_id, r.category.as_deref());
        acc.entry(app_key(&r.market, &r.app_id, cat.as_deref()))
            .or_default()
            .user_reviews += 1;
    }
    for r in red_packet {
        let cat = category(&r.market, &r.app_id, r.category.as_deref());
        let a = acc
            .entry(app_key(&r.market, &r.app_id, cat.as_deref()))
            .or_default();
        a.red_packet_reviews += 1;
        a.low_ratings += r.is_low_rating() as u64;
        // an app with red-packet reviews has red packets even if the app
        // list does not say so
        a.red_packet_apps
            .insert((r.market.clone(), r.app_id.clone()));
        if labels[&(r.market.clone(), r.review_id.clone())] == Label::Negative {
            a.negative_reviews += 1;
            a.negative_apps.insert((r.market.clone(), r.app_id.clone()));
        }
    }
    let counts = acc
        .into_iter()
        .map(|(k, a)| a.counts(label_of(&k)))
        .collect();
    Ok(DistributionTable::from_counts(key_name, counts))
}

/// Table of red-packet and negative review counts per market.
pub fn market_distribution(
    corpus: &Corpus,
    red_packet: &[RedPacketReview],
    classifications: &[ClassifiedReview],
) -> Result<DistributionTable, ReportError> {
    distribution(
        "market",
        corpus,
        red_packet,
        classifications,
        |m, _, _| m.clone(),
        |m| m.display_name().to_string(),
    )
}

/// Same as [`market_distribution`], keyed by app category.
pub fn category_distribution(
    corpus: &Corpus,
    red_packet: &[RedPacketReview],
    classifications: &[ClassifiedReview],
) -> Result<DistributionTable, ReportError> {
    distribution(
        "category",
        corpus,
        red_packet,
        classifications,
        |_, _, c| c.unwrap_or(UNCATEGORIZED).to_string(),
        |c| c.clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FraudRow {
    pub cluster_id: usize,
    pub summary: String,
    pub count: u64,
    pub pct: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FraudTable {
    pub rows: Vec<FraudRow>,
    pub total: u64,
}

/// Per-cluster counts of negative reviews and their share of all
/// negatives, largest first (ties by cluster id).
pub fn fraud_category_table(cluster_sizes: &[u64], summaries: &[ClusterSummary]) -> FraudTable {
    let total: u64 = cluster_sizes.iter().sum();
    let summary_of: HashMap<usize, &str> = summaries
        .iter()
        .map(|s| (s.cluster_id, s.summary.as_str()))
        .collect();
    let mut rows: Vec<FraudRow> = cluster_sizes
        .iter()
        .enumerate()
        .map(|(id, &count)| FraudRow {
            cluster_id: id,
            summary: summary_of.get(&id).copied().unwrap_or("").to_string(),
            count,
            pct: Percent::of(count, total),
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.cluster_id.cmp(&b.cluster_id)));
    FraudTable { rows, total }
}

impl FraudTable {
    /// Reads `cluster_id,summary,count` rows.
    pub fn read_counts_csv<R: io::Read>(input: R) -> Result<Self, ReportError> {
        #[derive(Deserialize)]
        struct Rec {
            cluster_id: usize,
            summary: String,
            count: u64,
        }
        let mut sizes = Vec::new();
        let mut summaries = Vec::new();
        for (i, rec) in csv::Reader::from_reader(input)
            .deserialize::<Rec>()
            .enumerate()
        {
            let rec = rec?;
            if rec.cluster_id != i {
                return Err(ReportError::Parse {
                    line: i + 2,
                    reason: format!("cluster ids must be 0.., found {}", rec.cluster_id),
                });
            }
            sizes.push(rec.count);
            summaries.push(ClusterSummary {
                cluster_id: rec.cluster_id,
                summary: rec.summary,
                method: crate::summarize::SummaryMethod::Extractive,
                sample_size: 0,
            });
        }
        Ok(fraud_category_table(&sizes, &summaries))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["cluster_id", "summary", "count", "pct"])?;
        for r in &self.rows {
            w.write_record([
                r.cluster_id.to_string(),
                r.summary.clone(),
                r.count.to_string(),
                display_opt(r.pct),
            ])?;
        }
        w.write_record([
            "",
            "Total",
            &self.total.to_string(),
            &display_opt(Percent::of(self.total, self.total)),
        ])?;
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let header = vec!["Fraud category".to_string(), "Count".into(), "Share".into()];
        let mut body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.summary.clone(), thousands(r.count), opt_or_dash(r.pct)])
            .collect();
        body.push(vec![
            "Total".into(),
            thousands(self.total),
            opt_or_dash(Percent::of(self.total, self.total)),
        ]);
        align(header, body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotWord {
    pub term: String,
    pub frequency: u64,
}

/// Word frequencies over `texts` after lowercasing and stopword removal.
/// Pure numbers are not words and are skipped. Terms below `min_freq` are
/// dropped; the rest are sorted by frequency descending, then term.
pub fn hot_words<S: AsRef<str>>(texts: &[S], min_freq: u64, stopwords: &Stopwords) -> Vec<HotWord> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for t in texts {
        for w in words(t.as_ref()) {
            if stopwords.contains(&w) || w.chars().all(|c| c.is_numeric()) {
                continue;
            }
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    let mut out: Vec<HotWord> = counts
        .into_iter()
        .filter(|&(_, f)| f >= min_freq)
        .map(|(term, frequency)| HotWord { term, frequency })
        .collect();
    out.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.term.cmp(&b.term))
    });
    out
}

/// Word-cloud input: `term,weight` with weight equal to frequency.
pub fn write_wordcloud_csv<W: Write>(words: &[HotWord], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "weight"])?;
    for h in words {
        w.write_record([h.term.as_str(), &h.frequency.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvFlags {
    pub app_id: String,
    pub engine_flags: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvVerdict {
    pub app_id: String,
    pub engine_flags: u64,
    pub malicious: bool,
}

impl AvVerdict {
    pub fn new(app_id: impl Into<String>, engine_flags: u64) -> Self {
        AvVerdict {
            app_id: app_id.into(),
            engine_flags,
            malicious: engine_flags >= MALICIOUS_MIN_FLAGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AvReport {
    pub verdicts: Vec<AvVerdict>,
    /// Number of apps per flag count.
    pub histogram: BTreeMap<u64, u64>,
    pub zero_flag_apps: u64,
    pub zero_flag_pct: Option<Percent>,
    pub malicious_apps: u64,
    pub malicious_pct: Option<Percent>,
}

pub fn av_verdicts(flags: &[AvFlags]) -> Result<AvReport, ReportError> {
    let mut verdicts = Vec::with_capacity(flags.len());
    for f in flags {
        let n = u64::try_from(f.engine_flags).map_err(|_| ReportError::NegativeFlags {
            app_id: f.app_id.clone(),
            flags: f.engine_flags,
        })?;
        verdicts.push(AvVerdict::new(f.app_id.clone(), n));
    }
    let mut histogram = BTreeMap::new();
    for v in &verdicts {
        *histogram.entry(v.engine_flags).or_insert(0) += 1;
    }
    let n = verdicts.len() as u64;
    let zero = histogram.get(&0).copied().unwrap_or(0);
    let malicious = verdicts.iter().filter(|v| v.malicious).count() as u64;
    Ok(AvReport {
        verdicts,
        histogram,
        zero_flag_apps: zero,
        zero_flag_pct: Percent::of(zero, n),
        malicious_apps: malicious,
        malicious_pct: Percent::of(malicious, n),
    })
}

/// Reads `{app_id, engine_flags}` JSON lines.
pub fn read_av_flags<R: BufRead>(input: R) -> Result<Vec<AvFlags>, ReportError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ReportError::Parse {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

impl AvReport {
    pub fn write_histogram_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["engine_flags", "apps"])?;
        for (flags, apps) in &self.histogram {
            w.write_record([flags.to_string(), apps.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_verdicts_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["app_id", "engine_flags", "malicious"])?;
        for v in &self.verdicts {
            w.write_record([
                v.app_id.as_str(),
                &v.engine_flags.to_string(),
                &v.malicious.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
