//! Seeded generators for synthetic corpora and point sets.
//!
//! Every generator returns the plan it was built from (labels, planted
//! segments, malformed counts), so tests can check pipeline output against
//! it. The bundled demo corpus is produced by [`demo_corpus`].

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

use crate::corpus::{AppRecord, MarketId, ReviewRecord};
use crate::sentiment::{Label, LabeledText, Provenance};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A raw review line in the import format.
#[allow(clippy::too_many_arguments)]
pub fn review_json(
    review_id: &str,
    app_id: &str,
    market: &MarketId,
    category: &str,
    rating: u8,
    text: &str,
    language: &str,
    timestamp: i64,
) -> Value {
    json!({
        "review_id": review_id,
        "app_id": app_id,
        "market": market.as_str(),
        "category": category,
        "rating": rating,
        "text": text,
        "language": language,
        "likes": 0,
        "timestamp": timestamp,
    })
}

#[derive(Debug, Clone)]
pub struct ImportFixture {
    pub lines: Vec<String>,
    pub malformed: usize,
    pub duplicates: usize,
}

/// `total` JSON lines for one market, of which `malformed` violate the
/// schema and `duplicates` repeat an earlier review id with a later
/// timestamp.
pub fn import_fixture(
    total: usize,
    malformed: usize,
    duplicates: usize,
    market: &MarketId,
    seed: u64,
) -> ImportFixture {
    assert!(
        malformed + duplicates <= total,
        "more special lines than total"
    );
    let mut r = rng(seed);
    let distinct = total - malformed - duplicates;
    assert!(
        duplicates == 0 || distinct > 0,
        "duplicates need an original"
    );
    let mut lines = Vec::with_capacity(total);
    for i in 0..distinct {
        let text = format!("review number {i} about the app");
        lines.push(
            review_json(
                &format!("r{i}"),
                "app1",
                market,
                "video",
                r.random_range(1..=5),
                &text,
                "en",
                1_600_000_000 + i as i64,
            )
            .to_string(),
        );
    }
    for d in 0..duplicates {
        let orig = r.random_range(0..distinct);
        let text = format!("edited review number {orig}");
        lines.push(
            review_json(
                &format!("r{orig}"),
                "app1",
                market,
                "video",
                3,
                &text,
                "en",
                1_700_000_000 + d as i64,
            )
            .to_string(),
        );
    }
    for m in 0..malformed {
        let id = format!("bad{m}");
        let line = match m % 4 {
            0 => review_json(&id, "app1", market, "video", 0, "zero rating", "en", 1).to_string(),
            1 => review_json(&id, "app1", market, "video", 3, "   ", "en", 1).to_string(),
            2 => json!({"review_id": id, "app_id": "app1", "rating": 3, "text": "no timestamp", "language": "en"}).to_string(),
            _ => format!("{{\"review_id\": \"{id}\", broken"),
        };
        lines.push(line);
    }
    // duplicates must follow their originals so "earliest kept" is testable
    // regardless of shuffling: shuffle only the distinct + malformed part
    let (head, tail) = lines.split_at_mut(distinct);
    head.shuffle(&mut r);
    tail.shuffle(&mut r);
    ImportFixture {
        lines,
        malformed,
        duplicates,
    }
}

const NEG_WORDS: [&str; 12] = [
    "scam", "useless", "never", "cannot", "fraud", "terrible", "cheated", "worst", "refuses",
    "stuck", "awful", "liars",
];
const POS_WORDS: [&str; 12] = [
    "great",
    "easy",
    "received",
    "love",
    "quick",
    "smooth",
    "happy",
    "generous",
    "fun",
    "instantly",
    "excellent",
    "nice",
];
const SHARED: [&str; 6] = [
    "red packet",
    "gold coins",
    "the app",
    "my account",
    "this week",
    "the bonus",
];

fn templated(words: &[&str], r: &mut ChaCha8Rng) -> String {
    let a = words.choose(r).unwrap();
    let b = words.choose(r).unwrap();
    let s = SHARED.choose(r).unwrap();
    match r.random_range(0..3) {
        0 => format!("{s} is {a} and {b}"),
        1 => format!("{a} {s} {b}"),
        _ => format!("{a} experience with {s} so {b}"),
    }
}

/// Labelled texts whose sentiment words come from disjoint vocabularies.
/// Negatives come first, then non-negatives.
pub fn separable_corpus(per_class: usize, seed: u64) -> Vec<LabeledText> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(per_class * 2);
    for (label, vocab, tag) in [
        (Label::Negative, &NEG_WORDS, "neg"),
        (Label::NonNegative, &POS_WORDS, "pos"),
    ] {
        for i in 0..per_class {
            out.push(LabeledText {
                review_id: format!("{tag}{i}"),
                text: templated(vocab, &mut r),
                label,
                provenance: Provenance::Synthetic,
            });
        }
    }
    out
}

/// `per_blob` points around each of `blobs` centres drawn uniformly from
/// `[-10, 10]^dims`, with isotropic noise of standard deviation `spread`.
pub fn gaussian_blobs(
    blobs: usize,
    per_blob: usize,
    dims: usize,
    spread: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut r = rng(seed);
    let centres: Vec<Vec<f64>> = (0..blobs)
        .map(|_| (0..dims).map(|_| r.random_range(-10.0..10.0)).collect())
        .collect();
    let noise = Normal::new(0.0, spread).expect("finite spread");
    let mut points = Vec::with_capacity(blobs * per_blob);
    let mut labels = Vec::with_capacity(blobs * per_blob);
    for (b, c) in centres.iter().enumerate() {
        for _ in 0..per_blob {
            points.push(c.iter().map(|x| x + noise.sample(&mut r)).collect());
            labels.push(b);
        }
    }
    (points, labels)
}

/// Sentences with no default keyword in them.
pub const FILLER_EN: [&str; 10] = [
    "The interface looks clean",
    "I open it every morning",
    "Videos load fast on my phone",
    "The night mode is pleasant",
    "Customer support answered politely",
    "Battery use seems fine",
    "The latest update fixed the crash",
    "Fonts are easy to read",
    "I like the playlist feature",
    "Search works as expected",
];
pub const FILLER_ZH: [&str; 5] = [
    "界面很漂亮",
    "视频很清晰",
    "更新以后很流畅",
    "每天都在用",
    "字体看起来舒服",
];
pub const PLANTED_EN: [&str; 10] = [
    "my red packet never arrived",
    "the gold coin balance is tiny",
    "I cannot withdraw anything",
    "this is a scam",
    "they lie about the bonus",
    "the cash out threshold keeps rising",
    "inviting friends gives no reward",
    "false advertising everywhere",
    "hongbao disappeared after a day",
    "only pennies per task",
];
pub const PLANTED_ZH: [&str; 5] = [
    "红包一直不到账",
    "金币太少了",
    "提现门槛太高",
    "全是套路",
    "邀请好友也没用",
];

#[derive(Debug, Clone)]
pub struct PlantedReview {
    pub record: ReviewRecord,
    /// The keyword-bearing segments, in order.
    pub planted: Vec<String>,
}

/// Reviews mixing keyword-bearing and filler segments.
pub fn planted_segment_corpus(n: usize, seed: u64) -> Vec<PlantedReview> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let zh = r.random_bool(0.3);
            let (fill, plant, delims): (&[&str], &[&str], &[&str]) = if zh {
                (&FILLER_ZH, &PLANTED_ZH, &["，", "。", "！", "；"])
            } else {
                (
                    &FILLER_EN,
                    &PLANTED_EN,
                    &[", ", ". ", "! ", "; ", "\n", "? "],
                )
            };
            let parts = r.random_range(1..=4);
            let mut text = String::new();
            let mut planted = Vec::new();
            for p in 0..parts {
                if p > 0 {
                    text.push_str(delims.choose(&mut r).unwrap());
                }
                let seg = if r.random_bool(0.4) {
                    let s = plant.choose(&mut r).unwrap();
                    planted.push(s.to_string());
                    s
                } else {
                    fill.choose(&mut r).unwrap()
                };
                text.push_str(seg);
            }
            if !zh && r.random_bool(0.5) {
                text.push('.');
            }
            let record = ReviewRecord {
                review_id: format!("p{i}"),
                app_id: "app1".into(),
                market: MarketId::Tencent,
                category: Some("video".into()),
                rating: r.random_range(1..=5),
                text,
                language: if zh { "zh".into() } else { "en".into() },
                likes: 0,
                timestamp: 1_600_000_000 + i as i64,
                extra: Default::default(),
            };
            PlantedReview { record, planted }
        })
        .collect()
}

/// Complaint themes used by the demo corpus, each with its own vocabulary.
pub const THEMES: [&[&str]; 6] = [
    &[
        "never received the red packet reward",
        "red packet reward never arrived in my account",
        "opened the red packet but got nothing",
    ],
    &[
        "each red packet gives only a few gold coins",
        "gold coins in the red packet are tiny",
        "too few coins per red packet",
    ],
    &[
        "cannot cash out the red packet money",
        "withdrawal threshold keeps rising before cash out",
        "withdraw button fails for red packet cash",
    ],
    &[
        "red packet tasks all day earn almost no money",
        "earning money from red packet tasks is impossible",
        "hours of tasks and the money is still pennies",
    ],
    &[
        "red packet promotion is full of tricks",
        "the red packet event is a trap with tricks",
        "tricks everywhere to keep you clicking red packets",
    ],
    &[
        "false advertising about the red packet bonus",
        "the red packet ads are misleading and fake",
        "fake claims about red packet payout in every ad",
    ],
];
const POSITIVE_RP: [&str; 4] = [
    "got the red packet reward quickly",
    "red packet bonus arrived instantly",
    "love the daily red packet coins",
    "the red packet cash out was smooth",
];
const NEGATIVE_ZH: [&str; 3] = ["红包一直不到账", "提现门槛太高了", "全是套路骗人的"];

#[derive(Debug, Clone)]
pub struct DemoCorpus {
    pub apps: Vec<AppRecord>,
    /// Raw import lines per market.
    pub reviews: BTreeMap<MarketId, Vec<String>>,
    /// Labelled texts for training the sentiment classifier.
    pub labeled: Vec<LabeledText>,
}

/// A small multi-market corpus exercising every pipeline stage: red-packet
/// complaints from six themes, positive red-packet reviews, unrelated
/// reviews, and a share of Chinese reviews.
pub fn demo_corpus(seed: u64) -> DemoCorpus {
    let mut r = rng(seed);
    let markets = [
        MarketId::Tencent,
        MarketId::Huawei,
        MarketId::Xiaomi,
        MarketId::GooglePlay,
    ];
    let categories = [
        "video",
        "shopping & payment",
        "news",
        "leisure puzzle",
        "browsers",
    ];
    let mut apps = Vec::new();
    let mut reviews = BTreeMap::new();
    let mut ts = 1_650_000_000i64;
    for market in &markets {
        let mut lines = Vec::new();
        for (a, category) in categories.iter().enumerate() {
            let app_id = format!("{}.app{a}", market.as_str());
            let has_red_packet = a != categories.len() - 1;
            apps.push(AppRecord {
                app_id: app_id.clone(),
                market: market.clone(),
                category: category.to_string(),
                has_red_packet,
            });
            for i in 0..40 {
                ts += r.random_range(60..3600);
                let id = format!("{}-{a}-{i}", market.as_str());
                let (text, rating, lang) = if !has_red_packet || r.random_bool(0.3) {
                    (
                        FILLER_EN.choose(&mut r).unwrap().to_string(),
                        r.random_range(3..=5),
                        "en",
                    )
                } else if *market != MarketId::GooglePlay && r.random_bool(0.1) {
                    (
                        NEGATIVE_ZH.choose(&mut r).unwrap().to_string(),
                        r.random_range(1..=2),
                        "zh",
                    )
                } else if r.random_bool(0.3) {
                    let pos = POSITIVE_RP.choose(&mut r).unwrap();
                    let fill = FILLER_EN.choose(&mut r).unwrap();
                    (format!("{fill}. {pos}!"), r.random_range(4..=5), "en")
                } else {
                    let theme = THEMES.choose(&mut r).unwrap();
                    let complaint = theme.choose(&mut r).unwrap();
                    let text = if r.random_bool(0.5) {
                        format!("{}, {complaint}.", FILLER_EN.choose(&mut r).unwrap())
                    } else {
                        format!("{complaint}!")
                    };
                    (text, r.random_range(1..=3), "en")
                };
                lines.push(
                    review_json(&id, &app_id, market, category, rating, &text, lang, ts)
                        .to_string(),
                );
            }
        }
        reviews.insert(market.clone(), lines);
    }

    let mut labeled = Vec::new();
    for i in 0..150 {
        let theme = THEMES[i % THEMES.len()];
        labeled.push(LabeledText {
            review_id: format!("train-neg{i}"),
            text: theme.choose(&mut r).unwrap().to_string(),
            label: Label::Negative,
            provenance: Provenance::Synthetic,
        });
        labeled.push(LabeledText {
            review_id: format!("train-pos{i}"),
            text: POSITIVE_RP.choose(&mut r).unwrap().to_string(),
            label: Label::NonNegative,
            provenance: Provenance::Synthetic,
        });
    }
    DemoCorpus {
        apps,
        reviews,
        labeled,
    }
}
