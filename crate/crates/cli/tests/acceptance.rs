//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines always show up in the
//! output. Each criterion compares against an oracle computed here, not
//! against the library's own helpers. Exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use reckmine_core::cluster::{
    kmeans_fit, kneedle_elbow, max_chord_elbow, sweep_sse, KMeansConfig, SseCurve,
};
use reckmine_core::corpus::{corpus_stats, AppRecord, Corpus, MarketId, ReviewStore};
use reckmine_core::embed::{cosine_similarity, EmbedError, Embedder, HashingEmbedder, TextVector};
use reckmine_core::filter::{KeywordFilter, KeywordSet};
use reckmine_core::popdetect::{
    classify_popup_event, GenericTextSet, PopupEvent, PopupType, RedPacketScorer, RuleTables,
};
use reckmine_core::report::AvVerdict;
use reckmine_core::sentiment::{
    default_train_per_class, embed_labeled, evaluate, logistic_loss, loss_gradient,
    stratified_split, train_classifier, ConfusionCounts, LabeledReview, Metrics, TrainConfig,
};
use reckmine_core::summarize::{cluster_term_scores, tfidf_top_keywords};
use reckmine_core::synth;
use reckmine_core::text::{words, Stopwords};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

/// Half-up percentage with one decimal, by integer arithmetic.
fn pct(num: u64, den: u64) -> String {
    let tenths = (2000 * num + den) / (2 * den);
    format!("{}.{}%", tenths / 10, tenths % 10)
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn row<'a>(rows: &'a [Vec<String>], key: &str) -> &'a [String] {
    rows.iter()
        .find(|r| r[0] == key)
        .unwrap_or_else(|| panic!("no row {key}"))
}

fn num(s: &str) -> u64 {
    s.parse().unwrap_or_else(|_| panic!("not a count: {s:?}"))
}

fn table_arithmetic() -> Outcome {
    // share of crawled apps that carry red packets
    let mut apps = Vec::new();
    let (mut all, mut red) = (0, 0);
    for line in std::fs::read_to_string(fixture("apps_per_market.csv"))
        .unwrap()
        .lines()
        .skip(1)
    {
        let f: Vec<&str> = line.split(',').collect();
        let market: MarketId = f[0].parse().unwrap();
        let (n, r) = (num(f[1]), num(f[2]));
        all += n;
        red += r;
        for i in 0..n {
            apps.push(AppRecord {
                app_id: format!("{market}-{i}"),
                market: market.clone(),
                category: "video".into(),
                has_red_packet: i < r,
            });
        }
    }
    let stats = corpus_stats(&Corpus {
        apps,
        reviews: ReviewStore::new(),
    });
    let t2 = stats
        .total
        .red_packet_pct
        .map(|p| p.to_string())
        .unwrap_or_default();
    ensure!(t2 == "16.7%" && t2 == pct(red, all), "red-packet app share {t2}");

    // market, category and fraud tables through the report stage
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&[
        "report",
        "--in",
        s(dir.path()),
        "--out",
        s(&out),
        "--market-counts",
        s(&fixture("market_counts.csv")),
        "--category-counts",
        s(&fixture("category_counts.csv")),
        "--fraud-counts",
        s(&fixture("fraud_counts.csv")),
    ]);
    let market = csv_rows(&out.join("market_table.csv"));
    let total = row(&market, "Total");
    let c = |n: &str| column(&market, n);
    let low = &total[c("low_rating_pct")];
    let neg = &total[c("negative_pct")];
    let app = &total[c("app_pct")];
    ensure!(
        (low.as_str(), neg.as_str(), app.as_str()) == ("27.7%", "33.2%", "70.7%"),
        "market totals {low} / {neg} / {app}"
    );
    let rp = num(&total[c("red_packet_reviews")]);
    ensure!(
        *low == pct(num(&total[c("low_ratings")]), rp),
        "low-rating oracle"
    );
    ensure!(
        *neg == pct(num(&total[c("negative_reviews")]), rp),
        "negative oracle"
    );
    ensure!(
        *app == pct(
            num(&total[c("apps_with_negative")]),
            num(&total[c("apps_with_red_packets")])
        ),
        "app oracle"
    );

    let category = csv_rows(&out.join("category_table.csv"));
    let browsers = &row(&category, "browsers")[column(&category, "negative_pct")];
    let music = &row(&category, "music")[column(&category, "app_pct")];
    ensure!(
        browsers == "63.8%" && music == "100.0%",
        "category rows: browsers {browsers}, music {music}"
    );

    let fraud = csv_rows(&out.join("fraud_table.csv"));
    let shares: Vec<&str> = fraud[1..fraud.len() - 1]
        .iter()
        .map(|r| r.last().unwrap().as_str())
        .collect();
    ensure!(
        shares == ["35.1%", "17.7%", "17.0%", "15.2%", "7.8%", "7.2%"],
        "fraud shares {shares:?}"
    );
    Ok("16.7%; 27.7% / 33.2% / 70.7%; 63.8% and 100.0%; 35.1% .. 7.2%".into())
}

/// Largest perpendicular distance below the raw first-to-last chord.
fn chord_oracle(points: &[(usize, f64)]) -> usize {
    let (x0, y0) = (points[0].0 as f64, points[0].1);
    let (x1, y1) = (
        points[points.len() - 1].0 as f64,
        points[points.len() - 1].1,
    );
    let mut best = (f64::NEG_INFINITY, 0);
    for &(k, y) in points {
        let d = ((y1 - y0) * (k as f64 - x0) - (x1 - x0) * (y - y0)) / (x1 - x0).hypot(y1 - y0);
        if d > best.0 {
            best = (d, k);
        }
    }
    best.1
}

fn elbow() -> Outcome {
    let shaped = [
        1000.0, 850.0, 700.0, 560.0, 430.0, 310.0, 290.0, 275.0, 262.0, 250.0,
    ];
    let curve = SseCurve::new(
        shaped
            .iter()
            .enumerate()
            .map(|(i, &y)| (i + 1, y))
            .collect(),
    )
    .unwrap();
    let k = kneedle_elbow(&curve).map_err(|e| e.to_string())?.optimal_k;
    ensure!(k == 6, "kneedle picked {k} on the shaped curve");

    let inv: Vec<(usize, f64)> = (1..=10).map(|k| (k, 1.0 / k as f64)).collect();
    let oracle = chord_oracle(&inv);
    let curve = SseCurve::new(inv).unwrap();
    let kn = kneedle_elbow(&curve).map_err(|e| e.to_string())?.optimal_k;
    let mc = max_chord_elbow(&curve)
        .map_err(|e| e.to_string())?
        .optimal_k;
    ensure!(
        kn.abs_diff(oracle) <= 1 && mc.abs_diff(oracle) <= 1,
        "1/k: kneedle {kn}, max chord {mc}, oracle {oracle}"
    );
    Ok(format!(
        "shaped curve k=6; 1/k kneedle {kn}, max chord {mc}, oracle {oracle}"
    ))
}

fn adjusted_rand(a: &[usize], b: &[usize]) -> f64 {
    let c2 = |n: u64| (n * n.saturating_sub(1)) as f64 / 2.0;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let (mut rows, mut cols): (HashMap<usize, u64>, HashMap<usize, u64>) = Default::default();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| c2(n)).sum();
    let sr: f64 = rows.values().map(|&n| c2(n)).sum();
    let sc: f64 = cols.values().map(|&n| c2(n)).sum();
    let expected = sr * sc / c2(a.len() as u64);
    (index - expected) / ((sr + sc) / 2.0 - expected)
}

fn kmeans() -> Outcome {
    let (points, labels) = synth::gaussian_blobs(4, 50, 16, 0.5, 42);
    ensure!(points.len() == 200 && points[0].len() == 16, "blob shape");
    let model = kmeans_fit(&points, &KMeansConfig::with_k(4)).map_err(|e| e.to_string())?;
    let ari = adjusted_rand(&model.assignments, &labels);
    ensure!(ari == 1.0, "adjusted Rand {ari}");
    ensure!(
        model.sse_history.windows(2).all(|w| w[1] <= w[0]),
        "SSE rose during an iteration"
    );
    let sweep = sweep_sse(&points, 1, 8, &KMeansConfig::default()).map_err(|e| e.to_string())?;
    let sse: Vec<f64> = sweep.points().iter().map(|p| p.1).collect();
    ensure!(
        sse.windows(2).all(|w| w[1] <= w[0]),
        "best-of-10 SSE not monotone: {sse:?}"
    );
    Ok(format!(
        "ARI {ari}; {} iterations; SSE(1..8) monotone",
        model.iterations
    ))
}

fn classifier() -> Outcome {
    let labeled = embed_labeled(
        &synth::separable_corpus(500, 42),
        &HashingEmbedder::new(512).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let (train, test) = stratified_split(&labeled, default_train_per_class(&labeled), 42)
        .map_err(|e| e.to_string())?;
    let model = train_classifier(&train, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let m = evaluate(&model, &test).map_err(|e| e.to_string())?;
    let f1 = m.f1.unwrap_or(0.0);
    ensure!(f1 >= 0.95, "held-out F1 {f1}");

    // gradient at zero weights against central differences
    let data: Vec<LabeledReview> = labeled.iter().step_by(10).cloned().collect();
    let dims = data[0].vector.dims();
    let (w, b, l2, h) = (vec![0.0; dims], 0.0, 1e-4, 1e-5);
    let (gw, gb) = loss_gradient(&w, b, &data, l2);
    let mut numeric = Vec::with_capacity(dims + 1);
    let mut wp = w.clone();
    for i in 0..dims {
        wp[i] = h;
        let up = logistic_loss(&wp, b, &data, l2);
        wp[i] = -h;
        let down = logistic_loss(&wp, b, &data, l2);
        wp[i] = 0.0;
        numeric.push((up - down) / (2.0 * h));
    }
    numeric.push((logistic_loss(&w, h, &data, l2) - logistic_loss(&w, -h, &data, l2)) / (2.0 * h));
    let analytic: Vec<f64> = gw.into_iter().chain([gb]).collect();
    let diff = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).powi(2))
        .sum::<f64>()
        .sqrt();
    let rel = diff / numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    ensure!(rel < 1e-6, "gradient relative error {rel}");

    let hand = Metrics::from_counts(ConfusionCounts {
        tp: 2,
        fp: 1,
        fn_: 0,
        tn: 0,
    });
    let p = format!("{:.3}", hand.precision.unwrap_or(f64::NAN));
    let r = hand.recall.unwrap_or(f64::NAN);
    let f = hand.f1.unwrap_or(f64::NAN);
    ensure!(
        p == "0.667" && r == 1.0 && (f - 0.8).abs() < 1e-12,
        "hand matrix P={p} R={r} F1={f}"
    );
    Ok(format!(
        "held-out F1 {f1:.3}; gradient rel. error {rel:.1e}; P=0.667 R=1.0 F1=0.8"
    ))
}

/// Fixed vectors for known texts, for an exact 0.6 cosine.
struct Table(HashMap<String, Vec<f64>>);

impl Embedder for Table {
    fn embed(&self, texts: &[&str]) -> Result<Vec<TextVector>, EmbedError> {
        Ok(texts
            .iter()
            .map(|t| TextVector::raw(self.0[*t].clone()))
            .collect())
    }
}

fn popup() -> Outcome {
    // fixture events through the rules, and through the CLI
    let rules = RuleTables::default();
    let mut n = 0;
    for line in std::fs::read_to_string(fixture("popup_events.jsonl"))
        .unwrap()
        .lines()
    {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let expected: Option<PopupType> = serde_json::from_value(v["expected"].clone()).unwrap();
        let event: PopupEvent = serde_json::from_value(v).unwrap();
        let got = classify_popup_event(&event, &rules);
        ensure!(
            got == expected,
            "{} {}: {got:?}, expected {expected:?}",
            event.class_name,
            event.method_name
        );
        n += 1;
    }
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "detect-popup",
        "--in",
        s(&fixture("popup_events.jsonl")),
        "--out",
        s(dir.path()),
    ]);
    ensure!(
        stdout.contains(&format!("type accuracy {n}/{n}")),
        "CLI accuracy line missing: {stdout}"
    );

    let embedder = HashingEmbedder::new(512).unwrap();
    let generic = GenericTextSet::default();
    let scorer = RedPacketScorer::new(generic.clone(), embedder);
    for t in generic.texts() {
        let v = scorer.score_text(t).map_err(|e| e.to_string())?;
        ensure!(
            (v.max_score - 1.0).abs() < 1e-12 && v.is_red_packet,
            "self-score {} for {t}",
            v.max_score
        );
    }

    let mut table: HashMap<String, Vec<f64>> = generic
        .texts()
        .iter()
        .map(|t| (t.clone(), vec![0.0, -1.0]))
        .collect();
    table.insert(generic.texts()[0].clone(), vec![1.0, 0.0]);
    table.insert("probe".into(), vec![3.0, 4.0]);
    let exact = RedPacketScorer::new(generic.clone(), Table(table))
        .score_text("probe")
        .map_err(|e| e.to_string())?;
    ensure!(
        exact.max_score == 0.6 && exact.is_red_packet,
        "score {} verdict {}",
        exact.max_score,
        exact.is_red_packet
    );

    let vocab = [
        "gift", "coins", "update", "open", "now", "claim", "red", "packet", "settings", "video",
        "bonus", "today",
    ];
    let gv: Vec<TextVector> = generic
        .texts()
        .iter()
        .map(|t| embedder.embed_text(t))
        .collect();
    for i in 0..50 {
        let text = format!(
            "{} {} {}",
            vocab[i % 12],
            vocab[(i * 5 + 1) % 12],
            vocab[(i * 7 + 3) % 12]
        );
        let v = scorer.score_text(&text).map_err(|e| e.to_string())?;
        let q = embedder.embed_text(&text);
        let best = gv
            .iter()
            .map(|g| cosine_similarity(q.values(), g.values()).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        ensure!(
            (v.max_score - best).abs() <= 1e-12,
            "{text}: {} vs {best}",
            v.max_score
        );
        ensure!(v.is_red_packet == (best >= 0.6), "{text}: verdict");
    }
    Ok(format!(
        "{n}/{n} fixture events; self-score 1.0; 0.6 inclusive; 50 texts match brute force"
    ))
}

fn tfidf() -> Outcome {
    let docs = [
        "red packet coins never arrive",
        "coins coins fake withdraw",
        "invite friends for a red packet",
        "withdraw threshold too high",
        "invite friends invite family",
    ];
    let assignments = [0, 0, 1, 1, 1];
    let sw = Stopwords::english();
    let (_, scores) =
        cluster_term_scores(&docs, &assignments, 2, &sw).map_err(|e| e.to_string())?;

    // oracle: unigrams and bigrams of non-stopwords, tf = count / len,
    // idf = ln((1 + N) / (1 + df)) + 1, summed per cluster
    let terms: Vec<Vec<String>> = docs
        .iter()
        .map(|d| {
            let w: Vec<String> = words(d).into_iter().filter(|w| !sw.contains(w)).collect();
            let bigrams: Vec<String> = w.windows(2).map(|p| format!("{} {}", p[0], p[1])).collect();
            w.into_iter().chain(bigrams).collect()
        })
        .collect();
    let n = docs.len() as f64;
    let mut df: BTreeMap<&String, f64> = BTreeMap::new();
    for t in &terms {
        for term in t.iter().collect::<BTreeSet<_>>() {
            *df.entry(term).or_default() += 1.0;
        }
    }
    let mut want: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new(); 2];
    for (t, &c) in terms.iter().zip(&assignments) {
        for term in t.iter().collect::<BTreeSet<_>>() {
            let tf = t.iter().filter(|x| *x == term).count() as f64 / t.len() as f64;
            *want[c].entry(term.clone()).or_default() +=
                tf * (((1.0 + n) / (1.0 + df[term])).ln() + 1.0);
        }
    }
    for (got, want) in scores.iter().zip(&want) {
        ensure!(
            got.len() == want.len(),
            "term count {} vs {}",
            got.len(),
            want.len()
        );
        for (term, score) in got {
            let w = want.get(term).copied().unwrap_or(f64::NAN);
            ensure!((score - w).abs() <= 1e-9, "{term}: {score} vs {w}");
        }
    }

    let base = tfidf_top_keywords(&docs, &assignments, 2, 3, &sw).map_err(|e| e.to_string())?;
    for perm in [[4, 3, 2, 1, 0], [2, 0, 4, 1, 3], [1, 3, 0, 4, 2]] {
        let d: Vec<&str> = perm.iter().map(|&i| docs[i]).collect();
        let a: Vec<usize> = perm.iter().map(|&i| assignments[i]).collect();
        let shuffled = tfidf_top_keywords(&d, &a, 2, 3, &sw).map_err(|e| e.to_string())?;
        ensure!(shuffled == base, "top-k changed under permutation {perm:?}");
    }
    let top: Vec<&str> = base.iter().map(|k| k.top_terms[0].0.as_str()).collect();
    Ok(format!(
        "scores within 1e-9; top terms {top:?} stable under shuffles"
    ))
}

fn filter() -> Outcome {
    let en = KeywordSet::default_english();
    let zh = KeywordSet::default_chinese();
    ensure!(
        en.len() == 34 && zh.len() == 23,
        "default sets have {} and {} terms",
        en.len(),
        zh.len()
    );
    let f = KeywordFilter::new(&[en, zh]);
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for p in synth::planted_segment_corpus(2_000, 42) {
        let got: Vec<String> = f
            .extract_review(&p.record)
            .map(|r| r.retained_segments)
            .unwrap_or_default();
        tp += got.iter().filter(|g| p.planted.contains(g)).count();
        fp += got.iter().filter(|g| !p.planted.contains(g)).count();
        fn_ += p.planted.iter().filter(|w| !got.contains(w)).count();
    }
    ensure!(tp > 0 && fp == 0 && fn_ == 0, "tp {tp}, fp {fp}, fn {fn_}");
    Ok(format!(
        "34 EN / 23 ZH terms; {tp} planted segments, precision = recall = 1.0"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_pipeline(&a);
    run_pipeline(&b);
    let (fa, fb) = (artifacts(&a), artifacts(&b));
    ensure!(fa.len() == fb.len(), "different artifact sets");
    for ((name, x), (other, y)) in fa.iter().zip(&fb) {
        ensure!(name == other && x == y, "{name} differs");
    }
    Ok(format!(
        "{} artifacts byte-identical across two seed-42 runs",
        fa.len()
    ))
}

fn av_rule() -> Outcome {
    for flags in 0..10u64 {
        ensure!(
            AvVerdict::new("x", flags).malicious == (flags >= 3),
            "{flags} flags misjudged"
        );
    }
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "report",
        "--in",
        s(dir.path()),
        "--av-flags",
        s(&fixture("av_flags.jsonl")),
    ]);
    let verdicts = csv_rows(&dir.path().join("av_verdicts.csv"));
    let (fc, mc) = (
        column(&verdicts, "engine_flags"),
        column(&verdicts, "malicious"),
    );
    let body = &verdicts[1..];
    let zero = body.iter().filter(|r| r[fc] == "0").count() as u64;
    let malicious = body.iter().filter(|r| r[mc] == "true").count() as u64;
    ensure!(
        body.iter().all(|r| (num(&r[fc]) >= 3) == (r[mc] == "true")),
        "verdict column disagrees with the rule"
    );
    let n = body.len() as u64;
    ensure!(
        (n, zero, malicious) == (52, 25, 11),
        "{n} apps, {zero} zero-flag, {malicious} malicious"
    );
    let report = read_json(&dir.path().join("av_report.json"));
    ensure!(
        report["zero_flag_pct"] == pct(25, 52).as_str()
            && report["malicious_pct"] == pct(11, 52).as_str(),
        "report percentages {} / {}",
        report["zero_flag_pct"],
        report["malicious_pct"]
    );
    Ok(format!(
        "25/52 zero-flag ({}), 11/52 malicious ({})",
        pct(25, 52),
        pct(11, 52)
    ))
}

fn run(name: &str, f: fn() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Err(reason) => {
            println!("FAIL  {name}: {reason}");
            false
        }
    }
}

fn main() {
    // keep panic messages out of the PASS/FAIL listing
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 9] = [
        ("table arithmetic", table_arithmetic),
        ("elbow", elbow),
        ("k-means", kmeans),
        ("classifier", classifier),
        ("pop-up detection", popup),
        ("tf-idf", tfidf),
        ("keyword filter", filter),
        ("determinism", determinism),
        ("anti-virus rule", av_rule),
    ];
    let passed = criteria.iter().filter(|(name, f)| run(name, *f)).count();
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
