//! cluster, elbow, summarize.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::Context as _;
use reckmine_core::artifacts::{
    ClusterAssignment, ClusterDigest, ClusterExport, EmbeddedReview, CLASSIFIED_FILE,
    CLUSTERS_FILE, ELBOW_FILE, EMBEDDINGS_FILE, SSE_CURVE_FILE, SUMMARIES_FILE,
};
use reckmine_core::cluster::{
    kmeans_fit, kneedle_elbow, max_chord_elbow, squared_distance, sweep_sse, ElbowMethod,
    ElbowResult, KMeansConfig, SseCurve,
};
use reckmine_core::provider::RetryPolicy;
use reckmine_core::sentiment::{ClassifiedReview, Label};
use reckmine_core::summarize::{
    summarize_cluster, tfidf_top_keywords, CompletionClient, HttpCompletionClient, PromptOptions,
    PromptTemplate, RankedReview,
};
use reckmine_core::text::Stopwords;
use serde::{Deserialize, Serialize};

use super::latest_red_packet;
use crate::context::Ctx;
use crate::error::{CliError, CliResult};

/// Contents of `elbow.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ElbowReport {
    pub optimal_k: usize,
    pub method: ElbowMethod,
    pub kneedle: ElbowResult,
    pub max_chord: ElbowResult,
}

/// Embeddings of the reviews classified negative, in embedding order.
fn negative_points(ctx: &mut Ctx, dir: &Path) -> CliResult<Vec<EmbeddedReview>> {
    let classified: Vec<ClassifiedReview> = ctx.read_jsonl(&dir.join(CLASSIFIED_FILE))?;
    let negative: HashSet<&str> = classified
        .iter()
        .filter(|c| c.label == Label::Negative)
        .map(|c| c.review_id.as_str())
        .collect();
    let embedded: Vec<EmbeddedReview> = ctx.read_jsonl(&dir.join(EMBEDDINGS_FILE))?;
    let points: Vec<EmbeddedReview> = embedded
        .into_iter()
        .filter(|e| negative.contains(e.review_id.as_str()))
        .collect();
    if points.is_empty() {
        return Err(CliError::Other(anyhow::anyhow!(
            "no negative reviews to cluster"
        )));
    }
    Ok(points)
}

fn kmeans_config(ctx: &Ctx, k: usize) -> KMeansConfig {
    let c = &ctx.config.cluster;
    KMeansConfig {
        k,
        max_iter: c.max_iter,
        tol: c.tol,
        seed: ctx.seed,
        restarts: c.restarts,
    }
}

fn sweep(ctx: &Ctx, points: &[EmbeddedReview]) -> CliResult<SseCurve> {
    let c = &ctx.config.cluster;
    let k_max = c.k_max.min(points.len());
    if k_max < c.k_max {
        log::warn!(
            "only {} negative reviews; sweeping k up to {k_max}",
            points.len()
        );
    }
    let vectors: Vec<&[f64]> = points.iter().map(|p| p.vector.values()).collect();
    sweep_sse(&vectors, c.k_min, k_max, &kmeans_config(ctx, c.k_min))
        .map_err(|e| CliError::Other(e.into()))
}

fn elbow_of(curve: &SseCurve) -> CliResult<ElbowReport> {
    let kneedle = kneedle_elbow(curve).context("finding the elbow")?;
    let max_chord = max_chord_elbow(curve).context("finding the elbow")?;
    if kneedle.optimal_k != max_chord.optimal_k {
        log::warn!(
            "elbow methods disagree: kneedle k={}, max chord k={}",
            kneedle.optimal_k,
            max_chord.optimal_k
        );
    }
    Ok(ElbowReport {
        optimal_k: kneedle.optimal_k,
        method: ElbowMethod::Kneedle,
        kneedle,
        max_chord,
    })
}

pub fn elbow(ctx: &mut Ctx, curve_path: Option<&Path>) -> CliResult<()> {
    let curve = match curve_path {
        Some(p) => {
            let p = ctx.configured_file(p, "SSE curve")?;
            SseCurve::read_csv(BufReader::new(File::open(&p)?)).context("reading SSE curve")?
        }
        None => {
            let dir = ctx.run_dir()?;
            let points = negative_points(ctx, &dir)?;
            sweep(ctx, &points)?
        }
    };
    let report = elbow_of(&curve)?;
    curve.write_csv(File::create(ctx.out_path(SSE_CURVE_FILE)?)?)?;
    ctx.write_json(ELBOW_FILE, &report)?;
    println!("{:>4} {:>14}", "k", "sse");
    for (k, sse) in curve.points() {
        let mark = if *k == report.optimal_k {
            "  <- elbow"
        } else {
            ""
        };
        println!("{k:>4} {sse:>14.4}{mark}");
    }
    println!(
        "optimal k = {} (kneedle {}, max chord {})",
        report.optimal_k, report.kneedle.optimal_k, report.max_chord.optimal_k
    );
    Ok(())
}

pub fn cluster(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let points = negative_points(ctx, &dir)?;
    let elbow_path = dir.join(ELBOW_FILE);
    let k = match ctx.config.cluster.k {
        Some(k) => k,
        None if elbow_path.exists() => {
            let report: ElbowReport = ctx.read_json(&elbow_path)?;
            report.optimal_k
        }
        None => {
            log::info!("no k given and no {ELBOW_FILE}; sweeping for the elbow");
            elbow_of(&sweep(ctx, &points)?)?.optimal_k
        }
    };
    let vectors: Vec<&[f64]> = points.iter().map(|p| p.vector.values()).collect();
    let config = kmeans_config(ctx, k);
    let model = kmeans_fit(&vectors, &config).context("clustering")?;
    let assignments = points
        .iter()
        .zip(&model.assignments)
        .map(|(p, &c)| ClusterAssignment {
            review_id: p.review_id.clone(),
            market: p.market.clone(),
            cluster: c,
            distance: squared_distance(p.vector.values(), &model.centroids[c]).sqrt(),
        })
        .collect();
    let export = ClusterExport {
        k: model.k(),
        sse: model.sse,
        config,
        centroids: model.centroids,
        assignments,
    };
    ctx.write_json(CLUSTERS_FILE, &export)?;
    println!(
        "k = {}, sse = {:.4}, sizes {:?}",
        export.k,
        export.sse,
        export.sizes()
    );
    Ok(())
}

fn load_stopwords(ctx: &mut Ctx, path: Option<std::path::PathBuf>) -> CliResult<Stopwords> {
    match path {
        Some(p) => {
            let p = ctx.configured_file(&p, "stopword file")?;
            Ok(Stopwords::load(&p)?)
        }
        None => Ok(Stopwords::english()),
    }
}

pub fn summarize(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let export: ClusterExport = ctx.read_json(&dir.join(CLUSTERS_FILE))?;
    let reviews = latest_red_packet(ctx, &dir)?;
    let text_of: HashMap<&str, &str> = reviews
        .iter()
        .map(|r| (r.review_id.as_str(), r.joined_text.as_str()))
        .collect();
    let texts = export
        .assignments
        .iter()
        .map(|a| {
            text_of.get(a.review_id.as_str()).copied().ok_or_else(|| {
                CliError::Other(anyhow::anyhow!(
                    "no text for clustered review {}",
                    a.review_id
                ))
            })
        })
        .collect::<CliResult<Vec<&str>>>()?;
    let assignments: Vec<usize> = export.assignments.iter().map(|a| a.cluster).collect();

    let c = ctx.config.summarize.clone();
    let stopwords = load_stopwords(ctx, c.stopwords.clone())?;
    let template = match &c.template {
        Some(p) => {
            let p = ctx.configured_file(p, "prompt template")?;
            PromptTemplate::load(&p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => PromptTemplate::default(),
    };
    let client = c.endpoint.as_ref().map(|endpoint| {
        let mut client = HttpCompletionClient::new(endpoint.clone(), c.model.clone());
        client.retry = RetryPolicy {
            max_retries: c.max_retries,
            ..RetryPolicy::default()
        };
        client
    });
    let options = PromptOptions {
        max_reviews: c.max_reviews,
        char_budget: c.char_budget,
    };

    let keywords = tfidf_top_keywords(&texts, &assignments, export.k, c.top_k, &stopwords)
        .context("keywords")?;
    let sizes = export.sizes();
    let mut digests = Vec::with_capacity(export.k);
    for kw in keywords {
        let members: Vec<RankedReview> = export
            .members(kw.cluster_id)
            .into_iter()
            .map(|a| RankedReview {
                text: text_of[a.review_id.as_str()],
                distance: a.distance,
            })
            .collect();
        let summary = summarize_cluster(
            &kw,
            &members,
            &template,
            &options,
            client.as_ref().map(|c| c as &dyn CompletionClient),
        )
        .context("summarising")?;
        println!(
            "cluster {} ({} reviews): {}",
            kw.cluster_id, sizes[kw.cluster_id], summary.summary
        );
        digests.push(ClusterDigest {
            cluster_id: kw.cluster_id,
            size: sizes[kw.cluster_id],
            keywords: kw.top_terms,
            summary,
        });
    }
    ctx.write_json(SUMMARIES_FILE, &digests)?;
    Ok(())
}
