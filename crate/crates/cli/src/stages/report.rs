//! report: distribution, fraud, hot-word and anti-virus tables.
//!
//! Each table is produced when its inputs are available, either from the
//! run directory or from a counts file. The stage fails only when it can
//! produce nothing at all.

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;

use anyhow::Context as _;
use reckmine_core::artifacts::{
    ClusterDigest, ClusterExport, AV_HISTOGRAM_CSV, AV_REPORT_JSON, AV_VERDICTS_CSV,
    CATEGORY_TABLE_CSV, CATEGORY_TABLE_JSON, CLASSIFIED_FILE, CLUSTERS_FILE, FRAUD_TABLE_CSV,
    FRAUD_TABLE_JSON, HOT_WORDS_JSON, MARKET_TABLE_CSV, MARKET_TABLE_JSON, RED_PACKET_FILE,
    SUMMARIES_FILE, WORDCLOUD_CSV,
};
use reckmine_core::corpus::REVIEWS_FILE;
use reckmine_core::filter::RedPacketReview;
use reckmine_core::percent::display_opt;
use reckmine_core::report::{
    av_verdicts, category_distribution, fraud_category_table, hot_words, market_distribution,
    read_av_flags, write_wordcloud_csv, DistributionTable, FraudTable,
};
use reckmine_core::sentiment::{ClassifiedReview, Label};
use reckmine_core::summarize::ClusterSummary;
use reckmine_core::text::Stopwords;

use super::latest_red_packet;
use super::prepare::load_corpus;
use crate::context::Ctx;
use crate::error::{CliError, CliResult};

fn counts_file(
    ctx: &mut Ctx,
    path: Option<std::path::PathBuf>,
    what: &str,
) -> CliResult<Option<File>> {
    match path {
        Some(p) => {
            let p = ctx.configured_file(&p, what)?;
            Ok(Some(File::open(p)?))
        }
        None => Ok(None),
    }
}

fn write_table(ctx: &mut Ctx, table: &DistributionTable, csv: &str, json: &str) -> CliResult<()> {
    table
        .write_csv(File::create(ctx.out_path(csv)?)?)
        .context("writing table")?;
    ctx.write_json(json, table)?;
    println!("{}", table.to_text());
    Ok(())
}

pub fn report(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.input_dir_or_cwd();
    let r = ctx.config.report.clone();
    let mut produced = 0;

    // distribution tables, from counts files or the run directory
    let market_counts = counts_file(ctx, r.market_counts.clone(), "market counts file")?;
    let category_counts = counts_file(ctx, r.category_counts.clone(), "category counts file")?;
    let have_run = [REVIEWS_FILE, RED_PACKET_FILE, CLASSIFIED_FILE]
        .iter()
        .all(|f| dir.join(f).exists());
    let run_data = if have_run && (market_counts.is_none() || category_counts.is_none()) {
        let corpus = load_corpus(ctx, &dir)?;
        let red_packet: Vec<RedPacketReview> = ctx.read_jsonl(&dir.join(RED_PACKET_FILE))?;
        let classified: Vec<ClassifiedReview> = ctx.read_jsonl(&dir.join(CLASSIFIED_FILE))?;
        Some((corpus, red_packet, classified))
    } else {
        None
    };
    let market = match (market_counts, &run_data) {
        (Some(f), _) => {
            Some(DistributionTable::read_counts_csv(f).context("reading market counts")?)
        }
        (None, Some((c, rp, cl))) => Some(market_distribution(c, rp, cl).context("market table")?),
        (None, None) => None,
    };
    if let Some(t) = market {
        write_table(ctx, &t, MARKET_TABLE_CSV, MARKET_TABLE_JSON)?;
        produced += 1;
    }
    let category = match (category_counts, &run_data) {
        (Some(f), _) => {
            Some(DistributionTable::read_counts_csv(f).context("reading category counts")?)
        }
        (None, Some((c, rp, cl))) => {
            Some(category_distribution(c, rp, cl).context("category table")?)
        }
        (None, None) => None,
    };
    if let Some(t) = category {
        write_table(ctx, &t, CATEGORY_TABLE_CSV, CATEGORY_TABLE_JSON)?;
        produced += 1;
    }

    // fraud categories, from a counts file or the clusters and their summaries
    let fraud = match counts_file(ctx, r.fraud_counts.clone(), "fraud counts file")? {
        Some(f) => Some(FraudTable::read_counts_csv(f).context("reading fraud counts")?),
        None if dir.join(CLUSTERS_FILE).exists() => {
            let export: ClusterExport = ctx.read_json(&dir.join(CLUSTERS_FILE))?;
            let summaries: Vec<ClusterSummary> = if dir.join(SUMMARIES_FILE).exists() {
                let digests: Vec<ClusterDigest> = ctx.read_json(&dir.join(SUMMARIES_FILE))?;
                digests.into_iter().map(|d| d.summary).collect()
            } else {
                Vec::new()
            };
            Some(fraud_category_table(&export.sizes(), &summaries))
        }
        None => None,
    };
    if let Some(t) = fraud {
        t.write_csv(File::create(ctx.out_path(FRAUD_TABLE_CSV)?)?)
            .context("writing fraud table")?;
        ctx.write_json(FRAUD_TABLE_JSON, &t)?;
        println!("{}", t.to_text());
        produced += 1;
    }

    // hot words over the negative red-packet reviews
    if let Some((_, _, classified)) = &run_data {
        let negative: HashSet<&str> = classified
            .iter()
            .filter(|c| c.label == Label::Negative)
            .map(|c| c.review_id.as_str())
            .collect();
        let texts: Vec<String> = latest_red_packet(ctx, &dir)?
            .into_iter()
            .filter(|r| negative.contains(r.review_id.as_str()))
            .map(|r| r.joined_text)
            .collect();
        let stopwords = match r.stopwords.clone() {
            Some(p) => {
                let p = ctx.configured_file(&p, "stopword file")?;
                Stopwords::load(&p)?
            }
            None => Stopwords::english(),
        };
        let words = hot_words(&texts, r.hot_word_min_freq, &stopwords);
        ctx.write_json(HOT_WORDS_JSON, &words)?;
        write_wordcloud_csv(&words, File::create(ctx.out_path(WORDCLOUD_CSV)?)?)
            .context("writing word cloud")?;
        let top: Vec<String> = words
            .iter()
            .take(10)
            .map(|w| format!("{} ({})", w.term, w.frequency))
            .collect();
        println!(
            "{} hot words (min frequency {}): {}\n",
            words.len(),
            r.hot_word_min_freq,
            top.join(", ")
        );
        produced += 1;
    }

    if let Some(p) = r.av_flags.clone() {
        let p = ctx.configured_file(&p, "anti-virus flags file")?;
        let flags =
            read_av_flags(BufReader::new(File::open(&p)?)).context("reading anti-virus flags")?;
        let av = av_verdicts(&flags).context("anti-virus verdicts")?;
        av.write_verdicts_csv(File::create(ctx.out_path(AV_VERDICTS_CSV)?)?)
            .context("writing verdicts")?;
        av.write_histogram_csv(File::create(ctx.out_path(AV_HISTOGRAM_CSV)?)?)
            .context("writing histogram")?;
        ctx.write_json(AV_REPORT_JSON, &av)?;
        println!(
            "{} apps: {} flagged by no engine ({}), {} malicious ({})",
            av.verdicts.len(),
            av.zero_flag_apps,
            display_opt(av.zero_flag_pct),
            av.malicious_apps,
            display_opt(av.malicious_pct)
        );
        produced += 1;
    }

    if produced == 0 {
        return Err(CliError::MissingInput(format!(
            "missing input: nothing to report in {} (need a classified run directory, a counts file or --av-flags)",
            dir.display()
        )));
    }
    Ok(())
}
