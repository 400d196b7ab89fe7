//! import, filter, translate, embed.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use reckmine_core::artifacts::EMBEDDINGS_FILE;
use reckmine_core::artifacts::{
    EmbeddedReview, IMPORT_REPORT_FILE, RED_PACKET_FILE, TRANSLATED_FILE, TRANSLATION_CACHE_FILE,
};
use reckmine_core::corpus::{
    dedup_reviews, import_reviews, load_apps, write_apps, Corpus, ImportReport, MarketId,
    ReviewStore, APPS_FILE, INDEX_FILE, REVIEWS_FILE,
};
use reckmine_core::embed::Embedder;
use reckmine_core::filter::{FilterError, KeywordFilter, KeywordSet, RedPacketReview};
use reckmine_core::provider::RetryPolicy;
use reckmine_core::translate::{
    translate_reviews, HttpTranslationProvider, PassthroughProvider, TranslateError,
    TranslateOptions, TranslationCache, TranslationProvider,
};
use serde::Serialize;

use super::embedder::{embed_error, CliEmbedder};
use super::latest_red_packet;
use crate::context::Ctx;
use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct FileReport {
    file: PathBuf,
    market: MarketId,
    #[serde(flatten)]
    report: ImportReport,
}

#[derive(Serialize)]
struct ImportSummary {
    files: Vec<FileReport>,
    accepted: usize,
    skipped: usize,
    duplicates_removed: usize,
    stored: usize,
}

fn jsonl_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .filter(|p| p.file_name().is_none_or(|n| n != APPS_FILE))
        .collect();
    files.sort();
    Ok(files)
}

pub fn import(ctx: &mut Ctx) -> CliResult<()> {
    let input = ctx.input_file()?;
    ctx.default_out_to_cwd();
    let (files, dir) = if input.is_dir() {
        let reviews = input.join("reviews");
        let files = jsonl_files(if reviews.is_dir() { &reviews } else { &input })?;
        (files, Some(input.clone()))
    } else {
        (vec![input.clone()], None)
    };
    if files.is_empty() {
        return Err(CliError::MissingInput(format!(
            "missing input: no .jsonl files in {}",
            input.display()
        )));
    }
    let fixed_market = match &ctx.config.import.market {
        Some(m) => Some(
            m.parse::<MarketId>()
                .map_err(|e| CliError::Config(e.to_string()))?,
        ),
        None => None,
    };

    let mut store = ReviewStore::new();
    let mut reports = Vec::new();
    for file in files {
        let market = match &fixed_market {
            Some(m) => m.clone(),
            None => file
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("")
                .parse()
                .map_err(|e| CliError::Config(format!("{}: {e}; pass --market", file.display())))?,
        };
        let reader = BufReader::new(
            File::open(&file).with_context(|| format!("opening {}", file.display()))?,
        );
        let report = import_reviews(reader, &market, &mut store).context("importing reviews")?;
        log::info!(
            "{}: {} accepted, {} skipped",
            file.display(),
            report.accepted,
            report.skipped.len()
        );
        ctx.note_input(&file);
        reports.push(FileReport {
            file,
            market,
            report,
        });
    }
    let duplicates_removed = dedup_reviews(&mut store);

    let apps_path = match (&ctx.config.import.apps, &dir) {
        (Some(p), _) => Some(ctx.configured_file(&p.clone(), "apps file")?),
        (None, Some(d)) if d.join(APPS_FILE).is_file() => Some(d.join(APPS_FILE)),
        _ => None,
    };
    let apps = match &apps_path {
        Some(p) => {
            ctx.note_input(p);
            load_apps(BufReader::new(File::open(p)?)).context("reading apps")?
        }
        None => Vec::new(),
    };

    let out = ctx.out_dir()?;
    store.save(&out)?;
    ctx.out_path(REVIEWS_FILE)?;
    ctx.out_path(INDEX_FILE)?;
    if apps_path.is_some() {
        write_apps(&apps, File::create(ctx.out_path(APPS_FILE)?)?)?;
    }
    let summary = ImportSummary {
        accepted: reports.iter().map(|r| r.report.accepted).sum(),
        skipped: reports.iter().map(|r| r.report.skipped.len()).sum(),
        duplicates_removed,
        stored: store.len(),
        files: reports,
    };
    ctx.write_json(IMPORT_REPORT_FILE, &summary)?;
    println!(
        "imported {} reviews ({} skipped, {} duplicates removed), {} apps",
        summary.stored,
        summary.skipped,
        duplicates_removed,
        apps.len()
    );
    Ok(())
}

fn keyword_set(ctx: &mut Ctx, path: Option<PathBuf>, language: &str) -> CliResult<KeywordSet> {
    let Some(path) = path else {
        return Ok(if language == "en" {
            KeywordSet::default_english()
        } else {
            KeywordSet::default_chinese()
        });
    };
    let path = ctx.configured_file(&path, "keyword file")?;
    KeywordSet::load(&path, language).map_err(|e| match e {
        FilterError::EmptyKeywordSet { .. } => CliError::Config(e.to_string()),
        e => CliError::Other(e.into()),
    })
}

pub fn filter(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let sets = [
        keyword_set(ctx, ctx.config.filter.keywords_en.clone(), "en")?,
        keyword_set(ctx, ctx.config.filter.keywords_zh.clone(), "zh")?,
    ];
    let corpus = load_corpus(ctx, &dir)?;
    let filter = KeywordFilter::new(&sets);
    let kept: Vec<RedPacketReview> = corpus
        .reviews
        .records()
        .iter()
        .filter_map(|r| {
            filter.extract_review(r).map(|mut rp| {
                if rp.category.is_none() {
                    rp.category = corpus.category_of(r);
                }
                rp
            })
        })
        .collect();
    ctx.write_jsonl(RED_PACKET_FILE, &kept)?;
    println!(
        "{} of {} reviews mention red packets",
        kept.len(),
        corpus.reviews.len()
    );
    Ok(())
}

pub fn load_corpus(ctx: &mut Ctx, dir: &Path) -> CliResult<Corpus> {
    let reviews = dir.join(REVIEWS_FILE);
    if !reviews.exists() {
        return Err(CliError::MissingInput(format!(
            "missing input: {}",
            reviews.display()
        )));
    }
    ctx.note_input(&reviews);
    if dir.join(APPS_FILE).exists() {
        ctx.note_input(&dir.join(APPS_FILE));
    }
    Ok(Corpus::load(dir).context("loading review store")?)
}

pub fn translate(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let c = ctx.config.translate.clone();
    let provider: Box<dyn TranslationProvider> = match (&c.endpoint, c.passthrough) {
        (_, true) => Box::new(PassthroughProvider),
        (Some(endpoint), false) => Box::new(HttpTranslationProvider::new(endpoint.clone())),
        (None, false) => {
            return Err(CliError::Config(
                "translate needs an endpoint or --passthrough".into(),
            ));
        }
    };
    let reviews: Vec<RedPacketReview> = ctx.read_jsonl(&dir.join(RED_PACKET_FILE))?;
    let cache_path = ctx.out_dir()?.join(TRANSLATION_CACHE_FILE);
    let mut cache = TranslationCache::load(&cache_path).context("reading translation cache")?;
    let options = TranslateOptions {
        batch_size: c.batch_size,
        retry: RetryPolicy {
            max_retries: c.max_retries,
            ..RetryPolicy::default()
        },
    };
    let result = translate_reviews(reviews, provider.as_ref(), &mut cache, &options);
    // the cache keeps whatever succeeded, so a rerun only resends failures
    cache.save(&cache_path)?;
    ctx.outputs.push(cache_path);
    match result {
        Ok(translated) => {
            let n = translated
                .iter()
                .filter(|r| r.source_text.is_some())
                .count();
            ctx.write_jsonl(TRANSLATED_FILE, &translated)?;
            println!("{} reviews, {n} translated", translated.len());
            Ok(())
        }
        Err(TranslateError::Partial {
            untranslated,
            cause,
            ..
        }) => Err(CliError::Provider(format!(
            "{} review(s) could not be translated: {cause}",
            untranslated.len()
        ))),
        Err(e) => Err(CliError::Other(e.into())),
    }
}

pub fn embed(ctx: &mut Ctx) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let embedder = CliEmbedder::from_config(&ctx.config.embed)?;
    let reviews = latest_red_packet(ctx, &dir)?;
    let texts: Vec<&str> = reviews.iter().map(|r| r.joined_text.as_str()).collect();
    let vectors = embedder.embed(&texts).map_err(embed_error)?;
    let out: Vec<EmbeddedReview> = reviews
        .iter()
        .zip(vectors)
        .map(|(r, vector)| EmbeddedReview {
            review_id: r.review_id.clone(),
            market: r.market.clone(),
            vector,
        })
        .collect();
    ctx.write_jsonl(EMBEDDINGS_FILE, &out)?;
    println!("embedded {} reviews", out.len());
    Ok(())
}
