//! `reckmine`: runs the review-mining pipeline one stage at a time.

mod config;
mod context;
mod error;
mod manifest;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use config::{Config, EmbedBackend};
use context::Ctx;
use error::{CliError, CliResult};
use manifest::ManifestEntry;

#[derive(Debug, Parser)]
#[command(
    name = "reckmine",
    version,
    about = "Mine app reviews that mention red-packet rewards"
)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed for every seeded stage [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stage input: a file or a run directory, depending on the stage.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output directory [default: the input directory, or `.` for file inputs].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Import review JSON lines into a review store.
    Import {
        /// Market of every input file; otherwise taken from the file name.
        #[arg(long)]
        market: Option<String>,
        /// App list (JSON lines of app_id, market, category, has_red_packet).
        #[arg(long)]
        apps: Option<PathBuf>,
    },
    /// Keep the red-packet segments of each review.
    Filter {
        #[arg(long)]
        keywords_en: Option<PathBuf>,
        #[arg(long)]
        keywords_zh: Option<PathBuf>,
    },
    /// Translate non-English red-packet reviews into English.
    Translate {
        #[arg(long)]
        endpoint: Option<String>,
        /// Keep texts as they are instead of calling a provider.
        #[arg(long)]
        passthrough: bool,
    },
    /// Embed red-packet reviews.
    Embed {
        #[arg(long, value_enum)]
        backend: Option<EmbedBackend>,
        #[arg(long)]
        dims: Option<usize>,
        #[arg(long)]
        endpoint: Option<String>,
    },
    /// Train the negative-sentiment classifier on labelled texts.
    Train {
        /// Labelled texts as JSON lines or a JSON array.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
    },
    /// Label every embedded review negative or non-negative.
    Classify {
        /// Model file [default: model.json in the input directory].
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Cluster the negative reviews with K-Means.
    Cluster {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Sweep k and pick the elbow of the SSE curve.
    Elbow {
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        /// Use an existing `k,sse` CSV instead of sweeping.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Extract keywords and summarise each cluster.
    Summarize {
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        max_reviews: Option<usize>,
        #[arg(long)]
        char_budget: Option<usize>,
    },
    /// Write distribution, fraud, hot-word and anti-virus reports.
    Report {
        #[arg(long)]
        av_flags: Option<PathBuf>,
        #[arg(long)]
        min_freq: Option<u64>,
        /// Build the market table from a counts CSV instead of the run directory.
        #[arg(long)]
        market_counts: Option<PathBuf>,
        #[arg(long)]
        category_counts: Option<PathBuf>,
        #[arg(long)]
        fraud_counts: Option<PathBuf>,
    },
    /// Classify hooked pop-up events and score their text.
    DetectPopup {
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        generic_texts: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Serve the annotation workflow and run artifacts over HTTP.
    Serve {
        #[arg(long)]
        addr: Option<std::net::SocketAddr>,
        #[arg(long)]
        store: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Import { .. } => "import",
            Command::Filter { .. } => "filter",
            Command::Translate { .. } => "translate",
            Command::Embed { .. } => "embed",
            Command::Train { .. } => "train",
            Command::Classify { .. } => "classify",
            Command::Cluster { .. } => "cluster",
            Command::Elbow { .. } => "elbow",
            Command::Summarize { .. } => "summarize",
            Command::Report { .. } => "report",
            Command::DetectPopup { .. } => "detect-popup",
            Command::Serve { .. } => "serve",
        }
    }

    /// Writes stage flags into the config so the manifest records the
    /// effective settings.
    fn apply(&self, c: &mut Config) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                *slot = v.clone();
            }
        }
        match self {
            Command::Import { market, apps } => {
                set_opt(&mut c.import.market, market);
                set_opt(&mut c.import.apps, apps);
            }
            Command::Filter {
                keywords_en,
                keywords_zh,
            } => {
                set_opt(&mut c.filter.keywords_en, keywords_en);
                set_opt(&mut c.filter.keywords_zh, keywords_zh);
            }
            Command::Translate {
                endpoint,
                passthrough,
            } => {
                set_opt(&mut c.translate.endpoint, endpoint);
                c.translate.passthrough |= passthrough;
            }
            Command::Embed {
                backend,
                dims,
                endpoint,
            } => {
                set(&mut c.embed.backend, backend);
                set(&mut c.embed.dims, dims);
                set_opt(&mut c.embed.endpoint, endpoint);
            }
            Command::Train {
                labels,
                epochs,
                learning_rate,
            } => {
                set_opt(&mut c.train.labels, labels);
                set(&mut c.train.epochs, epochs);
                set(&mut c.train.learning_rate, learning_rate);
            }
            Command::Classify { .. } => {}
            Command::Cluster { k, k_min, k_max } => {
                set_opt(&mut c.cluster.k, k);
                set(&mut c.cluster.k_min, k_min);
                set(&mut c.cluster.k_max, k_max);
            }
            Command::Elbow { k_min, k_max, .. } => {
                set(&mut c.cluster.k_min, k_min);
                set(&mut c.cluster.k_max, k_max);
            }
            Command::Summarize {
                endpoint,
                template,
                max_reviews,
                char_budget,
            } => {
                set_opt(&mut c.summarize.endpoint, endpoint);
                set_opt(&mut c.summarize.template, template);
                set(&mut c.summarize.max_reviews, max_reviews);
                set_opt(&mut c.summarize.char_budget, char_budget);
            }
            Command::Report {
                av_flags,
                min_freq,
                market_counts,
                category_counts,
                fraud_counts,
            } => {
                set_opt(&mut c.report.av_flags, av_flags);
                set(&mut c.report.hot_word_min_freq, min_freq);
                set_opt(&mut c.report.market_counts, market_counts);
                set_opt(&mut c.report.category_counts, category_counts);
                set_opt(&mut c.report.fraud_counts, fraud_counts);
            }
            Command::DetectPopup {
                rules,
                generic_texts,
                threshold,
            } => {
                set_opt(&mut c.popup.rules, rules);
                set_opt(&mut c.popup.generic_texts, generic_texts);
                set(&mut c.popup.threshold, threshold);
            }
            Command::Serve { addr, store } => {
                set(&mut c.serve.addr, addr);
                set_opt(&mut c.serve.store, store);
            }
        }
    }
}

fn run_stage(command: &Command, ctx: &mut Ctx) -> CliResult<()> {
    match command {
        Command::Import { .. } => stages::prepare::import(ctx),
        Command::Filter { .. } => stages::prepare::filter(ctx),
        Command::Translate { .. } => stages::prepare::translate(ctx),
        Command::Embed { .. } => stages::prepare::embed(ctx),
        Command::Train { .. } => stages::sentiment::train(ctx),
        Command::Classify { model } => stages::sentiment::classify(ctx, model.as_deref()),
        Command::Cluster { .. } => stages::clusters::cluster(ctx),
        Command::Elbow { curve, .. } => stages::clusters::elbow(ctx, curve.as_deref()),
        Command::Summarize { .. } => stages::clusters::summarize(ctx),
        Command::Report { .. } => stages::report::report(ctx),
        Command::DetectPopup { .. } => stages::popup::detect(ctx),
        Command::Serve { .. } => stages::serve::serve(ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let started = Instant::now();
    let started_at_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);

    let loaded = match &cli.config {
        Some(path) => Config::load(path),
        None => Ok(Config::default()),
    };
    let (mut config, load_error) = match loaded {
        Ok(c) => (c, None),
        Err(e) => (Config::default(), Some(e)),
    };
    cli.command.apply(&mut config);
    let seed = cli.seed.or(config.seed).unwrap_or(42);
    config.seed = Some(seed);

    let mut ctx = Ctx::new(config, seed, cli.input, cli.out);
    let result = match load_error {
        Some(e) => Err(e),
        None => run_stage(&cli.command, &mut ctx),
    };
    let code = result.as_ref().err().map(CliError::exit_code).unwrap_or(0);
    if let Err(e) = &result {
        eprintln!("reckmine {}: {e}", cli.command.name());
    }

    // serve appends its entry before it starts listening
    if !matches!(cli.command, Command::Serve { .. }) || result.is_err() {
        if let Some(dir) = ctx.manifest_dir() {
            let entry = ManifestEntry {
                stage: cli.command.name().to_string(),
                status: if result.is_ok() { "ok" } else { "failed" },
                exit_code: code,
                error: result.as_ref().err().map(ToString::to_string),
                inputs: ctx.inputs.clone(),
                outputs: ctx.outputs.clone(),
                seed,
                config: serde_json::to_value(&ctx.config).unwrap_or_default(),
                tool_version: env!("CARGO_PKG_VERSION"),
                started_at_unix,
                wall_time_ms: started.elapsed().as_millis(),
            };
            if let Err(e) = manifest::append(&dir, &entry) {
                log::warn!("could not append to the run manifest: {e}");
            }
        }
    }
    ExitCode::from(code as u8)
}
