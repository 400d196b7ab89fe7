//! train, classify.

use std::path::Path;

use reckmine_core::artifacts::{self, EmbeddedReview, CLASSIFIED_FILE, LABELED_FILE, MODEL_FILE};
use reckmine_core::sentiment::{
    default_train_per_class, embed_labeled, evaluate, stratified_split, train_classifier,
    ClassifiedReview, ClassifierModel, Label, LabeledText, SentimentError, TrainConfig,
};

use super::embedder::{embed_error, CliEmbedder};
use crate::context::Ctx;
use crate::error::{CliError, CliResult};

fn sentiment_error(e: SentimentError) -> CliError {
    match e {
        SentimentError::Embed(e) => embed_error(e),
        e => CliError::Other(e.into()),
    }
}

pub fn train(ctx: &mut Ctx) -> CliResult<()> {
    let labels_path = match ctx.config.train.labels.clone() {
        Some(p) => p,
        None => ctx.run_dir()?.join(LABELED_FILE),
    };
    let texts: Vec<LabeledText> = artifacts::read_records(&labels_path)?;
    ctx.note_input(&labels_path);
    let embedder = CliEmbedder::from_config(&ctx.config.embed)?;
    let labeled = embed_labeled(&texts, &embedder).map_err(sentiment_error)?;

    let t = &ctx.config.train;
    let per_class = t
        .train_per_class
        .unwrap_or_else(|| default_train_per_class(&labeled));
    let config = TrainConfig {
        learning_rate: t.learning_rate,
        epochs: t.epochs,
        l2_penalty: t.l2_penalty,
        seed: ctx.seed,
    };
    let (train_set, test_set) =
        stratified_split(&labeled, per_class, ctx.seed).map_err(sentiment_error)?;
    let mut model = train_classifier(&train_set, &config).map_err(sentiment_error)?;
    let metrics = evaluate(&model, &test_set).map_err(sentiment_error)?;
    model.metrics = Some(metrics);
    let path = ctx.out_path(MODEL_FILE)?;
    model.save(&path).map_err(sentiment_error)?;
    println!(
        "trained on {} examples, held out {}: {metrics}",
        train_set.len(),
        test_set.len()
    );
    Ok(())
}

pub fn classify(ctx: &mut Ctx, model_path: Option<&Path>) -> CliResult<()> {
    let dir = ctx.run_dir()?;
    let model_path = model_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join(MODEL_FILE));
    if !model_path.exists() {
        return Err(CliError::MissingInput(format!(
            "model not found: {} (run train first)",
            model_path.display()
        )));
    }
    ctx.note_input(&model_path);
    let model = ClassifierModel::load(&model_path).map_err(sentiment_error)?;
    let embedded: Vec<EmbeddedReview> = ctx.read_jsonl(&dir.join(artifacts::EMBEDDINGS_FILE))?;
    let mut out = Vec::with_capacity(embedded.len());
    for e in &embedded {
        let p = model.predict(&e.vector).map_err(sentiment_error)?;
        out.push(ClassifiedReview {
            review_id: e.review_id.clone(),
            market: e.market.clone(),
            label: p.label,
            probability: p.probability,
        });
    }
    ctx.write_jsonl(CLASSIFIED_FILE, &out)?;
    let negative = out.iter().filter(|c| c.label == Label::Negative).count();
    println!("{negative} of {} reviews classified negative", out.len());
    Ok(())
}
