//! Binary negative / non-negative classification of red-packet reviews.
//!
//! Logistic regression over embedding vectors, trained by full-batch
//! gradient descent from zero weights. "Negative" is the positive class for
//! every metric.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::MarketId;
use crate::embed::{EmbedError, Embedder, TextVector};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("class {label} has {available} examples, {requested} requested for training")]
    InsufficientClass {
        label: Label,
        available: usize,
        requested: usize,
    },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains only {0} examples")]
    SingleClass(Label),
    #[error("dimension mismatch: model has {expected}, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported model format version {0}")]
    FormatVersion(u32),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("model file {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("model file {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Negative,
    NonNegative,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Negative => "negative",
            Label::NonNegative => "non_negative",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Label::Negative),
            "non_negative" => Ok(Label::NonNegative),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    AnnotatorConsensus,
    Synthetic,
}

/// A labelled text as exchanged on disk: the annotation export and the
/// training input share this shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub review_id: String,
    pub text: String,
    pub label: Label,
    #[serde(default)]
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledReview {
    pub review_id: String,
    pub vector: TextVector,
    pub label: Label,
    pub provenance: Provenance,
}

/// Embeds labelled texts, keeping ids, labels and provenance.
pub fn embed_labeled(
    texts: &[LabeledText],
    embedder: &dyn Embedder,
) -> Result<Vec<LabeledReview>, SentimentError> {
    let refs: Vec<&str> = texts.iter().map(|t| t.text.as_str()).collect();
    let vectors = embedder.embed(&refs)?;
    Ok(texts
        .iter()
        .zip(vectors)
        .map(|(t, vector)| LabeledReview {
            review_id: t.review_id.clone(),
            vector,
            label: t.label,
            provenance: t.provenance,
        })
        .collect())
}

/// Default training size per class: 80% of the smaller class.
pub fn default_train_per_class(labeled: &[LabeledReview]) -> usize {
    let neg = labeled
        .iter()
        .filter(|l| l.label == Label::Negative)
        .count();
    let smaller = neg.min(labeled.len() - neg);
    smaller * 4 / 5
}

/// Splits each class into `train_per_class` training examples and a test
/// remainder. Deterministic for a seed.
pub fn stratified_split(
    labeled: &[LabeledReview],
    train_per_class: usize,
    seed: u64,
) -> Result<(Vec<LabeledReview>, Vec<LabeledReview>), SentimentError> {
    let mut train = Vec::new();
    let mut test_idx = Vec::new();
    for label in [Label::Negative, Label::NonNegative] {
        let mut idx: Vec<usize> = (0..labeled.len())
            .filter(|&i| labeled[i].label == label)
            .collect();
        if idx.len() < train_per_class {
            return Err(SentimentError::InsufficientClass {
                label,
                available: idx.len(),
                requested: train_per_class,
            });
        }
        let class_seed = seed
            ^ if label == Label::Negative {
                0
            } else {
                0x9e37_79b9_7f4a_7c15
            };
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(class_seed));
        train.extend(idx[..train_per_class].iter().map(|&i| labeled[i].clone()));
        test_idx.extend_from_slice(&idx[train_per_class..]);
    }
    test_idx.sort_unstable();
    let test = test_idx.into_iter().map(|i| labeled[i].clone()).collect();
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_penalty: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 500,
            l2_penalty: 1e-4,
            seed: 42,
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn target(label: Label) -> f64 {
    match label {
        Label::Negative => 1.0,
        Label::NonNegative => 0.0,
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Mean logistic loss plus `l2/2 * |w|^2` (bias unpenalised).
pub fn logistic_loss(weights: &[f64], bias: f64, data: &[LabeledReview], l2_penalty: f64) -> f64 {
    let n = data.len() as f64;
    let data_loss: f64 = data
        .iter()
        .map(|ex| {
            let z = dot(weights, ex.vector.values()) + bias;
            // -[y ln s + (1-y) ln(1-s)] = softplus(z) - y z
            softplus(z) - target(ex.label) * z
        })
        .sum::<f64>()
        / n;
    data_loss + 0.5 * l2_penalty * dot(weights, weights)
}

/// Gradient of [`logistic_loss`] with respect to `(weights, bias)`.
pub fn loss_gradient(
    weights: &[f64],
    bias: f64,
    data: &[LabeledReview],
    l2_penalty: f64,
) -> (Vec<f64>, f64) {
    let n = data.len() as f64;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for ex in data {
        let x = ex.vector.values();
        let err = sigmoid(dot(weights, x) + bias) - target(ex.label);
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += err * xi;
        }
        gb += err;
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2_penalty * w;
    }
    (gw, gb / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    /// Absent when the denominator is zero.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl Metrics {
    pub fn from_counts(c: ConfusionCounts) -> Self {
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            _ => None,
        };
        Metrics {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            tn: c.tn,
            precision,
            recall,
            f1,
        }
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.tp + self.fp + self.fn_ + self.tn;
        (total > 0).then(|| (self.tp + self.tn) as f64 / total as f64)
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        write!(
            f,
            "tp={} fp={} fn={} tn={} P={} R={} F1={}",
            self.tp,
            self.fp,
            self.fn_,
            self.tn,
            show(self.precision),
            show(self.recall),
            show(self.f1)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub probability: f64,
}

/// Output record of the classify stage, one per red-packet review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedReview {
    pub review_id: String,
    pub market: MarketId,
    pub label: Label,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub format_version: u32,
    pub dims: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
    pub train_config: TrainConfig,
    /// Training loss after each epoch, starting with the loss at zero weights.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loss_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
}

impl ClassifierModel {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }

    /// `sigmoid(w.x + b)`; negative when the probability reaches the threshold.
    pub fn predict(&self, vector: &TextVector) -> Result<Prediction, SentimentError> {
        if vector.dims() != self.dims {
            return Err(SentimentError::DimensionMismatch {
                expected: self.dims,
                found: vector.dims(),
            });
        }
        let probability = sigmoid(dot(&self.weights, vector.values()) + self.bias);
        let label = if probability >= self.threshold {
            Label::Negative
        } else {
            Label::NonNegative
        };
        Ok(Prediction { label, probability })
    }

    pub fn save(&self, path: &Path) -> Result<(), SentimentError> {
        let json = serde_json::to_string_pretty(self).map_err(|source| SentimentError::Json {
            path: path.display().to_string(),
            source,
        })?;
        fs::write(path, json + "\n").map_err(|source| SentimentError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SentimentError> {
        let contents = fs::read_to_string(path).map_err(|source| SentimentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let model: ClassifierModel =
            serde_json::from_str(&contents).map_err(|source| SentimentError::Json {
                path: path.display().to_string(),
                source,
            })?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(SentimentError::FormatVersion(model.format_version));
        }
        if model.weights.len() != model.dims {
            return Err(SentimentError::DimensionMismatch {
                expected: model.dims,
                found: model.weights.len(),
            });
        }
        Ok(model)
    }
}

pub fn predict(model: &ClassifierModel, vector: &TextVector) -> Result<Prediction, SentimentError> {
    model.predict(vector)
}

pub fn train_classifier(
    train: &[LabeledReview],
    config: &TrainConfig,
) -> Result<ClassifierModel, SentimentError> {
    let first = train.first().ok_or(SentimentError::EmptyTrainingSet)?;
    if train.iter().all(|ex| ex.label == first.label) {
        return Err(SentimentError::SingleClass(first.label));
    }
    let dims = first.vector.dims();
    if let Some(bad) = train.iter().find(|ex| ex.vector.dims() != dims) {
        return Err(SentimentError::DimensionMismatch {
            expected: dims,
            found: bad.vector.dims(),
        });
    }

    let mut weights = vec![0.0; dims];
    let mut bias = 0.0;
    let mut loss_history = Vec::with_capacity(config.epochs + 1);
    loss_history.push(logistic_loss(&weights, bias, train, config.l2_penalty));
    for _ in 0..config.epochs {
        let (gw, gb) = loss_gradient(&weights, bias, train, config.l2_penalty);
        for (w, g) in weights.iter_mut().zip(&gw) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * gb;
        loss_history.push(logistic_loss(&weights, bias, train, config.l2_penalty));
    }

    Ok(ClassifierModel {
        format_version: MODEL_FORMAT_VERSION,
        dims,
        weights,
        bias,
        threshold: 0.5,
        train_config: *config,
        loss_history,
        metrics: None,
    })
}

/// Confusion counts with negative as the positive class.
pub fn evaluate(
    model: &ClassifierModel,
    test: &[LabeledReview],
) -> Result<Metrics, SentimentError> {
    let mut c = ConfusionCounts::default();
    for ex in test {
        let predicted = model.predict(&ex.vector)?.label;
        match (predicted, ex.label) {
            (Label::Negative, Label::Negative) => c.tp += 1,
            (Label::Negative, Label::NonNegative) => c.fp += 1,
            (Label::NonNegative, Label::Negative) => c.fn_ += 1,
            (Label::NonNegative, Label::NonNegative) => c.tn += 1,
        }
    }
    Ok(Metrics::from_counts(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(id: usize, values: Vec<f64>, label: Label) -> LabeledReview {
        LabeledReview {
            review_id: id.to_string(),
            vector: TextVector::normalize(values),
            label,
            provenance: Provenance::Synthetic,
        }
    }

    fn zero_model(dims: usize) -> ClassifierModel {
        ClassifierModel {
            format_version: MODEL_FORMAT_VERSION,
            dims,
            weights: vec![0.0; dims],
            bias: 0.0,
            threshold: 0.5,
            train_config: TrainConfig::default(),
            loss_history: vec![],
            metrics: None,
        }
    }

    #[test]
    fn opposite_pair_is_separated() {
        let data = vec![
            ex(0, vec![1.0, 0.0], Label::Negative),
            ex(1, vec![-1.0, 0.0], Label::NonNegative),
        ];
        let cfg = TrainConfig {
            epochs: 200,
            ..TrainConfig::default()
        };
        let model = train_classifier(&data, &cfg).unwrap();
        let m = evaluate(&model, &data).unwrap();
        assert_eq!(m.accuracy(), Some(1.0));
    }

    #[test]
    fn single_class_rejected() {
        let data = vec![ex(0, vec![1.0, 0.0], Label::Negative)];
        assert!(matches!(
            train_classifier(&data, &TrainConfig::default()),
            Err(SentimentError::SingleClass(Label::Negative))
        ));
        assert!(matches!(
            train_classifier(&[], &TrainConfig::default()),
            Err(SentimentError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn zero_model_is_half_and_negative() {
        let p = zero_model(3)
            .predict(&TextVector::normalize(vec![1.0, 2.0, 3.0]))
            .unwrap();
        assert_eq!(p.probability, 0.5);
        assert_eq!(p.label, Label::Negative);
    }

    #[test]
    fn huge_bias_saturates() {
        let mut m = zero_model(2);
        m.bias = 1e6;
        assert_eq!(
            m.predict(&TextVector::normalize(vec![1.0, 0.0]))
                .unwrap()
                .probability,
            1.0
        );
        m.bias = -1e6;
        let p = m.predict(&TextVector::normalize(vec![1.0, 0.0])).unwrap();
        assert_eq!(p.probability, 0.0);
        assert_eq!(p.label, Label::NonNegative);
    }

    #[test]
    fn dims_mismatch_is_error() {
        assert!(matches!(
            zero_model(3).predict(&TextVector::normalize(vec![1.0, 0.0])),
            Err(SentimentError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn hand_confusion_matrix() {
        let m = Metrics::from_counts(ConfusionCounts {
            tp: 2,
            fp: 1,
            fn_: 0,
            tn: 7,
        });
        assert_eq!(format!("{:.3}", m.precision.unwrap()), "0.667");
        assert_eq!(m.recall, Some(1.0));
        assert!((m.f1.unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn undefined_metrics_are_absent() {
        let m = Metrics::from_counts(ConfusionCounts {
            tp: 0,
            fp: 0,
            fn_: 0,
            tn: 5,
        });
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.f1, None);
        let m = Metrics::from_counts(ConfusionCounts {
            tp: 0,
            fp: 2,
            fn_: 3,
            tn: 5,
        });
        assert_eq!(m.precision, Some(0.0));
        assert_eq!(m.f1, None);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let data: Vec<_> = (0..30)
            .map(|i| {
                let label = if i % 3 == 0 {
                    Label::Negative
                } else {
                    Label::NonNegative
                };
                ex(i, vec![i as f64 + 1.0, 1.0], label)
            })
            .collect();
        let (train, test) = stratified_split(&data, 5, 7).unwrap();
        assert_eq!(train.len(), 10);
        assert_eq!(test.len(), 20);
        assert_eq!(
            train.iter().filter(|e| e.label == Label::Negative).count(),
            5
        );
        let (train2, test2) = stratified_split(&data, 5, 7).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);

        let (empty, all) = stratified_split(&data, 0, 7).unwrap();
        assert!(empty.is_empty());
        assert_eq!(all.len(), 30);

        assert!(matches!(
            stratified_split(&data, 11, 7),
            Err(SentimentError::InsufficientClass {
                label: Label::Negative,
                available: 10,
                ..
            })
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut m = zero_model(4);
        m.metrics = Some(Metrics::from_counts(ConfusionCounts {
            tp: 1,
            fp: 0,
            fn_: 0,
            tn: 1,
        }));
        m.save(&path).unwrap();
        assert_eq!(ClassifierModel::load(&path).unwrap(), m);
        let text = fs::read_to_string(&path).unwrap();
        for key in [
            "format_version",
            "dims",
            "weights",
            "bias",
            "threshold",
            "train_config",
            "metrics",
        ] {
            assert!(text.contains(&format!("\"{key}\"")), "missing {key}");
        }
    }
}
