use reckmine_core::embed::{HashingEmbedder, TextVector};
use reckmine_core::sentiment::{
    default_train_per_class, embed_labeled, evaluate, logistic_loss, loss_gradient,
    stratified_split, train_classifier, ClassifierModel, ConfusionCounts, Label, LabeledReview,
    Metrics, Provenance, TrainConfig,
};
use reckmine_core::synth;

fn separable(seed: u64) -> Vec<LabeledReview> {
    let texts = synth::separable_corpus(500, seed);
    embed_labeled(&texts, &HashingEmbedder::new(512).unwrap()).unwrap()
}

fn central_difference(w: &[f64], b: f64, data: &[LabeledReview], l2: f64) -> (Vec<f64>, f64) {
    let h = 1e-5;
    let mut gw = Vec::with_capacity(w.len());
    let mut wp = w.to_vec();
    for i in 0..w.len() {
        let orig = wp[i];
        wp[i] = orig + h;
        let up = logistic_loss(&wp, b, data, l2);
        wp[i] = orig - h;
        let down = logistic_loss(&wp, b, data, l2);
        wp[i] = orig;
        gw.push((up - down) / (2.0 * h));
    }
    let gb = (logistic_loss(w, b + h, data, l2) - logistic_loss(w, b - h, data, l2)) / (2.0 * h);
    (gw, gb)
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm
}

#[test]
fn gradient_matches_finite_differences() {
    let data: Vec<LabeledReview> = separable(42).into_iter().step_by(10).collect();
    let dims = data[0].vector.dims();
    let l2 = 1e-4;
    for (w, b) in [
        (vec![0.0; dims], 0.0),
        (
            (0..dims)
                .map(|i| ((i * 37 % 11) as f64 - 5.0) / 10.0)
                .collect::<Vec<_>>(),
            0.3,
        ),
    ] {
        let (gw, gb) = loss_gradient(&w, b, &data, l2);
        let (fw, fb) = central_difference(&w, b, &data, l2);
        let mut an = gw.clone();
        an.push(gb);
        let mut fd = fw.clone();
        fd.push(fb);
        let err = relative_error(&fd, &an);
        assert!(err < 1e-6, "relative error {err}");
    }
}

#[test]
fn separable_corpus_f1_at_least_095() {
    let labeled = separable(42);
    let per_class = default_train_per_class(&labeled);
    assert_eq!(per_class, 400);
    let (train, test) = stratified_split(&labeled, per_class, 42).unwrap();
    let model = train_classifier(&train, &TrainConfig::default()).unwrap();
    let m = evaluate(&model, &test).unwrap();
    assert!(m.f1.unwrap() >= 0.95, "{m}");
    // training loss never increases for a convex objective with this step
    assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn hand_confusion_matrix() {
    let m = Metrics::from_counts(ConfusionCounts {
        tp: 2,
        fp: 1,
        fn_: 0,
        tn: 0,
    });
    assert_eq!(format!("{:.3}", m.precision.unwrap()), "0.667");
    assert_eq!(m.recall, Some(1.0));
    assert!((m.f1.unwrap() - 0.8).abs() < 1e-12);
    assert_eq!(format!("{:.3}", m.f1.unwrap()), "0.800");
}

#[test]
fn undefined_metrics_are_absent() {
    let m = Metrics::from_counts(ConfusionCounts {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 5,
    });
    assert_eq!((m.precision, m.recall, m.f1), (None, None, None));
    let m = Metrics::from_counts(ConfusionCounts {
        tp: 0,
        fp: 3,
        fn_: 2,
        tn: 5,
    });
    assert_eq!(m.precision, Some(0.0));
    assert_eq!(m.f1, None);
}

fn point(id: &str, v: Vec<f64>, label: Label) -> LabeledReview {
    LabeledReview {
        review_id: id.into(),
        vector: TextVector::normalize(v),
        label,
        provenance: Provenance::Synthetic,
    }
}

#[test]
fn opposite_vectors_separate_within_200_epochs() {
    let data = vec![
        point("a", vec![1.0, 0.0], Label::Negative),
        point("b", vec![-1.0, 0.0], Label::NonNegative),
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
fn split_is_deterministic_and_stratified() {
    let labeled = separable(1);
    let (a_train, a_test) = stratified_split(&labeled, 100, 42).unwrap();
    let (b_train, b_test) = stratified_split(&labeled, 100, 42).unwrap();
    assert_eq!(a_train, b_train);
    assert_eq!(a_test, b_test);
    assert_eq!(
        a_train
            .iter()
            .filter(|l| l.label == Label::Negative)
            .count(),
        100
    );
    assert_eq!(a_test.len(), 800);
    assert!(stratified_split(&labeled, 501, 42).is_err());
}

#[test]
fn model_round_trip() {
    let labeled = separable(2);
    let (train, _) = stratified_split(&labeled, 50, 42).unwrap();
    let model = train_classifier(
        &train,
        &TrainConfig {
            epochs: 20,
            ..TrainConfig::default()
        },
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    assert_eq!(ClassifierModel::load(&path).unwrap(), model);
    let other = TextVector::normalize(vec![1.0; 8]);
    assert!(model.predict(&other).is_err());
}
