//! K-Means clustering of review vectors and elbow-based choice of k.

mod elbow;
mod kmeans;

use thiserror::Error;

pub use elbow::{kneedle_elbow, max_chord_elbow, sweep_sse, ElbowMethod, ElbowResult, SseCurve};
pub use kmeans::{compute_sse, kmeans_fit, squared_distance, ClusterModel, KMeansConfig};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k must be positive, got {0}")]
    InvalidK(usize),
    #[error("cannot form {k} clusters from {points} points")]
    TooFewPoints { k: usize, points: usize },
    #[error("invalid k range {k_min}..={k_max} for {points} points")]
    InvalidRange {
        k_min: usize,
        k_max: usize,
        points: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid SSE curve: {0}")]
    InvalidCurve(String),
    #[error("elbow detection needs at least 3 points, got {0}")]
    TooShortCurve(usize),
    #[error("no elbow: {0}")]
    NoElbow(String),
}
