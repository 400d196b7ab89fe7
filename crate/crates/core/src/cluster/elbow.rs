//! SSE sweeps over k and automatic elbow selection.
//!
//! The primary selector is Kneedle for decreasing convex curves without
//! smoothing: both axes are min-max normalised, the difference curve is
//! `(1 - y_n) - x_n`, and the elbow is its maximum. A second selector, the
//! point farthest below the chord joining the curve's endpoints, is kept as
//! a cross-check.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans_fit, KMeansConfig};
use super::ClusterError;

/// Difference-curve maxima at or below this are treated as "no elbow".
const FLAT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SseCurve {
    points: Vec<(usize, f64)>,
}

impl SseCurve {
    pub fn new(points: Vec<(usize, f64)>) -> Result<Self, ClusterError> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(ClusterError::InvalidCurve(
                "k values must be strictly increasing".into(),
            ));
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return Err(ClusterError::InvalidCurve("non-finite SSE".into()));
        }
        Ok(SseCurve { points })
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "sse"])?;
        for (k, sse) in &self.points {
            w.write_record([k.to_string(), sse.to_string()])?;
        }
        w.flush()
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, ClusterError> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader
            .headers()
            .map_err(|e| ClusterError::InvalidCurve(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["k", "sse"] {
            return Err(ClusterError::InvalidCurve("expected header k,sse".into()));
        }
        let mut points = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| ClusterError::InvalidCurve(e.to_string()))?;
            let k = rec[0]
                .trim()
                .parse()
                .map_err(|_| ClusterError::InvalidCurve(format!("bad k {:?}", &rec[0])))?;
            let sse = rec[1]
                .trim()
                .parse()
                .map_err(|_| ClusterError::InvalidCurve(format!("bad sse {:?}", &rec[1])))?;
            points.push((k, sse));
        }
        Self::new(points)
    }
}

/// Best-of-restarts SSE for every k in `k_min..=k_max`.
pub fn sweep_sse<P: AsRef<[f64]> + Sync>(
    points: &[P],
    k_min: usize,
    k_max: usize,
    config: &KMeansConfig,
) -> Result<SseCurve, ClusterError> {
    if k_min == 0 || k_min > k_max || k_max > points.len() {
        return Err(ClusterError::InvalidRange {
            k_min,
            k_max,
            points: points.len(),
        });
    }
    let mut curve = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let model = kmeans_fit(points, &KMeansConfig { k, ..*config })?;
        curve.push((k, model.sse));
    }
    SseCurve::new(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElbowMethod {
    Kneedle,
    MaxChordDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowResult {
    pub optimal_k: usize,
    pub method: ElbowMethod,
    /// `(k, score)` for every point: the Kneedle difference curve, or the
    /// normalised distance below the chord.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_difference_curve: Option<Vec<(usize, f64)>>,
}

fn normalized(curve: &SseCurve) -> Result<Vec<(usize, f64, f64)>, ClusterError> {
    let pts = curve.points();
    if pts.len() < 3 {
        return Err(ClusterError::TooShortCurve(pts.len()));
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    if last.1 >= first.1 {
        return Err(ClusterError::NoElbow("curve does not decrease".into()));
    }
    let x_min = first.0 as f64;
    let x_span = (last.0 - first.0) as f64;
    let y_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y_max = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let y_span = y_max - y_min;
    Ok(pts
        .iter()
        .map(|&(k, y)| (k, (k as f64 - x_min) / x_span, (y - y_min) / y_span))
        .collect())
}

fn argmax(scores: &[(usize, f64)]) -> Result<usize, ClusterError> {
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    if best.1 <= FLAT_EPS {
        return Err(ClusterError::NoElbow("difference curve is flat".into()));
    }
    Ok(best.0)
}

/// Kneedle elbow of a decreasing convex SSE curve (smaller k on ties).
pub fn kneedle_elbow(curve: &SseCurve) -> Result<ElbowResult, ClusterError> {
    let diff: Vec<(usize, f64)> = normalized(curve)?
        .into_iter()
        .map(|(k, x, y)| (k, (1.0 - y) - x))
        .collect();
    Ok(ElbowResult {
        optimal_k: argmax(&diff)?,
        method: ElbowMethod::Kneedle,
        normalized_difference_curve: Some(diff),
    })
}

/// Point farthest below the chord from the first to the last point, in
/// normalised coordinates.
pub fn max_chord_elbow(curve: &SseCurve) -> Result<ElbowResult, ClusterError> {
    let norm = normalized(curve)?;
    let (_, x0, y0) = norm[0];
    let (_, x1, y1) = norm[norm.len() - 1];
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    let dist: Vec<(usize, f64)> = norm
        .iter()
        // signed distance, positive below the chord
        .map(|&(k, x, y)| (k, (dy * (x - x0) - dx * (y - y0)) / len))
        .collect();
    Ok(ElbowResult {
        optimal_k: argmax(&dist)?,
        method: ElbowMethod::MaxChordDistance,
        normalized_difference_curve: Some(dist),
    })
}
