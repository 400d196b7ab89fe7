//! Lloyd's K-Means with k-means++ seeding and best-of-N restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClusterError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            k: 6,
            max_iter: 300,
            tol: 1e-6,
            seed: 42,
            restarts: 10,
        }
    }
}

impl KMeansConfig {
    pub fn with_k(k: usize) -> Self {
        KMeansConfig {
            k,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub sse: f64,
    /// SSE after each Lloyd iteration of the winning restart.
    pub sse_history: Vec<f64>,
    pub iterations: usize,
    pub config: KMeansConfig,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centroids.len()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    /// Indices of the points in `cluster`, nearest to its centroid first
    /// (ties by index).
    pub fn members_by_distance<P: AsRef<[f64]>>(
        &self,
        points: &[P],
        cluster: usize,
    ) -> Vec<(usize, f64)> {
        let mut members: Vec<(usize, f64)> = self
            .assignments
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == cluster)
            .map(|(i, _)| {
                (
                    i,
                    squared_distance(points[i].as_ref(), &self.centroids[cluster]),
                )
            })
            .collect();
        members.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        members
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum of squared distances of each point to its assigned centroid.
pub fn compute_sse<P: AsRef<[f64]>>(
    points: &[P],
    centroids: &[Vec<f64>],
    assignments: &[usize],
) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p.as_ref(), &centroids[a]))
        .sum()
}

/// Nearest centroid, lowest index on exact ties.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn kmeans_pp<P: AsRef<[f64]> + Sync>(
    points: &[P],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p.as_ref(), points[chosen[0]].as_ref()))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            // guard against rounding landing on a zero-weight tail
            if d2[pick] == 0.0 {
                pick = d2.iter().rposition(|&w| w > 0.0).unwrap_or(pick);
            }
            pick
        } else {
            // every point coincides with a chosen centre
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        let c = points[next].as_ref();
        for (i, p) in points.iter().enumerate() {
            let d = squared_distance(p.as_ref(), c);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen
        .iter()
        .map(|&i| points[i].as_ref().to_vec())
        .collect()
}

struct Run {
    centroids: Vec<Vec<f64>>,
    assignments: Vec<usize>,
    sse: f64,
    history: Vec<f64>,
    iterations: usize,
}

fn lloyd<P: AsRef<[f64]> + Sync>(points: &[P], config: &KMeansConfig, seed: u64) -> Run {
    let k = config.k;
    let dims = points[0].as_ref().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_pp(points, k, &mut rng);
    let mut assignments = vec![0; points.len()];
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..config.max_iter.max(1) {
        iterations += 1;
        let nearest_all: Vec<(usize, f64)> = points
            .par_iter()
            .map(|p| nearest(p.as_ref(), &centroids))
            .collect();
        let mut dist: Vec<f64> = Vec::with_capacity(points.len());
        for (i, (a, d)) in nearest_all.into_iter().enumerate() {
            assignments[i] = a;
            dist.push(d);
        }

        // repair empty clusters with the point farthest from its centroid,
        // taken from a cluster that can spare one
        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        for j in 0..k {
            if sizes[j] > 0 {
                continue;
            }
            let mut donor: Option<usize> = None;
            for i in 0..points.len() {
                if sizes[assignments[i]] > 1 && donor.is_none_or(|d| dist[i] > dist[d]) {
                    donor = Some(i);
                }
            }
            if let Some(i) = donor {
                sizes[assignments[i]] -= 1;
                sizes[j] = 1;
                assignments[i] = j;
                dist[i] = 0.0;
                centroids[j] = points[i].as_ref().to_vec();
            }
        }

        let mut sums = vec![vec![0.0; dims]; k];
        for (p, &a) in points.iter().zip(&assignments) {
            for (s, x) in sums[a].iter_mut().zip(p.as_ref()) {
                *s += x;
            }
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if sizes[j] == 0 {
                continue;
            }
            let mean: Vec<f64> = sums[j].iter().map(|s| s / sizes[j] as f64).collect();
            shift = shift.max(squared_distance(&mean, &centroids[j]).sqrt());
            centroids[j] = mean;
        }
        history.push(compute_sse(points, &centroids, &assignments));
        if shift < config.tol {
            break;
        }
    }

    let sse = compute_sse(points, &centroids, &assignments);
    Run {
        centroids,
        assignments,
        sse,
        history,
        iterations,
    }
}

/// Fits K-Means, keeping the restart with the lowest SSE (earliest on ties).
pub fn kmeans_fit<P: AsRef<[f64]> + Sync>(
    points: &[P],
    config: &KMeansConfig,
) -> Result<ClusterModel, ClusterError> {
    if config.k == 0 {
        return Err(ClusterError::InvalidK(0));
    }
    if config.k > points.len() {
        return Err(ClusterError::TooFewPoints {
            k: config.k,
            points: points.len(),
        });
    }
    let dims = points[0].as_ref().len();
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != dims) {
        return Err(ClusterError::DimensionMismatch {
            expected: dims,
            found: p.as_ref().len(),
        });
    }

    let mut best: Option<Run> = None;
    for restart in 0..config.restarts.max(1) {
        let seed = config.seed.wrapping_add(restart as u64);
        let run = lloyd(points, config, seed);
        if best.as_ref().is_none_or(|b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(ClusterModel {
        centroids: best.centroids,
        assignments: best.assignments,
        sse: best.sse,
        sse_history: best.history,
        iterations: best.iterations,
        config: *config,
    })
}
