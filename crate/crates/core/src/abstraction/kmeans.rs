use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared Euclidean distances to the assigned centroid.
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after every assignment step, in order.
    pub inertia_history: Vec<f64>,
}

impl ClusterResult {
    pub fn non_empty_clusters(&self) -> usize {
        let mut used = vec![false; self.centroids.len()];
        for &a in &self.assignments {
            used[a] = true;
        }
        used.into_iter().filter(|&u| u).count()
    }
}

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the closest centroid (lowest index on ties) and its distance.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            // Rounding can walk past the end; fall back to the last positive weight.
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|&d| d > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            // Fewer distinct points than clusters: duplicates become empty clusters.
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Lloyd's algorithm with k-means++ seeding. Empty clusters keep their last
/// centroid and stay in the result.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize, tol: f64) -> Result<ClusterResult> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > points.len() {
        return Err(Error::invalid(format!("k = {k} exceeds the number of points ({})", points.len())));
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_seeds(points, k, &mut rng);
    let mut assignments = vec![0; points.len()];
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let inertia = assign(points, &centroids, &mut assignments);
        history.push(inertia);

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let mean: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            movement = movement.max(sq_dist(&mean, &centroids[c]).sqrt());
            centroids[c] = mean;
        }
        if movement < tol {
            break;
        }
    }
    let inertia = assign(points, &centroids, &mut assignments);
    history.push(inertia);

    Ok(ClusterResult { assignments, centroids, inertia, iterations, inertia_history: history })
}

fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>], out: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (p, slot) in points.iter().zip(out.iter_mut()) {
        let (c, d) = nearest(p, centroids);
        *slot = c;
        inertia += d;
    }
    inertia
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (label, center) in [0.0, 100.0].into_iter().enumerate() {
            for _ in 0..50 {
                points.push(vec![center + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
                labels.push(label);
            }
        }
        (points, labels)
    }

    #[test]
    fn single_cluster_inertia_is_total_deviation() {
        let (points, _) = blobs(1);
        let r = kmeans(&points, 1, 0, 100, 1e-6).unwrap();
        let n = points.len() as f64;
        let mean = [0, 1].map(|d| points.iter().map(|p| p[d]).sum::<f64>() / n);
        let total: f64 = points.iter().map(|p| sq_dist(p, &mean)).sum();
        assert!((r.inertia - total).abs() < 1e-9 * total);
        assert!(r.assignments.iter().all(|&a| a == 0));
    }

    #[test]
    fn separated_blobs_are_pure() {
        let (points, labels) = blobs(2);
        for seed in 0..5 {
            let r = kmeans(&points, 2, seed, 100, 1e-6).unwrap();
            let first = r.assignments[0];
            for (a, l) in r.assignments.iter().zip(&labels) {
                assert_eq!(*a == first, *l == 0);
            }
        }
    }

    #[test]
    fn distinct_points_give_zero_inertia() {
        let points: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let mut dup = points.clone();
        dup.extend(points.iter().cloned());
        let r = kmeans(&dup, 6, 3, 100, 1e-6).unwrap();
        assert_eq!(r.inertia, 0.0);
    }

    #[test]
    fn inertia_never_increases() {
        let (points, _) = blobs(3);
        let r = kmeans(&points, 7, 11, 100, 0.0).unwrap();
        for w in r.inertia_history.windows(2) {
            assert!(w[1] <= w[0], "{:?}", r.inertia_history);
        }
    }

    #[test]
    fn errors() {
        let points = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(kmeans(&points, 1, 0, 10, 1e-6), Err(Error::DimensionMismatch { .. })));
        assert!(kmeans(&[vec![0.0]], 2, 0, 10, 1e-6).is_err());
    }

    #[test]
    fn duplicates_allow_empty_clusters() {
        let points = vec![vec![0.0]; 5];
        let r = kmeans(&points, 3, 9, 10, 1e-6).unwrap();
        assert_eq!(r.non_empty_clusters(), 1);
        assert_eq!(r.centroids.len(), 3);
    }
}
