//! Cluster-based local outlier factor (unweighted).

use crate::data::DataMatrix;
use crate::error::Result;
use crate::kmeans::{kmeans, KMeansConfig};
use crate::neighbors::sq_dist;

#[derive(Debug, Clone)]
pub struct CblofModel {
    large_centroids: Vec<Vec<f64>>,
}

impl CblofModel {
    pub fn fit(train: &DataMatrix, n_clusters: usize, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        let fit = kmeans(train, &KMeansConfig::new(n_clusters), seed)?;
        let mut order: Vec<usize> = (0..n_clusters).collect();
        order.sort_by(|&a, &b| fit.sizes[b].cmp(&fit.sizes[a]).then(a.cmp(&b)));
        let sizes: Vec<usize> = order.iter().map(|&c| fit.sizes[c]).collect();
        let n_large = large_cluster_count(&sizes, train.rows(), alpha, beta);
        let large_centroids = order[..n_large].iter().map(|&c| fit.centroids[c].clone()).collect();
        Ok(Self { large_centroids })
    }

    pub fn large_centroids(&self) -> &[Vec<f64>] {
        &self.large_centroids
    }

    /// Distance to the nearest large-cluster centroid.
    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        x.row_iter()
            .map(|p| {
                self.large_centroids
                    .iter()
                    .map(|c| sq_dist(p, c))
                    .fold(f64::INFINITY, f64::min)
                    .sqrt()
            })
            .collect()
    }
}

/// Number of leading clusters (sizes sorted descending) that count as large:
/// the first boundary where the cumulative size reaches `alpha * n` or the
/// size drops by a factor of at least `beta`.
pub fn large_cluster_count(sizes: &[usize], n: usize, alpha: f64, beta: f64) -> usize {
    let k = sizes.len();
    let mut cum = 0usize;
    for b in 1..=k {
        cum += sizes[b - 1];
        let by_alpha = cum as f64 >= alpha * n as f64;
        let by_beta = b < k && sizes[b - 1] as f64 >= beta * sizes[b] as f64;
        if by_alpha || by_beta {
            return b;
        }
    }
    k
}
