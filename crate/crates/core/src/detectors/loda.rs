//! Lightweight on-line detector of anomalies: an ensemble of sparse random
//! projections, each with a one-dimensional histogram.

use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::Result;
use crate::seed::{derive_seed, rng};

use super::hbos::Histogram;

#[derive(Debug, Clone)]
struct Projector {
    /// Sparse unit vector as `(feature, weight)` pairs.
    weights: Vec<(usize, f64)>,
    hist: Histogram,
}

impl Projector {
    fn project(&self, row: &[f64]) -> f64 {
        self.weights.iter().map(|&(j, w)| w * row[j]).sum()
    }

    /// Values outside the training projection range count as an empty bin.
    fn neg_log_density(&self, row: &[f64]) -> f64 {
        let z = self.project(row);
        let p = if self.hist.in_range(z) {
            self.hist.density(z)
        } else {
            self.hist.empty_density()
        };
        -p.ln()
    }
}

/// `ceil(sqrt(n))` clamped to `[10, 100]`.
pub fn loda_bins(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).clamp(10, 100)
}

#[derive(Debug, Clone)]
pub struct LodaModel {
    projectors: Vec<Projector>,
}

impl LodaModel {
    pub fn fit(train: &DataMatrix, n_projections: usize, seed: u64) -> Result<Self> {
        let (n, d) = (train.rows(), train.cols());
        let nnz = ((d as f64).sqrt().ceil() as usize).clamp(1, d);
        let n_bins = loda_bins(n);
        let projectors = (0..n_projections)
            .into_par_iter()
            .map(|p| {
                let mut r = rng(derive_seed(seed, &[p as u64]));
                let mut features = sample(&mut r, d, nnz).into_vec();
                features.sort_unstable();
                let mut weights: Vec<(usize, f64)> = features
                    .into_iter()
                    .map(|j| (j, StandardNormal.sample(&mut r)))
                    .collect();
                let norm = weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (_, w) in &mut weights {
                        *w /= norm;
                    }
                } else {
                    weights[0].1 = 1.0;
                }
                let proto = Projector {
                    weights,
                    hist: Histogram::fit(&[0.0], 1, false),
                };
                let z: Vec<f64> = train.row_iter().map(|row| proto.project(row)).collect();
                Projector {
                    hist: Histogram::fit(&z, n_bins, false),
                    ..proto
                }
            })
            .collect();
        Ok(Self { projectors })
    }

    /// Mean over projectors of `-log` bin probability.
    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        x.row_iter()
            .map(|row| {
                self.projectors.iter().map(|p| p.neg_log_density(row)).sum::<f64>() / self.projectors.len() as f64
            })
            .collect()
    }
}
