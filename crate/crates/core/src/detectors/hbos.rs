//! Histogram-based outlier score.

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Equal-width histogram over a training range with max-normalized density.
#[derive(Debug, Clone)]
pub(crate) struct Histogram {
    min: f64,
    max: f64,
    density: Vec<f64>,
    empty: f64,
}

impl Histogram {
    /// Empty bins are clamped to `0.1 / n`.
    pub(crate) fn fit(values: &[f64], n_bins: usize, max_normalize: bool) -> Self {
        let n = values.len();
        let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        let mut counts = vec![0usize; n_bins];
        if max > min {
            for &v in values {
                counts[bin_of(v, min, max, n_bins)] += 1;
            }
        } else {
            counts[0] = n;
        }
        let denom = if max_normalize {
            *counts.iter().max().unwrap() as f64
        } else {
            n as f64
        };
        let empty = 0.1 / n as f64;
        let density = counts.iter().map(|&c| (c as f64 / denom).max(empty)).collect();
        Self {
            min,
            max,
            density,
            empty,
        }
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.max <= self.min
    }

    pub(crate) fn in_range(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    /// Density of the bin containing `v`; out-of-range values use the
    /// nearest edge bin.
    pub(crate) fn density(&self, v: f64) -> f64 {
        if self.is_constant() {
            return self.density[0];
        }
        self.density[bin_of(v, self.min, self.max, self.density.len())]
    }

    /// Clamped density of an empty bin.
    pub(crate) fn empty_density(&self) -> f64 {
        self.empty
    }
}

fn bin_of(v: f64, min: f64, max: f64, n_bins: usize) -> usize {
    let pos = (v - min) / (max - min) * n_bins as f64;
    if pos <= 0.0 {
        0
    } else {
        (pos.floor() as usize).min(n_bins - 1)
    }
}

#[derive(Debug, Clone)]
pub struct HbosModel {
    histograms: Vec<Histogram>,
}

impl HbosModel {
    pub fn fit(train: &DataMatrix, n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidParameter {
                param: "hbos.n_bins".into(),
                value: 0.0,
                reason: "must be >= 1".into(),
            });
        }
        let histograms = (0..train.cols())
            .map(|j| Histogram::fit(&train.column(j), n_bins, true))
            .collect();
        Ok(Self { histograms })
    }

    /// `sum_j log(1 / density_j(x_j))`; constant features contribute 0.
    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        x.row_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.histograms)
                    .filter(|(_, h)| !h.is_constant())
                    .map(|(&v, h)| -h.density(v).ln())
                    .sum()
            })
            .collect()
    }
}
