//! Stratified train/test splits and partial label revelation.

use rand::seq::index::sample;
use rand::seq::SliceRandom;

use crate::corrupt::SplitDataset;
use crate::data::{Dataset, LabelMask, LabelVector};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng};

pub const TRAIN_FRACTION: f64 = 0.7;

/// Per-class shuffled partition; each class keeps at least one row on both sides.
pub fn stratified_split(ds: &Dataset, train_frac: f64, seed: u64) -> Result<SplitDataset> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::RatioOutOfRange {
            value: train_frac,
            min: 0.0,
            max: 1.0,
        });
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [0u8, 1] {
        let mut idx = ds.y.indices_of(class);
        if idx.len() < 2 {
            return Err(Error::ClassTooSmall {
                class,
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng(derive_seed(seed, &[u64::from(class)])));
        let k = ((idx.len() as f64 * train_frac).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    SplitDataset::new(ds.select(&train)?, ds.select(&test)?)
}

/// Reveals `max(1, round(n_anomalies * gamma_l))` anomalies chosen uniformly.
pub fn subsample_labels(y: &LabelVector, gamma_l: f64, seed: u64) -> Result<LabelMask> {
    if !(gamma_l > 0.0 && gamma_l <= 1.0) {
        return Err(Error::RatioOutOfRange {
            value: gamma_l,
            min: 0.0,
            max: 1.0,
        });
    }
    let anomalies = y.indices_of(1);
    if anomalies.is_empty() {
        return Err(Error::NoAnomalies);
    }
    let m = ((anomalies.len() as f64 * gamma_l).round() as usize).clamp(1, anomalies.len());
    let mut revealed = vec![false; y.len()];
    for i in sample(&mut rng(seed), anomalies.len(), m) {
        revealed[anomalies[i]] = true;
    }
    LabelMask::new(revealed, y)
}
