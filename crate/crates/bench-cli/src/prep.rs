//! Size and contamination normalisation applied once per dataset.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng as _;

use anomaly_bench::seed::{derive_seed, rng};
use anomaly_bench::Dataset;

use crate::error::{CliError, CliResult};

pub const MAX_ANOMALY_RATIO: f64 = 0.40;
pub const MIN_ROWS: usize = 1_000;
pub const MAX_ROWS: usize = 10_000;

/// Per-class row counts for a resample of `target` rows at the same ratio.
fn class_targets(ds: &Dataset, target: usize) -> [usize; 2] {
    let a = (target as f64 * ds.y.anomaly_ratio()).round() as usize;
    [target - a, a]
}

/// Rejects contaminated datasets and resamples sizes outside
/// `[MIN_ROWS, MAX_ROWS]` stratified by class.
pub fn prep_dataset(ds: &Dataset, seed: u64) -> CliResult<Dataset> {
    let ratio = ds.y.anomaly_ratio();
    if ratio >= MAX_ANOMALY_RATIO {
        return Err(CliError::AnomalyRatioTooHigh {
            ratio,
            max: MAX_ANOMALY_RATIO,
        });
    }
    let n = ds.n_samples();
    let target = if n < MIN_ROWS {
        MIN_ROWS
    } else if n > MAX_ROWS {
        MAX_ROWS
    } else {
        return Ok(ds.clone());
    };
    let counts = class_targets(ds, target);
    let mut idx = Vec::with_capacity(target);
    for class in [0u8, 1] {
        let members = ds.y.indices_of(class);
        let want = counts[usize::from(class)];
        let mut r = rng(derive_seed(seed, &[u64::from(class)]));
        if n < MIN_ROWS {
            idx.extend((0..want).map(|_| members[r.random_range(0..members.len())]));
        } else {
            idx.extend(sample(&mut r, members.len(), want).into_iter().map(|i| members[i]));
        }
    }
    idx.shuffle(&mut rng(derive_seed(seed, &[2])));
    Ok(ds.select(&idx)?)
}
