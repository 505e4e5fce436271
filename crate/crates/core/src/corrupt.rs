//! Data corruptions applied to a train/test split: duplicated anomalies,
//! irrelevant uniform-noise features and training-label flips.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::data::{Dataset, LabelVector};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng};

pub const MAX_DUPLICATION: usize = 6;
pub const MAX_NOISE_RATIO: f64 = 0.5;
pub const MAX_FLIP_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    pub test: Dataset,
}

impl SplitDataset {
    pub fn new(train: Dataset, test: Dataset) -> Result<Self> {
        if train.n_features() != test.n_features() {
            return Err(Error::DimMismatch {
                expected: train.n_features(),
                found: test.n_features(),
            });
        }
        Ok(Self { train, test })
    }
}

fn check_ratio(value: f64, max: f64) -> Result<()> {
    if (0.0..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::RatioOutOfRange { value, min: 0.0, max })
    }
}

/// Appends `factor - 1` extra copies of each anomaly row, then shuffles.
fn duplicate_part(ds: &Dataset, factor: usize, seed: u64) -> Result<Dataset> {
    let mut idx: Vec<usize> = (0..ds.n_samples()).collect();
    let anomalies = ds.y.indices_of(1);
    for _ in 1..factor {
        idx.extend_from_slice(&anomalies);
    }
    if factor > 1 {
        idx.shuffle(&mut rng(seed));
    }
    ds.select(&idx)
}

/// Every anomaly row appears `factor` times in both parts; `factor = 1`
/// returns the split unchanged.
pub fn duplicate_anomalies(split: &SplitDataset, factor: usize, seed: u64) -> Result<SplitDataset> {
    if !(1..=MAX_DUPLICATION).contains(&factor) {
        return Err(Error::FactorOutOfRange(factor));
    }
    Ok(SplitDataset {
        train: duplicate_part(&split.train, factor, derive_seed(seed, &[0]))?,
        test: duplicate_part(&split.test, factor, derive_seed(seed, &[1]))?,
    })
}

/// Appends `round(d * noise_ratio)` columns of uniform noise, each over the
/// train-split range of a randomly chosen source feature.
pub fn add_irrelevant_features(split: &SplitDataset, noise_ratio: f64, seed: u64) -> Result<SplitDataset> {
    check_ratio(noise_ratio, MAX_NOISE_RATIO)?;
    let d = split.train.n_features();
    let extra = (d as f64 * noise_ratio).round() as usize;
    if extra == 0 {
        return Ok(split.clone());
    }
    let mut r = rng(seed);
    let (n_train, n_test) = (split.train.n_samples(), split.test.n_samples());
    let mut train_cols = Vec::with_capacity(extra);
    let mut test_cols = Vec::with_capacity(extra);
    for _ in 0..extra {
        let k = r.random_range(0..d);
        let col = split.train.x.column(k);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| if lo == hi { lo } else { r.random_range(lo..=hi) })
                .collect()
        };
        train_cols.push(draw(n_train));
        test_cols.push(draw(n_test));
    }
    Ok(SplitDataset {
        train: Dataset {
            x: split.train.x.with_columns(&train_cols)?,
            y: split.train.y.clone(),
        },
        test: Dataset {
            x: split.test.x.with_columns(&test_cols)?,
            y: split.test.y.clone(),
        },
    })
}

/// The `round(n * error_ratio)` training indices that `flip_labels` flips.
pub fn flip_indices(n: usize, error_ratio: f64, seed: u64) -> Result<Vec<usize>> {
    check_ratio(error_ratio, MAX_FLIP_RATIO)?;
    let m = (n as f64 * error_ratio).round() as usize;
    let mut idx = sample(&mut rng(seed), n, m).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

pub fn flip_at(y: &LabelVector, idx: &[usize]) -> LabelVector {
    let mut v = y.as_slice().to_vec();
    for &i in idx {
        v[i] = 1 - v[i];
    }
    LabelVector::new(v).expect("flipped labels stay binary")
}

/// Flips training labels only; the test split keeps its true labels.
pub fn flip_labels(split: &SplitDataset, error_ratio: f64, seed: u64) -> Result<SplitDataset> {
    let idx = flip_indices(split.train.n_samples(), error_ratio, seed)?;
    Ok(SplitDataset {
        train: Dataset {
            x: split.train.x.clone(),
            y: flip_at(&split.train.y, &idx),
        },
        test: split.test.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataMatrix;
    use std::collections::BTreeMap;

    fn uniform_matrix(rows: usize, cols: usize, seed: u64) -> Result<DataMatrix> {
        let mut r = rng(seed);
        DataMatrix::new(rows, cols, (0..rows * cols).map(|_| r.random::<f64>()).collect())
    }

    fn part(n: usize, n_anom: usize, d: usize, seed: u64) -> Dataset {
        let x = uniform_matrix(n, d, seed).unwrap();
        let mut y = vec![0u8; n - n_anom];
        y.resize(n, 1);
        Dataset {
            x,
            y: LabelVector::new(y).unwrap(),
        }
    }

    fn split() -> SplitDataset {
        SplitDataset::new(part(100, 10, 4, 1), part(40, 4, 4, 2)).unwrap()
    }

    fn row_counts(ds: &Dataset) -> BTreeMap<(Vec<u64>, u8), usize> {
        let mut m = BTreeMap::new();
        for (i, row) in ds.x.row_iter().enumerate() {
            *m.entry((row.iter().map(|v| v.to_bits()).collect(), ds.y[i]))
                .or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn duplication_counts() {
        let s = split();
        let out = duplicate_anomalies(&s, 6, 3).unwrap();
        assert_eq!(out.train.y.n_anomalies(), 60);
        assert_eq!(out.test.y.n_anomalies(), 24);
        for (orig, dup) in [(&s.train, &out.train), (&s.test, &out.test)] {
            let a = row_counts(orig);
            let b = row_counts(dup);
            assert_eq!(a.len(), b.len());
            for (k, c) in a {
                assert_eq!(b[&k], if k.1 == 1 { 6 * c } else { c });
            }
        }
        // p = 0.1, f = 6 -> 6p / (6p + 1 - p)
        let want = 0.6 / (0.6 + 0.9);
        assert!((out.train.y.anomaly_ratio() - want).abs() < 1e-15);
    }

    #[test]
    fn duplication_factor_one_is_identity() {
        let s = split();
        assert_eq!(duplicate_anomalies(&s, 1, 0).unwrap(), s);
    }

    #[test]
    fn duplication_factor_out_of_range() {
        assert_eq!(
            duplicate_anomalies(&split(), 7, 0).unwrap_err(),
            Error::FactorOutOfRange(7)
        );
        assert_eq!(
            duplicate_anomalies(&split(), 0, 0).unwrap_err(),
            Error::FactorOutOfRange(0)
        );
    }

    #[test]
    fn irrelevant_features_shape_and_containment() {
        let s = SplitDataset::new(part(50, 5, 10, 4), part(20, 2, 10, 5)).unwrap();
        let out = add_irrelevant_features(&s, 0.5, 6).unwrap();
        assert_eq!(out.train.n_features(), 15);
        assert_eq!(out.test.n_features(), 15);
        let ranges: Vec<(f64, f64)> = (0..10)
            .map(|k| {
                let c = s.train.x.column(k);
                (
                    c.iter().copied().fold(f64::INFINITY, f64::min),
                    c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            })
            .collect();
        let lo = ranges.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let hi = ranges.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        for ds in [&out.train, &out.test] {
            for j in 10..15 {
                let col = ds.x.column(j);
                // Every value fits the range of at least one source feature.
                assert!(col.iter().all(|&v| ranges.iter().any(|&(a, b)| v >= a && v <= b)));
                assert!(col.iter().all(|&v| v >= lo && v <= hi));
            }
            for j in 0..10 {
                let orig = if std::ptr::eq(ds, &out.train) {
                    &s.train
                } else {
                    &s.test
                };
                assert_eq!(ds.x.column(j), orig.x.column(j));
            }
        }
        assert_eq!(out.train.y, s.train.y);
        assert_eq!(add_irrelevant_features(&s, 0.0, 6).unwrap(), s);
        assert!(matches!(
            add_irrelevant_features(&s, 0.6, 6),
            Err(Error::RatioOutOfRange { .. })
        ));
    }

    #[test]
    fn flips_exact_count_train_only() {
        let s = split();
        let out = flip_labels(&s, 0.5, 8).unwrap();
        let changed = s
            .train
            .y
            .as_slice()
            .iter()
            .zip(out.train.y.as_slice())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(changed, 50);
        assert_eq!(out.test, s.test);
        assert_eq!(out.train.x, s.train.x);
        assert_eq!(flip_labels(&s, 0.0, 8).unwrap(), s);
    }

    #[test]
    fn flipping_twice_restores() {
        let s = split();
        let idx = flip_indices(100, 0.3, 2).unwrap();
        assert_eq!(flip_at(&flip_at(&s.train.y, &idx), &idx), s.train.y);
    }

    #[test]
    fn flip_ratio_out_of_range() {
        assert!(matches!(
            flip_labels(&split(), 0.51, 0),
            Err(Error::RatioOutOfRange { .. })
        ));
        assert!(matches!(
            flip_labels(&split(), -0.1, 0),
            Err(Error::RatioOutOfRange { .. })
        ));
    }
}
