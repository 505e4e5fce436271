//! Metrics, splitting, supervision subsampling and rank-based comparison.

pub mod cd;
pub mod hypothesis;
pub mod metrics;
pub mod ranks;
pub mod split;

use std::time::Instant;

pub use cd::{cd_cliques, CdResult, DEFAULT_ALPHA};
pub use hypothesis::{friedman_test, holm_adjust, wilcoxon_signed_rank};
pub use metrics::{aucpr, aucroc};
pub use ranks::{rank_matrix, Aggregation, Metric, MetricRecord, RankTable};
pub use split::{stratified_split, subsample_labels, TRAIN_FRACTION};

/// Runs `fit` then `score`, returning the score output with wall-clock
/// milliseconds for each stage.
pub fn measure_timing<M, O, E>(
    fit: impl FnOnce() -> std::result::Result<M, E>,
    score: impl FnOnce(&M) -> std::result::Result<O, E>,
) -> std::result::Result<(O, f64, f64), E> {
    let t0 = Instant::now();
    let model = fit()?;
    let fit_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let out = score(&model)?;
    let score_ms = t1.elapsed().as_secs_f64() * 1e3;
    Ok((out, fit_ms, score_ms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataMatrix;
    use crate::detectors::{DetectorKind, DetectorSpec};

    #[test]
    fn no_op_is_fast_and_non_negative() {
        for _ in 0..10 {
            let ((), f, s) = measure_timing(|| Ok::<_, ()>(()), |_| Ok(())).unwrap();
            assert!(f >= 0.0 && s >= 0.0);
            assert!(f <= 1.0 && s <= 1.0);
        }
    }

    #[test]
    fn knn_fit_is_cheap_next_to_scoring() {
        let rows = |n: usize, off: f64| -> DataMatrix {
            DataMatrix::from_rows(
                &(0..n)
                    .map(|i| {
                        let t = i as f64 + off;
                        [(t * 0.37).sin(), (t * 0.71).cos(), (t * 0.13).sin() * 2.0]
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        let train = rows(5000, 0.0);
        let test = rows(5000, 0.5);
        let spec = DetectorSpec::default_for(DetectorKind::Knn);
        let (_, fit_ms, score_ms) = measure_timing(|| spec.fit(&train, None, 0), |m| m.score(&test)).unwrap();
        assert!(fit_ms < score_ms, "{fit_ms} vs {score_ms}");
    }
}
