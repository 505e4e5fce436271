//! Ranking metrics with midrank / tie-group semantics.

use crate::data::{LabelVector, ScoreVector};
use crate::error::{Error, Result};
use crate::stats::midranks;

fn check_len(scores: &ScoreVector, y: &LabelVector) -> Result<()> {
    if scores.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            found: scores.len(),
        });
    }
    Ok(())
}

/// Probability that a random anomaly outscores a random normal, ties as 1/2.
pub fn aucroc(scores: &ScoreVector, y: &LabelVector) -> Result<f64> {
    check_len(scores, y)?;
    let pos = y.n_anomalies();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClassEval);
    }
    let ranks = midranks(scores.as_slice());
    let rank_sum: f64 = ranks
        .iter()
        .zip(y.as_slice())
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| r)
        .sum();
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Average precision; tied scores form one threshold.
pub fn aucpr(scores: &ScoreVector, y: &LabelVector) -> Result<f64> {
    check_len(scores, y)?;
    let pos = y.n_anomalies();
    if pos == 0 {
        return Err(Error::NoPositives);
    }
    let s = scores.as_slice();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let (mut tp, mut fp, mut ap, mut prev_recall) = (0usize, 0usize, 0.0, 0.0);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && s[order[j]] == s[order[i]] {
            if y[order[j]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    Ok(ap)
}
