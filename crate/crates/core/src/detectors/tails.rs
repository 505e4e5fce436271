//! Empirical tail-probability detectors (ECOD and COPOD).
//!
//! Both evaluate per-feature empirical tail probabilities against the sorted
//! training columns, clamp them to `[1/n, 1]` and sum negative logs across
//! features into a left-tail, a right-tail and a skewness-selected
//! aggregate. The final score is the largest of the three.
//!
//! * ECOD uses the right-continuous ECDF `F` and the right tail `1 - F + 1/n`;
//!   the skewness aggregate takes the left tail for negatively skewed
//!   features and the right tail otherwise.
//! * COPOD uses the empirical copula of the reflected data for the right
//!   tail, `#{t >= x} / n`; its skewness aggregate averages both tails for
//!   features with zero skewness.

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::stats::skewness;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVariant {
    Ecod,
    Copod,
}

#[derive(Debug, Clone)]
pub struct TailModel {
    variant: TailVariant,
    sorted: Vec<Vec<f64>>,
    skew: Vec<f64>,
}

/// `-log` of the left and right tail probabilities of one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLogs {
    pub left: f64,
    pub right: f64,
}

impl TailModel {
    pub fn fit(train: &DataMatrix, variant: TailVariant) -> Result<Self> {
        if train.rows() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: train.rows(),
            });
        }
        let mut sorted = Vec::with_capacity(train.cols());
        let mut skew = Vec::with_capacity(train.cols());
        for j in 0..train.cols() {
            let mut col = train.column(j);
            skew.push(skewness(&col));
            col.sort_by(f64::total_cmp);
            sorted.push(col);
        }
        Ok(Self { variant, sorted, skew })
    }

    pub fn skewness(&self) -> &[f64] {
        &self.skew
    }

    /// Per-feature tail logs for value `v` of feature `j`.
    pub fn tail_logs(&self, j: usize, v: f64) -> TailLogs {
        let col = &self.sorted[j];
        let n = col.len() as f64;
        let floor = 1.0 / n;
        let at_most = col.partition_point(|&t| t <= v) as f64;
        let ecdf = at_most / n;
        let left = ecdf.clamp(floor, 1.0);
        let right = match self.variant {
            TailVariant::Ecod => 1.0 - ecdf + floor,
            TailVariant::Copod => {
                let at_least = col.len() as f64 - col.partition_point(|&t| t < v) as f64;
                at_least / n
            }
        }
        .clamp(floor, 1.0);
        TailLogs {
            left: -left.ln(),
            right: -right.ln(),
        }
    }

    fn skew_term(&self, j: usize, t: TailLogs) -> f64 {
        let s = self.skew[j];
        match self.variant {
            TailVariant::Ecod => {
                if s < 0.0 {
                    t.left
                } else {
                    t.right
                }
            }
            TailVariant::Copod => {
                if s < 0.0 {
                    t.left
                } else if s > 0.0 {
                    t.right
                } else {
                    0.5 * (t.left + t.right)
                }
            }
        }
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        let (mut o_left, mut o_right, mut o_skew) = (0.0, 0.0, 0.0);
        for (j, &v) in row.iter().enumerate() {
            let t = self.tail_logs(j, v);
            o_left += t.left;
            o_right += t.right;
            o_skew += self.skew_term(j, t);
        }
        o_left.max(o_right).max(o_skew)
    }

    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        x.row_iter().map(|r| self.score_row(r)).collect()
    }
}
