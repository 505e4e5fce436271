//! Gaussian naive Bayes; the score is the posterior of the anomaly class.

use crate::data::{DataMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::stats::variance;

#[derive(Debug, Clone)]
pub struct GaussianNb {
    log_prior: [f64; 2],
    mean: [Vec<f64>; 2],
    var: [Vec<f64>; 2],
}

impl GaussianNb {
    pub fn fit(train: &DataMatrix, y: &LabelVector, var_smoothing: f64) -> Result<Self> {
        if y.len() != train.rows() {
            return Err(Error::LengthMismatch {
                expected: train.rows(),
                found: y.len(),
            });
        }
        if !y.has_both_classes() {
            return Err(Error::SingleClassTraining);
        }
        let d = train.cols();
        let max_var = (0..d).map(|j| variance(&train.column(j))).fold(0.0, f64::max);
        let eps = var_smoothing * max_var;
        let n = train.rows() as f64;
        let mut out = Self {
            log_prior: [0.0; 2],
            mean: [vec![0.0; d], vec![0.0; d]],
            var: [vec![0.0; d], vec![0.0; d]],
        };
        for c in 0..2u8 {
            let idx = y.indices_of(c);
            let ci = usize::from(c);
            out.log_prior[ci] = (idx.len() as f64 / n).ln();
            for j in 0..d {
                let vals: Vec<f64> = idx.iter().map(|&i| train.get(i, j)).collect();
                out.mean[ci][j] = vals.iter().sum::<f64>() / vals.len() as f64;
                let v = variance(&vals) + eps;
                out.var[ci][j] = if v > 0.0 { v } else { f64::MIN_POSITIVE.sqrt() };
            }
        }
        Ok(out)
    }

    fn joint_log_likelihood(&self, c: usize, row: &[f64]) -> f64 {
        let mut ll = self.log_prior[c];
        for ((&x, &m), &v) in row.iter().zip(&self.mean[c]).zip(&self.var[c]) {
            ll -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (x - m) * (x - m) / v);
        }
        ll
    }

    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        x.row_iter()
            .map(|row| {
                let l0 = self.joint_log_likelihood(0, row);
                let l1 = self.joint_log_likelihood(1, row);
                // 1 / (1 + exp(l0 - l1)), computed without overflow
                let z = l1 - l0;
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            })
            .collect()
    }
}
