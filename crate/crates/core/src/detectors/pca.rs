//! Principal-component reconstruction error.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PcaModel {
    mean: DVector<f64>,
    /// `d x m` matrix of retained principal axes.
    components: DMatrix<f64>,
    full_rank: bool,
}

impl PcaModel {
    pub fn fit(train: &DataMatrix, variance_kept: f64) -> Result<Self> {
        let (n, d) = (train.rows(), train.cols());
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        let x = DMatrix::from_row_slice(n, d, train.values());
        let mean = x.row_mean().transpose();
        let mut centered = x;
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }
        let cov = centered.transpose() * &centered / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let total: f64 = vals.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateData("zero total variance".into()));
        }
        let mut kept = d;
        let mut acc = 0.0;
        for (m, v) in vals.iter().enumerate() {
            acc += v;
            if acc / total >= variance_kept - 1e-12 {
                kept = m + 1;
                break;
            }
        }
        let mut components = DMatrix::zeros(d, kept);
        for (c, &i) in order.iter().take(kept).enumerate() {
            components.set_column(c, &eig.eigenvectors.column(i));
        }
        Ok(Self {
            mean,
            components,
            full_rank: kept == d,
        })
    }

    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    /// Squared Euclidean reconstruction error per row.
    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        if self.full_rank {
            return vec![0.0; x.rows()];
        }
        x.row_iter()
            .map(|row| {
                let c = DVector::from_column_slice(row) - &self.mean;
                let proj = &self.components * (self.components.transpose() * &c);
                (c - proj).norm_squared()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> DataMatrix {
        // points on y = x
        DataMatrix::from_rows(&(0..10).map(|i| [f64::from(i), f64::from(i)]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn point_on_line_scores_zero() {
        let m = PcaModel::fit(&line(), 0.9).unwrap();
        assert_eq!(m.n_components(), 1);
        let s = m.score(&DataMatrix::from_rows(&[[3.5, 3.5]]).unwrap());
        assert!(s[0].abs() < 1e-20, "{}", s[0]);
    }

    #[test]
    fn perpendicular_unit_distance_scores_one() {
        // (4.5, 4.5) is the mean; step along (1, -1)/sqrt(2).
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = PcaModel::fit(&line(), 0.9).unwrap();
        let s = m.score(&DataMatrix::from_rows(&[[4.5 + h, 4.5 - h], [10.0 + h, 10.0 - h]]).unwrap());
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!((s[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_variance_reconstructs_training_points() {
        let x = DataMatrix::from_rows(&[[0.0, 1.0], [2.0, 0.5], [1.0, 3.0], [-1.0, 2.0]]).unwrap();
        let m = PcaModel::fit(&x, 1.0).unwrap();
        assert_eq!(m.n_components(), 2);
        assert!(m.score(&x).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_data_is_degenerate() {
        let x = DataMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(PcaModel::fit(&x, 0.9), Err(Error::DegenerateData(_))));
    }
}
