//! Per-feature Gaussian kernel density estimates coupled by a Gaussian copula.
//!
//! Sampling picks a training order statistic per feature and adds kernel
//! noise, so each marginal is exactly the KDE. Under the copula the order
//! statistics are chosen jointly from correlated uniforms; without it they
//! are chosen independently.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::seed::{rng, Rng};
use crate::stats::{kendall_tau, quantile_sorted, sample_std};

pub const MIN_ROWS: usize = 10;

/// Silverman's rule with the robust spread `min(std, IQR / 1.34)`.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let std = sample_std(values);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { std.min(iqr / 1.34) } else { std };
    let h = 0.9 * spread * n.powf(-0.2);
    h.max(1e-6 * (std + 1e-12))
}

#[derive(Debug, Clone)]
pub struct MarginalKde {
    sorted: Vec<Vec<f64>>,
    bandwidth: Vec<f64>,
}

impl MarginalKde {
    pub fn fit(x: &DataMatrix) -> Result<Self> {
        if x.rows() < MIN_ROWS {
            return Err(Error::TooFewSamples {
                needed: MIN_ROWS,
                got: x.rows(),
            });
        }
        let mut sorted = Vec::with_capacity(x.cols());
        let mut bandwidth = Vec::with_capacity(x.cols());
        for j in 0..x.cols() {
            let mut col = x.column(j);
            bandwidth.push(silverman_bandwidth(&col));
            col.sort_by(f64::total_cmp);
            sorted.push(col);
        }
        Ok(Self { sorted, bandwidth })
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.sorted.len()
    }

    /// KDE draw for feature `j` driven by uniform `u` in `[0, 1)`.
    fn draw(&self, j: usize, u: f64, r: &mut Rng) -> f64 {
        let col = &self.sorted[j];
        let i = ((u * col.len() as f64) as usize).min(col.len() - 1);
        let e: f64 = StandardNormal.sample(r);
        col[i] + self.bandwidth[j] * e
    }

    /// Independent draws from every marginal.
    pub fn sample_independent(&self, n: usize, seed: u64) -> Result<DataMatrix> {
        let d = self.dim();
        let mut r = rng(seed);
        let mut values = Vec::with_capacity(n * d);
        for _ in 0..n {
            for j in 0..d {
                let u: f64 = r.random();
                values.push(self.draw(j, u, &mut r));
            }
        }
        DataMatrix::new(n, d, values)
    }
}

/// Gaussian copula correlation estimated from Kendall's tau.
#[derive(Debug, Clone)]
pub struct CopulaModel {
    correlation: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl CopulaModel {
    pub fn fit(x: &DataMatrix) -> Result<Self> {
        let d = x.cols();
        let cols: Vec<Vec<f64>> = (0..d).map(|j| x.column(j)).collect();
        let mut r = DMatrix::identity(d, d);
        for a in 0..d {
            for b in 0..a {
                let tau = kendall_tau(&cols[a], &cols[b]);
                let v = (std::f64::consts::FRAC_PI_2 * tau).sin();
                r[(a, b)] = v;
                r[(b, a)] = v;
            }
        }
        Ok(Self::from_correlation(r))
    }

    /// Clips negative eigenvalues to zero and rescales to a unit diagonal.
    pub fn from_correlation(r: DMatrix<f64>) -> Self {
        let d = r.nrows();
        let eig = SymmetricEigen::new(r);
        let clipped = DVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| l.max(0.0)));
        let mut c = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
        let diag: Vec<f64> = (0..d).map(|i| c[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
        for a in 0..d {
            for b in 0..d {
                c[(a, b)] = if a == b { 1.0 } else { c[(a, b)] / (diag[a] * diag[b]) };
            }
        }
        let c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c.clone());
        let roots = DVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()));
        let factor = &eig.eigenvectors * DMatrix::from_diagonal(&roots);
        Self { correlation: c, factor }
    }

    pub fn correlation(&self) -> &DMatrix<f64> {
        &self.correlation
    }

    /// Correlated standard-normal vector mapped to uniforms.
    fn uniforms(&self, r: &mut Rng, z: &mut [f64], out: &mut [f64]) {
        let phi = Normal::standard();
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(r);
        }
        for (i, o) in out.iter_mut().enumerate() {
            let v: f64 = (0..z.len()).map(|k| self.factor[(i, k)] * z[k]).sum();
            *o = phi.cdf(v).clamp(0.0, 1.0 - f64::EPSILON);
        }
    }
}

pub fn sample_coupled(kde: &MarginalKde, copula: &CopulaModel, n: usize, seed: u64) -> Result<DataMatrix> {
    let d = kde.dim();
    let mut r = rng(seed);
    let mut z = vec![0.0; d];
    let mut u = vec![0.0; d];
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n {
        copula.uniforms(&mut r, &mut z, &mut u);
        for (j, &uj) in u.iter().enumerate() {
            values.push(kde.draw(j, uj, &mut r));
        }
    }
    DataMatrix::new(n, d, values)
}
