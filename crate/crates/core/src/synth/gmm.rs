//! Full-covariance Gaussian mixtures fitted by EM, with BIC model selection.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::seed::{derive_seed, rng};
use crate::stats::variance;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub const N_RESTARTS: usize = 5;
pub const MAX_ITER: usize = 200;
pub const TOL: f64 = 1e-6;
pub const MAX_AUTO_COMPONENTS: usize = 10;
/// The auto search stops after this many consecutive k without a BIC improvement.
pub const AUTO_PATIENCE: usize = 2;

/// Fitted Gaussian mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covariances: Vec<DMatrix<f64>>,
}

impl GmmModel {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, covariances: Vec<DMatrix<f64>>) -> Result<Self> {
        let k = weights.len();
        if k == 0 || means.len() != k || covariances.len() != k {
            return Err(Error::InvalidInput(
                "mixture parts must have equal, non-zero length".into(),
            ));
        }
        let d = means[0].len();
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("weights must be positive and sum to 1".into()));
        }
        for (m, c) in means.iter().zip(&covariances) {
            if m.len() != d || c.nrows() != d || c.ncols() != d {
                return Err(Error::InvalidInput("component shapes disagree".into()));
            }
            if c.clone().cholesky().is_none() {
                return Err(Error::InvalidInput("covariance is not positive definite".into()));
            }
        }
        Ok(Self {
            weights,
            means,
            covariances,
        })
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn covariances(&self) -> &[DMatrix<f64>] {
        &self.covariances
    }

    /// Mixture mean `sum_k w_k mu_k`.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for (w, mu) in self.weights.iter().zip(&self.means) {
            for (a, b) in m.iter_mut().zip(mu) {
                *a += w * b;
            }
        }
        m
    }

    /// Mixture covariance (law of total variance).
    pub fn covariance(&self) -> DMatrix<f64> {
        let d = self.dim();
        let m = nalgebra::DVector::from_vec(self.mean());
        let mut c = DMatrix::zeros(d, d);
        for ((w, mu), s) in self.weights.iter().zip(&self.means).zip(&self.covariances) {
            let diff = nalgebra::DVector::from_column_slice(mu) - &m;
            c += (s + &diff * diff.transpose()) * *w;
        }
        c
    }

    /// Same weights and means, every covariance multiplied by `alpha`.
    pub fn with_scaled_covariances(&self, alpha: f64) -> Self {
        Self {
            covariances: self.covariances.iter().map(|c| c * alpha).collect(),
            ..self.clone()
        }
    }

    /// Same weights and covariances, every mean multiplied by `alpha`.
    pub fn with_scaled_means(&self, alpha: f64) -> Self {
        Self {
            means: self
                .means
                .iter()
                .map(|m| m.iter().map(|v| v * alpha).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// Total log-likelihood of `x`.
    pub fn log_likelihood(&self, x: &DataMatrix) -> f64 {
        let comps = Components::new(self);
        x.row_iter().map(|r| comps.log_density(r)).sum()
    }

    /// `n` i.i.d. draws; deterministic per seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<DataMatrix> {
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be >= 1".into()));
        }
        let d = self.dim();
        let chol: Vec<DMatrix<f64>> = self
            .covariances
            .iter()
            .map(|c| {
                c.clone()
                    .cholesky()
                    .map(|ch| ch.l())
                    .ok_or_else(|| Error::InvalidInput("covariance is not positive definite".into()))
            })
            .collect::<Result<_>>()?;
        let mut r = rng(seed);
        let mut values = Vec::with_capacity(n * d);
        let mut z = vec![0.0; d];
        for _ in 0..n {
            let u: f64 = r.random();
            let mut acc = 0.0;
            let mut comp = self.weights.len() - 1;
            for (k, w) in self.weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    comp = k;
                    break;
                }
            }
            for zi in z.iter_mut() {
                *zi = StandardNormal.sample(&mut r);
            }
            let l = &chol[comp];
            for i in 0..d {
                let mut v = self.means[comp][i];
                for j in 0..=i {
                    v += l[(i, j)] * z[j];
                }
                values.push(v);
            }
        }
        DataMatrix::new(n, d, values)
    }
}

/// Precomputed Cholesky factors for density evaluation.
struct Components<'a> {
    model: &'a GmmModel,
    /// Row-major lower factors.
    chol: Vec<Vec<f64>>,
    log_norm: Vec<f64>,
}

impl<'a> Components<'a> {
    fn new(model: &'a GmmModel) -> Self {
        let d = model.dim();
        let mut chol = Vec::new();
        let mut log_norm = Vec::new();
        for (w, c) in model.weights.iter().zip(&model.covariances) {
            let l = c.clone().cholesky().expect("covariance is PD").l();
            let logdet: f64 = (0..d).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
            log_norm.push(w.ln() - 0.5 * (d as f64 * LN_2PI + logdet));
            chol.push(
                (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| l[(i, j)])
                    .collect(),
            );
        }
        Self { model, chol, log_norm }
    }

    fn component_log(&self, k: usize, row: &[f64], z: &mut [f64]) -> f64 {
        let d = row.len();
        let l = &self.chol[k];
        let mu = &self.model.means[k];
        let mut maha = 0.0;
        for i in 0..d {
            let mut s = row[i] - mu[i];
            for j in 0..i {
                s -= l[i * d + j] * z[j];
            }
            z[i] = s / l[i * d + i];
            maha += z[i] * z[i];
        }
        self.log_norm[k] - 0.5 * maha
    }

    fn log_density(&self, row: &[f64]) -> f64 {
        let mut z = vec![0.0; row.len()];
        let logs: Vec<f64> = (0..self.chol.len())
            .map(|k| self.component_log(k, row, &mut z))
            .collect();
        log_sum_exp(&logs)
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Number of mixture components to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentCount {
    Fixed(usize),
    /// Minimum BIC over `1..=min(10, n / 20)`, scanned upward with early stop.
    Auto,
}

/// Result of an EM fit.
#[derive(Debug, Clone)]
pub struct GmmFit {
    pub model: GmmModel,
    /// Total log-likelihood of the training data under `model`.
    pub log_likelihood: f64,
    pub bic: f64,
    pub n_iter: usize,
    /// False when the iteration cap was hit; `model` is the best found.
    pub converged: bool,
    /// Mean per-sample log-likelihood after each E-step of the winning restart.
    pub trace: Vec<f64>,
}

pub fn n_parameters(k: usize, d: usize) -> usize {
    (k - 1) + k * d + k * d * (d + 1) / 2
}

pub fn bic(log_likelihood: f64, k: usize, d: usize, n: usize) -> f64 {
    -2.0 * log_likelihood + n_parameters(k, d) as f64 * (n as f64).ln()
}

/// Diagonal floor added to every covariance estimate.
pub fn covariance_floor(x: &DataMatrix) -> f64 {
    let max_var = (0..x.cols()).map(|j| variance(&x.column(j))).fold(0.0, f64::max);
    if max_var > 0.0 {
        1e-6 * max_var
    } else {
        1e-6
    }
}

pub fn fit_gmm(x: &DataMatrix, k: ComponentCount, seed: u64) -> Result<GmmFit> {
    let n = x.rows();
    match k {
        ComponentCount::Fixed(k) => fit_fixed(x, k, seed),
        ComponentCount::Auto => {
            let k_max = (n / 20).clamp(1, MAX_AUTO_COMPONENTS);
            let mut best: Option<GmmFit> = None;
            let mut since_best = 0;
            for k in (1..=k_max).filter(|&k| n >= 2 * k) {
                let f = fit_fixed(x, k, derive_seed(seed, &[k as u64]))?;
                if best.as_ref().is_none_or(|b| f.bic < b.bic) {
                    best = Some(f);
                    since_best = 0;
                } else {
                    since_best += 1;
                    if since_best >= AUTO_PATIENCE {
                        break;
                    }
                }
            }
            best.ok_or(Error::TooFewSamples { needed: 2, got: n })
        }
    }
}

fn fit_fixed(x: &DataMatrix, k: usize, seed: u64) -> Result<GmmFit> {
    let n = x.rows();
    if k == 0 || n < 2 * k {
        return Err(Error::TooFewSamples {
            needed: 2 * k.max(1),
            got: n,
        });
    }
    let floor = covariance_floor(x);
    let runs = (0..N_RESTARTS)
        .into_par_iter()
        .map(|r| em(x, k, floor, derive_seed(seed, &[r as u64])))
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .into_iter()
        .reduce(|b, f| if f.log_likelihood > b.log_likelihood { f } else { b })
        .unwrap();
    Ok(best)
}

fn em(x: &DataMatrix, k: usize, floor: f64, seed: u64) -> Result<GmmFit> {
    let (n, d) = (x.rows(), x.cols());
    let mut cfg = KMeansConfig::new(k);
    cfg.n_init = 1;
    let init = kmeans(x, &cfg, seed)?;
    let mut resp = vec![0.0; n * k];
    for (i, &l) in init.labels.iter().enumerate() {
        resp[i * k + l] = 1.0;
    }
    let mut model = m_step(x, &resp, k, floor);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iter = 0;
    let mut prev = f64::NEG_INFINITY;
    for it in 0..MAX_ITER {
        n_iter = it + 1;
        let comps = Components::new(&model);
        let mut z = vec![0.0; d];
        let mut total = 0.0;
        let mut logs = vec![0.0; k];
        for (i, row) in x.row_iter().enumerate() {
            for (c, l) in logs.iter_mut().enumerate() {
                *l = comps.component_log(c, row, &mut z);
            }
            let lse = log_sum_exp(&logs);
            total += lse;
            for c in 0..k {
                resp[i * k + c] = (logs[c] - lse).exp();
            }
        }
        let mean_ll = total / n as f64;
        trace.push(mean_ll);
        if (mean_ll - prev).abs() < TOL {
            converged = true;
            break;
        }
        prev = mean_ll;
        model = m_step(x, &resp, k, floor);
    }
    // `model` produced the last trace entry only when converged; re-score otherwise.
    let log_likelihood = model.log_likelihood(x);
    Ok(GmmFit {
        bic: bic(log_likelihood, k, d, n),
        model,
        log_likelihood,
        n_iter,
        converged,
        trace,
    })
}

fn m_step(x: &DataMatrix, resp: &[f64], k: usize, floor: f64) -> GmmModel {
    let (n, d) = (x.rows(), x.cols());
    let tiny = 10.0 * f64::EPSILON;
    let mut nk = vec![tiny; k];
    let mut means = vec![vec![0.0; d]; k];
    for (i, row) in x.row_iter().enumerate() {
        for c in 0..k {
            let r = resp[i * k + c];
            nk[c] += r;
            for (m, v) in means[c].iter_mut().zip(row) {
                *m += r * v;
            }
        }
    }
    for c in 0..k {
        for m in means[c].iter_mut() {
            *m /= nk[c];
        }
    }
    let mut covs = vec![DMatrix::<f64>::zeros(d, d); k];
    let mut diff = vec![0.0; d];
    for (i, row) in x.row_iter().enumerate() {
        for c in 0..k {
            let r = resp[i * k + c];
            if r == 0.0 {
                continue;
            }
            for j in 0..d {
                diff[j] = row[j] - means[c][j];
            }
            let cov = &mut covs[c];
            for a in 0..d {
                let ra = r * diff[a];
                for b in 0..=a {
                    cov[(a, b)] += ra * diff[b];
                }
            }
        }
    }
    for c in 0..k {
        let cov = &mut covs[c];
        for a in 0..d {
            for b in 0..=a {
                let v = cov[(a, b)] / nk[c];
                cov[(a, b)] = v;
                cov[(b, a)] = v;
            }
            cov[(a, a)] += floor;
        }
    }
    let total: f64 = nk.iter().sum();
    let weights = nk.iter().map(|w| w / total).collect();
    let _ = n;
    GmmModel {
        weights,
        means,
        covariances: covs,
    }
}
