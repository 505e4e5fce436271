//! Synthetic normal data and the four injected anomaly types.
//!
//! Normals come from a Gaussian mixture fitted to a dataset's normal rows
//! (or, for dependency anomalies, from per-feature KDEs joined by a Gaussian
//! copula). Anomalies are:
//!
//! * local: mixture samples with every covariance scaled by `alpha`;
//! * global: per-feature uniform draws over `alpha`-scaled min/max bounds;
//! * dependency: independent KDE draws, so the joint structure is lost;
//! * clustered: mixture samples with every mean scaled by `alpha`.

pub mod gmm;
pub mod kde;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::data::{DataMatrix, Dataset, LabelVector};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng};

pub use gmm::{fit_gmm, ComponentCount, GmmFit, GmmModel};
pub use kde::{CopulaModel, MarginalKde};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnomalyType {
    Local,
    Global,
    Dependency,
    Clustered,
}

impl AnomalyType {
    pub const ALL: [AnomalyType; 4] = [Self::Local, Self::Global, Self::Dependency, Self::Clustered];

    pub fn name(self) -> &'static str {
        match self {
            Self::Local => "local",
            Self::Global => "global",
            Self::Dependency => "dependency",
            Self::Clustered => "clustered",
        }
    }

    /// 5 for local and clustered, 1.1 for global. Dependency ignores alpha.
    pub fn default_alpha(self) -> f64 {
        match self {
            Self::Global => 1.1,
            _ => 5.0,
        }
    }
}

impl fmt::Display for AnomalyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnomalyType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown anomaly type `{s}`")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            param: "alpha".into(),
            value: alpha,
            reason: "must be positive".into(),
        })
    }
}

pub fn sample_gmm(model: &GmmModel, n: usize, seed: u64) -> Result<DataMatrix> {
    model.sample(n, seed)
}

pub fn gen_local(model: &GmmModel, n_anomaly: usize, alpha: f64, seed: u64) -> Result<DataMatrix> {
    check_alpha(alpha)?;
    model.with_scaled_covariances(alpha).sample(n_anomaly, seed)
}

pub fn gen_clustered(model: &GmmModel, n_anomaly: usize, alpha: f64, seed: u64) -> Result<DataMatrix> {
    check_alpha(alpha)?;
    model.with_scaled_means(alpha).sample(n_anomaly, seed)
}

/// Per-feature `[lo, hi]` after scaling the observed min and max by `alpha`
/// and putting the endpoints back in order.
pub fn global_bounds(x_normal: &DataMatrix, alpha: f64) -> Vec<(f64, f64)> {
    (0..x_normal.cols())
        .map(|j| {
            let col = x_normal.column(j);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min) * alpha;
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max) * alpha;
            (lo.min(hi), lo.max(hi))
        })
        .collect()
}

pub fn gen_global(x_normal: &DataMatrix, n_anomaly: usize, alpha: f64, seed: u64) -> Result<DataMatrix> {
    check_alpha(alpha)?;
    if n_anomaly == 0 {
        return Err(Error::InvalidInput("sample size must be >= 1".into()));
    }
    let bounds = global_bounds(x_normal, alpha);
    let mut r = rng(seed);
    let mut values = Vec::with_capacity(n_anomaly * bounds.len());
    for _ in 0..n_anomaly {
        for &(lo, hi) in &bounds {
            let v = if lo == hi { lo } else { r.random_range(lo..=hi) };
            values.push(v);
        }
    }
    DataMatrix::new(n_anomaly, bounds.len(), values)
}

/// `(normals, anomalies)`: copula-coupled and independent KDE draws.
pub fn gen_dependency(
    x_normal: &DataMatrix,
    n_normal: usize,
    n_anomaly: usize,
    seed: u64,
) -> Result<(DataMatrix, DataMatrix)> {
    let kde = MarginalKde::fit(x_normal)?;
    let copula = CopulaModel::fit(x_normal)?;
    let normals = kde::sample_coupled(&kde, &copula, n_normal, derive_seed(seed, &[0]))?;
    let anomalies = kde.sample_independent(n_anomaly, derive_seed(seed, &[1]))?;
    Ok((normals, anomalies))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub anomaly_type: AnomalyType,
    /// `None` uses the type's default.
    pub alpha: Option<f64>,
    /// `None` matches the seed dataset's normal count.
    pub n_normal: Option<usize>,
    /// `None` matches the seed dataset's anomaly count.
    pub n_anomaly: Option<usize>,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(anomaly_type: AnomalyType, seed: u64) -> Self {
        Self {
            anomaly_type,
            alpha: None,
            n_normal: None,
            n_anomaly: None,
            seed,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(self.anomaly_type.default_alpha())
    }
}

/// Replaces a dataset by generated normals and anomalies of one type.
/// Original anomalies are discarded; only normal rows are modelled.
pub fn assemble_synthetic(seed_dataset: &Dataset, params: &SynthParams) -> Result<Dataset> {
    let normal = seed_dataset.normal_rows()?;
    if normal.rows() < kde::MIN_ROWS {
        return Err(Error::TooFewSamples {
            needed: kde::MIN_ROWS,
            got: normal.rows(),
        });
    }
    let n_normal = params.n_normal.unwrap_or(normal.rows());
    let n_anomaly = params.n_anomaly.unwrap_or(seed_dataset.y.n_anomalies());
    if n_normal == 0 || n_anomaly == 0 {
        return Err(Error::InvalidInput("generated class counts must be >= 1".into()));
    }
    let alpha = params.alpha();
    check_alpha(alpha)?;
    let s = |i: u64| derive_seed(params.seed, &[i]);
    let (normals, anomalies) = match params.anomaly_type {
        AnomalyType::Dependency => gen_dependency(&normal, n_normal, n_anomaly, s(1))?,
        kind => {
            let model = fit_gmm(&normal, ComponentCount::Auto, s(0))?.model;
            let normals = model.sample(n_normal, s(1))?;
            let anomalies = match kind {
                AnomalyType::Local => gen_local(&model, n_anomaly, alpha, s(2))?,
                AnomalyType::Clustered => gen_clustered(&model, n_anomaly, alpha, s(2))?,
                _ => gen_global(&normals, n_anomaly, alpha, s(2))?,
            };
            (normals, anomalies)
        }
    };
    let x = normals.vstack(&anomalies)?;
    let mut labels = vec![0u8; n_normal];
    labels.resize(n_normal + n_anomaly, 1);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    order.shuffle(&mut rng(s(3)));
    let y = LabelVector::new(order.iter().map(|&i| labels[i]).collect())?;
    Ok(Dataset {
        x: x.select_rows(&order)?,
        y,
    })
}
