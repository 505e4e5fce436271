//! Shallow anomaly detectors behind a common fit/score contract.
//!
//! Every detector is fitted on a training matrix (label-informed ones also
//! take a [`LabelMask`]) and then scores arbitrary matrices with the same
//! number of columns. Higher scores are more anomalous for every detector.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::data::{DataMatrix, LabelMask, ScoreVector};
use crate::error::{Error, Result};

pub mod cblof;
pub mod forest;
pub mod gnb;
pub mod hbos;
pub mod iforest;
pub mod knn;
pub mod loda;
pub mod lof;
pub mod pca;
pub mod stack;
pub mod tails;

pub use cblof::CblofModel;
pub use forest::RandomForest;
pub use gnb::GaussianNb;
pub use hbos::HbosModel;
pub use iforest::IsolationForest;
pub use knn::KnnModel;
pub use loda::LodaModel;
pub use lof::LofModel;
pub use pca::PcaModel;
pub use stack::ScoreStack;
pub use tails::{TailModel, TailVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    Pca,
    Knn,
    Lof,
    Cblof,
    Hbos,
    Ecod,
    Copod,
    IForest,
    Loda,
    Gnb,
    RForest,
    ScoreStack,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 12] = [
        DetectorKind::Pca,
        DetectorKind::Knn,
        DetectorKind::Lof,
        DetectorKind::Cblof,
        DetectorKind::Hbos,
        DetectorKind::Ecod,
        DetectorKind::Copod,
        DetectorKind::IForest,
        DetectorKind::Loda,
        DetectorKind::Gnb,
        DetectorKind::RForest,
        DetectorKind::ScoreStack,
    ];

    /// The nine unsupervised detectors.
    pub const UNSUPERVISED: [DetectorKind; 9] = [
        DetectorKind::Pca,
        DetectorKind::Knn,
        DetectorKind::Lof,
        DetectorKind::Cblof,
        DetectorKind::Hbos,
        DetectorKind::Ecod,
        DetectorKind::Copod,
        DetectorKind::IForest,
        DetectorKind::Loda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Pca => "pca",
            DetectorKind::Knn => "knn",
            DetectorKind::Lof => "lof",
            DetectorKind::Cblof => "cblof",
            DetectorKind::Hbos => "hbos",
            DetectorKind::Ecod => "ecod",
            DetectorKind::Copod => "copod",
            DetectorKind::IForest => "iforest",
            DetectorKind::Loda => "loda",
            DetectorKind::Gnb => "gnb",
            DetectorKind::RForest => "rforest",
            DetectorKind::ScoreStack => "scorestack",
        }
    }

    /// Whether fitting requires revealed anomaly labels.
    pub fn needs_labels(self) -> bool {
        matches!(
            self,
            DetectorKind::Gnb | DetectorKind::RForest | DetectorKind::ScoreStack
        )
    }

    /// Parameter names and defaults.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            DetectorKind::Pca => &[("variance_kept", 0.9)],
            DetectorKind::Knn => &[("k", 5.0)],
            DetectorKind::Lof => &[("k", 20.0)],
            DetectorKind::Cblof => &[("n_clusters", 8.0), ("alpha", 0.9), ("beta", 5.0)],
            DetectorKind::Hbos => &[("n_bins", 10.0)],
            DetectorKind::Ecod | DetectorKind::Copod => &[],
            DetectorKind::IForest => &[("n_trees", 100.0), ("subsample", 256.0)],
            DetectorKind::Loda => &[("n_projections", 100.0)],
            DetectorKind::Gnb => &[("var_smoothing", 1e-9)],
            DetectorKind::RForest | DetectorKind::ScoreStack => &[("n_trees", 100.0)],
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownDetector(s.to_string()))
    }
}

/// Validated detector parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorConfig {
    Pca { variance_kept: f64 },
    Knn { k: usize },
    Lof { k: usize },
    Cblof { n_clusters: usize, alpha: f64, beta: f64 },
    Hbos { n_bins: usize },
    Ecod,
    Copod,
    IForest { n_trees: usize, subsample: usize },
    Loda { n_projections: usize },
    Gnb { var_smoothing: f64 },
    RForest { n_trees: usize },
    ScoreStack { n_trees: usize, roster: Vec<DetectorSpec> },
}

/// A detector name plus its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    kind: DetectorKind,
    params: BTreeMap<String, f64>,
    config: DetectorConfig,
}

fn positive_int(kind: DetectorKind, params: &BTreeMap<String, f64>, name: &str) -> Result<usize> {
    let v = params[name];
    if !(v.is_finite() && v >= 1.0 && v.fract() == 0.0) {
        return Err(Error::InvalidParameter {
            param: format!("{kind}.{name}"),
            value: v,
            reason: "must be a positive integer".into(),
        });
    }
    Ok(v as usize)
}

fn in_range(
    kind: DetectorKind,
    params: &BTreeMap<String, f64>,
    name: &str,
    ok: impl Fn(f64) -> bool,
    reason: &str,
) -> Result<f64> {
    let v = params[name];
    if !v.is_finite() || !ok(v) {
        return Err(Error::InvalidParameter {
            param: format!("{kind}.{name}"),
            value: v,
            reason: reason.into(),
        });
    }
    Ok(v)
}

impl DetectorSpec {
    /// Builds a spec, filling defaults for missing parameters. Unknown names
    /// and out-of-domain values are rejected.
    pub fn new(kind: DetectorKind, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        if kind == DetectorKind::ScoreStack {
            return Self::scorestack(Self::default_roster(), overrides);
        }
        Self::build(kind, overrides, Vec::new())
    }

    pub fn default_for(kind: DetectorKind) -> Self {
        Self::new(kind, &BTreeMap::new()).expect("defaults are valid")
    }

    /// Parses a name and uses default parameters.
    pub fn named(name: &str) -> Result<Self> {
        Ok(Self::default_for(name.parse()?))
    }

    /// Stacking detector over an explicit roster of unsupervised detectors.
    pub fn scorestack(roster: Vec<DetectorSpec>, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        if let Some(bad) = roster.iter().find(|s| s.kind.needs_labels()) {
            return Err(Error::InvalidInput(format!(
                "scorestack roster may only contain unsupervised detectors, got `{}`",
                bad.kind
            )));
        }
        Self::build(DetectorKind::ScoreStack, overrides, roster)
    }

    /// `{knn, lof, hbos, ecod, iforest, pca}` at default parameters.
    pub fn default_roster() -> Vec<DetectorSpec> {
        [
            DetectorKind::Knn,
            DetectorKind::Lof,
            DetectorKind::Hbos,
            DetectorKind::Ecod,
            DetectorKind::IForest,
            DetectorKind::Pca,
        ]
        .into_iter()
        .map(Self::default_for)
        .collect()
    }

    fn build(kind: DetectorKind, overrides: &BTreeMap<String, f64>, roster: Vec<DetectorSpec>) -> Result<Self> {
        let defaults = kind.defaults();
        if let Some(param) = overrides.keys().find(|k| !defaults.iter().any(|(name, _)| name == k)) {
            return Err(Error::UnknownParameter {
                detector: kind.name().to_string(),
                param: param.clone(),
            });
        }
        let mut params: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| ((*k).to_string(), *v)).collect();
        params.extend(overrides.iter().map(|(k, v)| (k.clone(), *v)));
        let p = &params;
        let config = match kind {
            DetectorKind::Pca => DetectorConfig::Pca {
                variance_kept: in_range(kind, p, "variance_kept", |v| v > 0.0 && v <= 1.0, "must be in (0, 1]")?,
            },
            DetectorKind::Knn => DetectorConfig::Knn {
                k: positive_int(kind, p, "k")?,
            },
            DetectorKind::Lof => DetectorConfig::Lof {
                k: positive_int(kind, p, "k")?,
            },
            DetectorKind::Cblof => DetectorConfig::Cblof {
                n_clusters: positive_int(kind, p, "n_clusters")?,
                alpha: in_range(kind, p, "alpha", |v| v > 0.0 && v <= 1.0, "must be in (0, 1]")?,
                beta: in_range(kind, p, "beta", |v| v >= 1.0, "must be >= 1")?,
            },
            DetectorKind::Hbos => DetectorConfig::Hbos {
                n_bins: positive_int(kind, p, "n_bins")?,
            },
            DetectorKind::Ecod => DetectorConfig::Ecod,
            DetectorKind::Copod => DetectorConfig::Copod,
            DetectorKind::IForest => DetectorConfig::IForest {
                n_trees: positive_int(kind, p, "n_trees")?,
                subsample: positive_int(kind, p, "subsample")?,
            },
            DetectorKind::Loda => DetectorConfig::Loda {
                n_projections: positive_int(kind, p, "n_projections")?,
            },
            DetectorKind::Gnb => DetectorConfig::Gnb {
                var_smoothing: in_range(kind, p, "var_smoothing", |v| v >= 0.0, "must be >= 0")?,
            },
            DetectorKind::RForest => DetectorConfig::RForest {
                n_trees: positive_int(kind, p, "n_trees")?,
            },
            DetectorKind::ScoreStack => DetectorConfig::ScoreStack {
                n_trees: positive_int(kind, p, "n_trees")?,
                roster,
            },
        };
        Ok(Self { kind, params, config })
    }

    pub fn kind(&self) -> DetectorKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn needs_labels(&self) -> bool {
        self.kind.needs_labels()
    }

    /// Fits the detector. Label-informed detectors require `mask`; the
    /// unsupervised ones ignore it.
    pub fn fit(&self, train: &DataMatrix, mask: Option<&LabelMask>, seed: u64) -> Result<FittedModel> {
        let labels = || -> Result<_> {
            let mask = mask.ok_or(Error::SingleClassTraining)?;
            if mask.len() != train.rows() {
                return Err(Error::LengthMismatch {
                    expected: train.rows(),
                    found: mask.len(),
                });
            }
            Ok(mask.effective_labels())
        };
        let model = match &self.config {
            DetectorConfig::Pca { variance_kept } => Model::Pca(PcaModel::fit(train, *variance_kept)?),
            DetectorConfig::Knn { k } => Model::Knn(KnnModel::fit(train, *k)?),
            DetectorConfig::Lof { k } => Model::Lof(LofModel::fit(train, *k)?),
            DetectorConfig::Cblof {
                n_clusters,
                alpha,
                beta,
            } => Model::Cblof(CblofModel::fit(train, *n_clusters, *alpha, *beta, seed)?),
            DetectorConfig::Hbos { n_bins } => Model::Hbos(HbosModel::fit(train, *n_bins)?),
            DetectorConfig::Ecod => Model::Tail(TailModel::fit(train, TailVariant::Ecod)?),
            DetectorConfig::Copod => Model::Tail(TailModel::fit(train, TailVariant::Copod)?),
            DetectorConfig::IForest { n_trees, subsample } => {
                Model::IForest(IsolationForest::fit(train, *n_trees, *subsample, seed)?)
            }
            DetectorConfig::Loda { n_projections } => Model::Loda(LodaModel::fit(train, *n_projections, seed)?),
            DetectorConfig::Gnb { var_smoothing } => Model::Gnb(GaussianNb::fit(train, &labels()?, *var_smoothing)?),
            DetectorConfig::RForest { n_trees } => {
                Model::RForest(RandomForest::fit(train, &labels()?, *n_trees, seed)?)
            }
            DetectorConfig::ScoreStack { n_trees, roster } => {
                let mask = mask.ok_or(Error::SingleClassTraining)?;
                Model::ScoreStack(ScoreStack::fit(train, mask, roster, *n_trees, seed)?)
            }
        };
        Ok(FittedModel {
            kind: self.kind,
            dim: train.cols(),
            model,
        })
    }
}

#[derive(Debug)]
enum Model {
    Pca(PcaModel),
    Knn(KnnModel),
    Lof(LofModel),
    Cblof(CblofModel),
    Hbos(HbosModel),
    Tail(TailModel),
    IForest(IsolationForest),
    Loda(LodaModel),
    Gnb(GaussianNb),
    RForest(RandomForest),
    ScoreStack(ScoreStack),
}

/// An immutable fitted detector.
#[derive(Debug)]
pub struct FittedModel {
    kind: DetectorKind,
    dim: usize,
    model: Model,
}

impl FittedModel {
    pub fn kind(&self) -> DetectorKind {
        self.kind
    }

    /// Training dimensionality.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn score(&self, x: &DataMatrix) -> Result<ScoreVector> {
        if x.cols() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: x.cols(),
            });
        }
        let raw = match &self.model {
            Model::Pca(m) => m.score(x),
            Model::Knn(m) => m.score(x),
            Model::Lof(m) => m.score(x),
            Model::Cblof(m) => m.score(x),
            Model::Hbos(m) => m.score(x),
            Model::Tail(m) => m.score(x),
            Model::IForest(m) => m.score(x),
            Model::Loda(m) => m.score(x),
            Model::Gnb(m) => m.score(x),
            Model::RForest(m) => m.score(x),
            Model::ScoreStack(m) => m.score(x)?,
        };
        ScoreVector::new(raw)
    }
}

/// Fits on `train` and scores `x` in one call.
pub fn fit_score(
    spec: &DetectorSpec,
    train: &DataMatrix,
    mask: Option<&LabelMask>,
    x: &DataMatrix,
    seed: u64,
) -> Result<ScoreVector> {
    spec.fit(train, mask, seed)?.score(x)
}
