//! Anomaly-detection benchmarking toolkit.
//!
//! * [`data`]: feature matrices, labels, masks and score vectors.
//! * [`detectors`]: shallow detectors behind a fit/score contract.
//! * [`synth`]: generative models of the normal class and the four
//!   synthetic anomaly types.
//! * [`corrupt`]: duplicated anomalies, irrelevant features, label flips.
//! * [`eval`]: metrics, splitting, label subsampling and rank statistics.

pub mod corrupt;
pub mod data;
pub mod detectors;
pub mod error;
pub mod eval;
pub mod kmeans;
pub mod neighbors;
pub mod seed;
pub mod stats;
pub mod synth;

pub use data::{validate_dataset, DataMatrix, Dataset, LabelMask, LabelVector, ScoreVector};
pub use detectors::{DetectorKind, DetectorSpec, FittedModel};
pub use error::{Error, Result};
pub use seed::{derive_seed, SeedPath};
