//! Semi-supervised stacking: unsupervised detector scores are appended as
//! extra features and a random forest is trained on the augmented matrix.
//!
//! Unlabeled samples are treated as the normal class.

use crate::data::{DataMatrix, LabelMask};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

use super::{DetectorSpec, FittedModel, RandomForest};

#[derive(Debug)]
pub struct ScoreStack {
    roster: Vec<FittedModel>,
    forest: RandomForest,
}

impl ScoreStack {
    pub fn fit(
        train: &DataMatrix,
        mask: &LabelMask,
        roster: &[DetectorSpec],
        n_trees: usize,
        seed: u64,
    ) -> Result<Self> {
        if mask.len() != train.rows() {
            return Err(Error::LengthMismatch {
                expected: train.rows(),
                found: mask.len(),
            });
        }
        let labels = mask.effective_labels();
        if !labels.has_both_classes() {
            return Err(Error::SingleClassTraining);
        }
        let fitted = roster
            .iter()
            .enumerate()
            .map(|(i, spec)| spec.fit(train, None, derive_seed(seed, &[i as u64 + 1])))
            .collect::<Result<Vec<_>>>()?;
        let augmented = augment(train, &fitted)?;
        let forest = RandomForest::fit(&augmented, &labels, n_trees, seed)?;
        Ok(Self { roster: fitted, forest })
    }

    pub fn score(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        Ok(self.forest.score(&augment(x, &self.roster)?))
    }
}

fn augment(x: &DataMatrix, roster: &[FittedModel]) -> Result<DataMatrix> {
    let cols = roster
        .iter()
        .map(|m| m.score(x).map(|s| s.into_vec()))
        .collect::<Result<Vec<_>>>()?;
    x.with_columns(&cols)
}
