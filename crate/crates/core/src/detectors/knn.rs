//! Distance to the k-th nearest training row.

use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;

#[derive(Debug)]
pub struct KnnModel {
    index: NeighborIndex,
    k: usize,
}

impl KnnModel {
    pub fn fit(train: &DataMatrix, k: usize) -> Result<Self> {
        if k == 0 || k > train.rows() {
            return Err(Error::KTooLarge { k, rows: train.rows() });
        }
        Ok(Self {
            index: NeighborIndex::new(train.clone()),
            k,
        })
    }

    /// A training row identical to the query counts as a neighbor at
    /// distance 0.
    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        (0..x.rows())
            .into_par_iter()
            .map(|i| self.index.query(x.row(i), self.k, None)[self.k - 1].dist())
            .collect()
    }
}
