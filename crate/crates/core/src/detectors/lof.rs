//! Local outlier factor.
//!
//! Training-time neighborhoods exclude the point itself. Scoring is
//! inductive: a query's neighbors are taken from the training rows with no
//! self-exclusion. Reachability means are regularized by `1e-10` so that
//! coincident duplicates give a finite density; when all points coincide
//! every factor is 1.

use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::neighbors::{Neighbor, NeighborIndex};

const REACH_EPS: f64 = 1e-10;

#[derive(Debug)]
pub struct LofModel {
    index: NeighborIndex,
    k: usize,
    k_dist: Vec<f64>,
    lrd: Vec<f64>,
    train_scores: Vec<f64>,
}

impl LofModel {
    pub fn fit(train: &DataMatrix, k: usize) -> Result<Self> {
        let n = train.rows();
        if k == 0 || k >= n {
            return Err(Error::KTooLarge { k, rows: n });
        }
        let index = NeighborIndex::new(train.clone());
        let hoods: Vec<Vec<Neighbor>> = (0..n)
            .into_par_iter()
            .map(|i| index.query(train.row(i), k, Some(i)))
            .collect();
        let k_dist: Vec<f64> = hoods.iter().map(|h| h[k - 1].dist()).collect();
        let lrd: Vec<f64> = hoods.iter().map(|h| local_density(h, &k_dist)).collect();
        let train_scores = hoods.iter().zip(&lrd).map(|(h, &own)| factor(h, &lrd, own)).collect();
        Ok(Self {
            index,
            k,
            k_dist,
            lrd,
            train_scores,
        })
    }

    /// Leave-self-out factors of the training rows.
    pub fn training_scores(&self) -> &[f64] {
        &self.train_scores
    }

    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        (0..x.rows())
            .into_par_iter()
            .map(|i| {
                let hood = self.index.query(x.row(i), self.k, None);
                let own = local_density(&hood, &self.k_dist);
                factor(&hood, &self.lrd, own)
            })
            .collect()
    }
}

fn local_density(hood: &[Neighbor], k_dist: &[f64]) -> f64 {
    let reach: f64 = hood.iter().map(|nb| nb.dist().max(k_dist[nb.index])).sum::<f64>() / hood.len() as f64;
    1.0 / (reach + REACH_EPS)
}

fn factor(hood: &[Neighbor], lrd: &[f64], own: f64) -> f64 {
    let mean = hood.iter().map(|nb| lrd[nb.index]).sum::<f64>() / hood.len() as f64;
    mean / own
}
