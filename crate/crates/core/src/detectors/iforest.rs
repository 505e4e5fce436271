//! Isolation forest.

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::Result;
use crate::seed::{derive_seed, rng, Rng};
use crate::stats::harmonic;

/// Average path length of an unsuccessful BST search over `m` points.
pub fn average_path_length(m: usize) -> f64 {
    match m {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let mf = m as f64;
            2.0 * harmonic(m - 1) - 2.0 * (mf - 1.0) / mf
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    External {
        size: usize,
    },
    Internal {
        feature: usize,
        split: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct ITree {
    nodes: Vec<Node>,
}

impl ITree {
    fn build(x: &DataMatrix, idx: Vec<usize>, depth_limit: usize, r: &mut Rng) -> Self {
        let mut tree = ITree { nodes: Vec::new() };
        tree.grow(x, idx, 0, depth_limit, r);
        tree
    }

    fn grow(&mut self, x: &DataMatrix, idx: Vec<usize>, depth: usize, limit: usize, r: &mut Rng) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::External { size: idx.len() });
        if depth >= limit || idx.len() <= 1 {
            return id;
        }
        let ranges: Vec<(usize, f64, f64)> = (0..x.cols())
            .filter_map(|j| {
                let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = x.get(i, j);
                    (lo.min(v), hi.max(v))
                });
                (hi > lo).then_some((j, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[r.random_range(0..ranges.len())];
        let split = lo + r.random::<f64>() * (hi - lo);
        let (l, rr): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| x.get(i, feature) < split);
        let left = self.grow(x, l, depth + 1, limit, r);
        let right = self.grow(x, rr, depth + 1, limit, r);
        self.nodes[id] = Node::Internal {
            feature,
            split,
            left,
            right,
        };
        id
    }

    fn path_length(&self, row: &[f64]) -> f64 {
        let mut id = 0;
        let mut depth = 0.0;
        loop {
            match &self.nodes[id] {
                Node::External { size } => return depth + average_path_length(*size),
                Node::Internal {
                    feature,
                    split,
                    left,
                    right,
                } => {
                    id = if row[*feature] < *split { *left } else { *right };
                    depth += 1.0;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsolationForest {
    trees: Vec<ITree>,
    psi: usize,
}

impl IsolationForest {
    pub fn fit(train: &DataMatrix, n_trees: usize, subsample: usize, seed: u64) -> Result<Self> {
        let n = train.rows();
        let psi = subsample.min(n).max(1);
        let depth_limit = (psi as f64).log2().ceil() as usize;
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| {
                let mut r = rng(derive_seed(seed, &[t as u64]));
                let idx = sample(&mut r, n, psi).into_vec();
                ITree::build(train, idx, depth_limit, &mut r)
            })
            .collect();
        Ok(Self { trees, psi })
    }

    pub fn subsample_size(&self) -> usize {
        self.psi
    }

    /// `2^(-E[h(x)] / c(psi))`, in `(0, 1]`.
    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        let c = average_path_length(self.psi);
        x.row_iter()
            .map(|row| {
                let mean = self.trees.iter().map(|t| t.path_length(row)).sum::<f64>() / self.trees.len() as f64;
                if c > 0.0 {
                    2f64.powf(-mean / c)
                } else {
                    1.0
                }
            })
            .collect()
    }
}
