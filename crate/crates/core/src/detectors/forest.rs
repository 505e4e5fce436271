//! Random forest of CART classifiers (Gini impurity, bootstrap samples,
//! `ceil(sqrt(d))` candidate features per split). Trees grow until a node is
//! pure or holds fewer than two samples; the score is the mean anomaly-class
//! fraction of the leaves a row lands in.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::data::{DataMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng, Rng};

#[derive(Debug, Clone)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

struct Grower<'a> {
    x: &'a DataMatrix,
    y: &'a [u8],
    max_features: usize,
    nodes: Vec<Node>,
}

/// Best split of one feature as `(threshold, score)`; score is
/// `sum_children (n1^2 + n0^2) / n`, larger is purer.
fn best_split_on(
    x: &DataMatrix,
    y: &[u8],
    idx: &[usize],
    feature: usize,
    buf: &mut Vec<(f64, u8)>,
) -> Option<(f64, f64)> {
    buf.clear();
    buf.extend(idx.iter().map(|&i| (x.get(i, feature), y[i])));
    buf.sort_by(|a, b| a.0.total_cmp(&b.0));
    if buf[0].0 == buf[buf.len() - 1].0 {
        return None;
    }
    let n = buf.len();
    let total1 = buf.iter().filter(|p| p.1 == 1).count() as f64;
    let (mut l1, mut l_n) = (0.0, 0.0);
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n - 1 {
        l_n += 1.0;
        l1 += f64::from(buf[i].1);
        if buf[i].0 == buf[i + 1].0 {
            continue;
        }
        let l0 = l_n - l1;
        let r_n = n as f64 - l_n;
        let r1 = total1 - l1;
        let r0 = r_n - r1;
        let score = (l1 * l1 + l0 * l0) / l_n + (r1 * r1 + r0 * r0) / r_n;
        if best.is_none_or(|(_, s)| score > s) {
            let (a, b) = (buf[i].0, buf[i + 1].0);
            let mut t = a + (b - a) / 2.0;
            if t >= b {
                t = a;
            }
            best = Some((t, score));
        }
    }
    best
}

impl Grower<'_> {
    fn grow(&mut self, idx: Vec<usize>, r: &mut Rng) -> usize {
        let id = self.nodes.len();
        let n1 = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let frac = n1 as f64 / idx.len() as f64;
        self.nodes.push(Node::Leaf(frac));
        if idx.len() < 2 || n1 == 0 || n1 == idx.len() {
            return id;
        }
        let mut features: Vec<usize> = (0..self.x.cols()).collect();
        features.shuffle(r);
        let mut buf = Vec::with_capacity(idx.len());
        let mut best: Option<(usize, f64, f64)> = None;
        for (tried, &f) in features.iter().enumerate() {
            // Keep drawing past max_features until at least one valid split exists.
            if tried >= self.max_features && best.is_some() {
                break;
            }
            if let Some((t, s)) = best_split_on(self.x, self.y, &idx, f, &mut buf) {
                if best.is_none_or(|(_, _, bs)| s > bs) {
                    best = Some((f, t, s));
                }
            }
        }
        let Some((feature, threshold, _)) = best else {
            return id;
        };
        let (l, rr): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| self.x.get(i, feature) <= threshold);
        let left = self.grow(l, r);
        let right = self.grow(rr, r);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    /// Grows a tree on the rows listed in `idx` (repeats allowed).
    pub fn fit(x: &DataMatrix, y: &LabelVector, idx: Vec<usize>, max_features: usize, r: &mut Rng) -> Self {
        let mut g = Grower {
            x,
            y: y.as_slice(),
            max_features,
            nodes: Vec::new(),
        };
        g.grow(idx, r);
        Self { nodes: g.nodes }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(train: &DataMatrix, y: &LabelVector, n_trees: usize, seed: u64) -> Result<Self> {
        if y.len() != train.rows() {
            return Err(Error::LengthMismatch {
                expected: train.rows(),
                found: y.len(),
            });
        }
        if !y.has_both_classes() {
            return Err(Error::SingleClassTraining);
        }
        let n = train.rows();
        let max_features = ((train.cols() as f64).sqrt().ceil() as usize).max(1);
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| {
                let mut r = rng(derive_seed(seed, &[t as u64]));
                let idx: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
                DecisionTree::fit(train, y, idx, max_features, &mut r)
            })
            .collect();
        Ok(Self { trees })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn score(&self, x: &DataMatrix) -> Vec<f64> {
        x.row_iter()
            .map(|row| self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64)
            .collect()
    }
}
