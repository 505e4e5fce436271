//! Exact k-nearest-neighbor search.
//!
//! Brute force is the reference; a k-d tree is used for low-dimensional
//! data. Both order candidates by `(squared distance, index)` so they return
//! identical neighbor lists, ties included.

use crate::data::DataMatrix;

/// Largest dimensionality for which the k-d tree is used.
pub const KD_TREE_MAX_DIM: usize = 16;
const LEAF_SIZE: usize = 16;

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// A neighbor: squared distance and training-row index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub sq_dist: f64,
    pub index: usize,
}

impl Neighbor {
    pub fn dist(&self) -> f64 {
        self.sq_dist.sqrt()
    }

    fn before(&self, other: &Neighbor) -> bool {
        self.sq_dist < other.sq_dist || (self.sq_dist == other.sq_dist && self.index < other.index)
    }
}

/// Bounded sorted buffer of the best `k` candidates.
struct TopK {
    k: usize,
    items: Vec<Neighbor>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    fn worst(&self) -> f64 {
        self.items.last().map_or(f64::INFINITY, |n| n.sq_dist)
    }

    fn push(&mut self, cand: Neighbor) {
        if self.is_full() && !cand.before(self.items.last().unwrap()) {
            return;
        }
        let pos = self.items.partition_point(|n| n.before(&cand));
        self.items.insert(pos, cand);
        if self.items.len() > self.k {
            self.items.pop();
        }
    }
}

enum Node {
    Leaf(Vec<usize>),
    Split {
        dim: usize,
        value: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Neighbor index over a copy of the training rows.
pub struct NeighborIndex {
    data: DataMatrix,
    tree: Option<Node>,
}

impl std::fmt::Debug for NeighborIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeighborIndex")
            .field("rows", &self.data.rows())
            .field("cols", &self.data.cols())
            .field("kd_tree", &self.tree.is_some())
            .finish()
    }
}

impl NeighborIndex {
    /// Chooses the k-d tree automatically for `cols <= 16`.
    pub fn new(data: DataMatrix) -> Self {
        let use_tree = data.cols() <= KD_TREE_MAX_DIM && data.rows() > LEAF_SIZE;
        Self::with_strategy(data, use_tree)
    }

    pub fn brute_force(data: DataMatrix) -> Self {
        Self::with_strategy(data, false)
    }

    fn with_strategy(data: DataMatrix, use_tree: bool) -> Self {
        let tree = use_tree.then(|| {
            let idx: Vec<usize> = (0..data.rows()).collect();
            build(&data, idx)
        });
        Self { data, tree }
    }

    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows() == 0
    }

    /// The `k` nearest rows to `query`, closest first. `exclude` skips one
    /// training index (used for leave-self-out queries on the training set).
    pub fn query(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
        let mut top = TopK::new(k);
        if k == 0 {
            return Vec::new();
        }
        match &self.tree {
            Some(root) => self.search(root, query, exclude, &mut top),
            None => {
                for (i, row) in self.data.row_iter().enumerate() {
                    if Some(i) == exclude {
                        continue;
                    }
                    top.push(Neighbor {
                        sq_dist: sq_dist(query, row),
                        index: i,
                    });
                }
            }
        }
        top.items
    }

    fn search(&self, node: &Node, q: &[f64], exclude: Option<usize>, top: &mut TopK) {
        match node {
            Node::Leaf(idx) => {
                for &i in idx {
                    if Some(i) == exclude {
                        continue;
                    }
                    top.push(Neighbor {
                        sq_dist: sq_dist(q, self.data.row(i)),
                        index: i,
                    });
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[*dim] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, exclude, top);
                // `<=` keeps equal-distance candidates reachable for index tie-breaks.
                if !top.is_full() || diff * diff <= top.worst() {
                    self.search(far, q, exclude, top);
                }
            }
        }
    }
}

fn build(data: &DataMatrix, mut idx: Vec<usize>) -> Node {
    if idx.len() <= LEAF_SIZE {
        return Node::Leaf(idx);
    }
    let d = data.cols();
    let mut best_dim = 0;
    let mut best_spread = -1.0;
    for j in 0..d {
        let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let v = data.get(i, j);
            (lo.min(v), hi.max(v))
        });
        if hi - lo > best_spread {
            best_spread = hi - lo;
            best_dim = j;
        }
    }
    if best_spread <= 0.0 {
        return Node::Leaf(idx);
    }
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| data.get(a, best_dim).total_cmp(&data.get(b, best_dim)));
    let value = data.get(idx[mid], best_dim);
    // Left gets values <= value, right gets > value.
    let (left, right): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| data.get(i, best_dim) <= value);
    if right.is_empty() {
        return Node::Leaf(left);
    }
    Node::Split {
        dim: best_dim,
        value,
        left: Box::new(build(data, left)),
        right: Box::new(build(data, right)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_points() -> DataMatrix {
        let mut rows = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                rows.push([f64::from(i), f64::from(j)]);
            }
        }
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn tree_equals_brute_force_with_many_ties() {
        let data = grid_points();
        let tree = NeighborIndex::new(data.clone());
        let brute = NeighborIndex::brute_force(data.clone());
        assert!(tree.tree.is_some());
        for q in [[0.0, 0.0], [4.5, 4.5], [3.0, 7.0], [-2.0, 11.0]] {
            for k in [1, 4, 9, 20] {
                assert_eq!(tree.query(&q, k, None), brute.query(&q, k, None));
            }
        }
        for i in 0..data.rows() {
            assert_eq!(
                tree.query(data.row(i), 5, Some(i)),
                brute.query(data.row(i), 5, Some(i))
            );
        }
    }

    #[test]
    fn exclude_skips_self() {
        let data = DataMatrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let idx = NeighborIndex::brute_force(data);
        let n = idx.query(&[0.0], 1, Some(0));
        assert_eq!(n[0].index, 1);
        assert_eq!(n[0].dist(), 1.0);
    }

    proptest! {
        #[test]
        fn tree_matches_brute(
            pts in prop::collection::vec(prop::collection::vec(-5i32..5, 3), 20..120),
            q in prop::collection::vec(-6i32..6, 3),
            k in 1usize..10,
        ) {
            let rows: Vec<Vec<f64>> = pts.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect();
            let data = DataMatrix::from_rows(&rows).unwrap();
            let q: Vec<f64> = q.iter().map(|&v| f64::from(v)).collect();
            let tree = NeighborIndex::new(data.clone());
            let brute = NeighborIndex::brute_force(data);
            prop_assert_eq!(tree.query(&q, k, None), brute.query(&q, k, None));
        }
    }
}
