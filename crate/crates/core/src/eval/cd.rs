//! Critical-difference analysis: Friedman omnibus, pairwise Wilcoxon tests
//! with Holm correction, and maximal cliques of non-distinguished algorithms.

use crate::error::{Error, Result};

use super::hypothesis::{friedman_test, holm_adjust, wilcoxon_signed_rank};
use super::ranks::RankTable;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CdResult {
    pub algorithms: Vec<String>,
    pub mean_ranks: Vec<f64>,
    pub friedman_statistic: f64,
    pub friedman_p: f64,
    /// Symmetric Holm-adjusted p-values with unit diagonal.
    pub adjusted_p: Vec<Vec<f64>>,
    /// Maximal cliques (two or more members) of the graph joining pairs with
    /// adjusted p above `alpha`. Members are sorted by mean rank and cliques by
    /// their best member.
    pub cliques: Vec<Vec<usize>>,
    pub alpha: f64,
}

impl CdResult {
    pub fn is_significant(&self, a: usize, b: usize) -> bool {
        self.adjusted_p[a][b] <= self.alpha
    }
}

pub fn cd_cliques(table: &RankTable, alpha: f64) -> Result<CdResult> {
    let (n, k) = (table.n_datasets(), table.n_algorithms());
    if k < 2 || n < 3 {
        return Err(Error::DegenerateTable {
            datasets: n,
            algorithms: k,
        });
    }
    let (friedman_statistic, friedman_p) = friedman_test(table)?;
    let cols: Vec<Vec<f64>> = (0..k).map(|j| table.column(j)).collect();
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    let mut raw = Vec::with_capacity(pairs.capacity());
    for a in 0..k {
        for b in a + 1..k {
            pairs.push((a, b));
            raw.push(wilcoxon_signed_rank(&cols[a], &cols[b])?);
        }
    }
    let adj = holm_adjust(&raw);
    let mut adjusted_p = vec![vec![1.0; k]; k];
    for (&(a, b), &p) in pairs.iter().zip(&adj) {
        adjusted_p[a][b] = p;
        adjusted_p[b][a] = p;
    }
    let linked: Vec<Vec<bool>> = (0..k)
        .map(|a| (0..k).map(|b| a != b && adjusted_p[a][b] > alpha).collect())
        .collect();
    let mean_ranks = table.mean_ranks();
    let mut cliques = maximal_cliques(&linked);
    cliques.retain(|c| c.len() >= 2);
    for c in &mut cliques {
        c.sort_by(|&a, &b| mean_ranks[a].total_cmp(&mean_ranks[b]).then(a.cmp(&b)));
    }
    cliques.sort_by(|x, y| {
        mean_ranks[x[0]]
            .total_cmp(&mean_ranks[y[0]])
            .then_with(|| x.len().cmp(&y.len()).reverse())
            .then_with(|| x.cmp(y))
    });
    Ok(CdResult {
        algorithms: table.algorithms.clone(),
        mean_ranks,
        friedman_statistic,
        friedman_p,
        adjusted_p,
        cliques,
        alpha,
    })
}

/// Bron-Kerbosch with pivoting.
pub fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn expand(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("p or x is non-empty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            r.push(v);
            let np = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
            expand(adj, r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    expand(adj, &mut Vec::new(), (0..adj.len()).collect(), Vec::new(), &mut out);
    out
}
