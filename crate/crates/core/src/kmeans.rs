//! Lloyd's k-means with k-means++ seeding.

use rand::Rng as _;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::neighbors::sq_dist;
use crate::seed::{derive_seed, rng, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub n_init: usize,
    pub max_iter: usize,
    /// Stop when the relative inertia improvement falls below this.
    pub tol: f64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            n_init: 10,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// `k` centroids, each of length `d`.
    pub centroids: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    pub inertia: f64,
}

pub fn kmeans(x: &DataMatrix, cfg: &KMeansConfig, seed: u64) -> Result<KMeansFit> {
    if cfg.k == 0 || cfg.k > x.rows() {
        return Err(Error::KTooLarge {
            k: cfg.k,
            rows: x.rows(),
        });
    }
    let mut best: Option<KMeansFit> = None;
    for run in 0..cfg.n_init.max(1) {
        let mut r = rng(derive_seed(seed, &[run as u64]));
        let fit = lloyd(x, cfg, &mut r);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

/// k-means++ seeding.
pub fn plus_plus_init(x: &DataMatrix, k: usize, r: &mut Rng) -> Vec<Vec<f64>> {
    let n = x.rows();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(x.row(r.random_range(0..n)).to_vec());
    let mut d2: Vec<f64> = x.row_iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            r.random_range(0..n)
        } else {
            let target = r.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target {
                    pick = i;
                    break;
                }
            }
            pick
        };
        let c = x.row(next).to_vec();
        for (i, p) in x.row_iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn assign(x: &DataMatrix, centroids: &[Vec<f64>], labels: &mut [usize], d2: &mut [f64]) -> f64 {
    let mut inertia = 0.0;
    for (i, p) in x.row_iter().enumerate() {
        let (mut bj, mut bd) = (0, f64::INFINITY);
        for (j, c) in centroids.iter().enumerate() {
            let d = sq_dist(p, c);
            if d < bd {
                bd = d;
                bj = j;
            }
        }
        labels[i] = bj;
        d2[i] = bd;
        inertia += bd;
    }
    inertia
}

fn lloyd(x: &DataMatrix, cfg: &KMeansConfig, r: &mut Rng) -> KMeansFit {
    let (n, d, k) = (x.rows(), x.cols(), cfg.k);
    let mut centroids = plus_plus_init(x, k, r);
    let mut labels = vec![0usize; n];
    let mut d2 = vec![0.0; n];
    let mut inertia = assign(x, &centroids, &mut labels, &mut d2);
    for _ in 0..cfg.max_iter {
        let mut sums = vec![vec![0.0; d]; k];
        let mut sizes = vec![0usize; k];
        for (i, p) in x.row_iter().enumerate() {
            let c = labels[i];
            sizes[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut taken = vec![false; n];
        for j in 0..k {
            if sizes[j] == 0 {
                // Reseed an empty cluster from the point farthest from its centroid.
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| d2[a].total_cmp(&d2[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                taken[far] = true;
                centroids[j] = x.row(far).to_vec();
                d2[far] = 0.0;
            } else {
                for (c, s) in centroids[j].iter_mut().zip(&sums[j]) {
                    *c = s / sizes[j] as f64;
                }
            }
        }
        let new_inertia = assign(x, &centroids, &mut labels, &mut d2);
        let improvement = inertia - new_inertia;
        inertia = new_inertia;
        if improvement.abs() <= cfg.tol * inertia.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    KMeansFit {
        centroids,
        labels,
        sizes,
        inertia,
    }
}
