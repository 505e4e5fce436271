//! Friedman omnibus test, Wilcoxon signed-rank test and Holm's step-down
//! adjustment.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::midranks;

use super::ranks::RankTable;

/// Largest effective sample size evaluated exactly.
pub const EXACT_MAX_N: usize = 20;

/// `(statistic, p_value)` of the Friedman chi-squared test.
pub fn friedman_test(table: &RankTable) -> Result<(f64, f64)> {
    let (n, k) = (table.n_datasets(), table.n_algorithms());
    if n < 2 || k < 2 {
        return Err(Error::DegenerateTable {
            datasets: n,
            algorithms: k,
        });
    }
    let (nf, kf) = (n as f64, k as f64);
    let sum_sq: f64 = table.mean_ranks().iter().map(|r| r * r).sum();
    let stat = (12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    let chi = ChiSquared::new(kf - 1.0).expect("k >= 2");
    Ok((stat, chi.sf(stat).clamp(0.0, 1.0)))
}

/// Non-zero paired differences.
fn differences(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(Error::TooFewPairs {
            needed: 3,
            got: a.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect())
}

/// Midranks of `|d|` and the positive-rank sum.
fn signed_ranks(d: &[f64]) -> (Vec<f64>, f64) {
    let ranks = midranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let t_plus = ranks.iter().zip(d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    (ranks, t_plus)
}

/// Two-sided exact p over all `2^n` sign patterns (by dynamic programming on
/// doubled ranks, which are integers even with midranks).
pub fn wilcoxon_exact_p(d: &[f64]) -> f64 {
    if d.is_empty() {
        return 1.0;
    }
    let (ranks, t_plus) = signed_ranks(d);
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let t = (2.0 * t_plus).round() as usize;
    let all: f64 = counts.iter().sum();
    let lower: f64 = counts[..=t].iter().sum::<f64>() / all;
    let upper: f64 = counts[t..].iter().sum::<f64>() / all;
    (2.0 * lower.min(upper)).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
pub fn wilcoxon_normal_p(d: &[f64]) -> f64 {
    if d.is_empty() {
        return 1.0;
    }
    let (ranks, t_plus) = signed_ranks(d);
    let n = d.len() as f64;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let mean = n * (n + 1.0) / 4.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((t_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    (2.0 * Normal::standard().sf(z)).min(1.0)
}

/// Two-sided Wilcoxon signed-rank p-value; zero differences are dropped.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    let d = differences(a, b)?;
    Ok(if d.len() <= EXACT_MAX_N {
        wilcoxon_exact_p(&d)
    } else {
        wilcoxon_normal_p(&d)
    })
}

/// Holm step-down adjusted p-values, in input order.
pub fn holm_adjust(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut out = vec![0.0; m];
    let mut running = 0.0f64;
    for (i, &idx) in order.iter().enumerate() {
        running = running.max(((m - i) as f64 * p[idx]).min(1.0));
        out[idx] = running;
    }
    out
}
