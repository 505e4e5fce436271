//! Per-run metric records and the dataset-by-algorithm rank table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::stats::{mean, median, midranks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    AucRoc,
    AucPr,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::AucRoc => "aucroc",
            Metric::AucPr => "aucpr",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aucroc" => Ok(Metric::AucRoc),
            "aucpr" => Ok(Metric::AucPr),
            _ => Err(Error::InvalidInput(format!("unknown metric `{s}`"))),
        }
    }
}

/// Outcome of one (dataset, setting, repeat, algorithm) run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub dataset: String,
    pub algorithm: String,
    pub setting: String,
    pub repeat: usize,
    pub aucroc: f64,
    pub aucpr: f64,
    pub fit_ms: f64,
    pub score_ms: f64,
}

impl MetricRecord {
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::AucRoc => self.aucroc,
            Metric::AucPr => self.aucpr,
        }
    }
}

/// How repeats of one (dataset, algorithm) cell are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// Sorted dataset ids.
    pub datasets: Vec<String>,
    /// Sorted algorithm ids.
    pub algorithms: Vec<String>,
    /// `values[i][j]`: aggregated metric of algorithm `j` on dataset `i`.
    pub values: Vec<Vec<f64>>,
    /// `ranks[i][j]`: rank of algorithm `j` on dataset `i`, 1 = best.
    pub ranks: Vec<Vec<f64>>,
}

impl RankTable {
    /// Builds ranks from an already aggregated dataset-by-algorithm table.
    pub fn from_values(datasets: Vec<String>, algorithms: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != datasets.len() || values.iter().any(|r| r.len() != algorithms.len()) {
            return Err(Error::InvalidInput("value table shape disagrees with labels".into()));
        }
        let ranks = values
            .iter()
            .map(|row| midranks(&row.iter().map(|v| -v).collect::<Vec<_>>()))
            .collect();
        Ok(Self {
            datasets,
            algorithms,
            values,
            ranks,
        })
    }

    pub fn n_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn n_algorithms(&self) -> usize {
        self.algorithms.len()
    }

    /// Average rank per algorithm across datasets.
    pub fn mean_ranks(&self) -> Vec<f64> {
        (0..self.n_algorithms())
            .map(|j| self.ranks.iter().map(|r| r[j]).sum::<f64>() / self.n_datasets() as f64)
            .collect()
    }

    /// Metric column of algorithm `j` across datasets.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }
}

/// Ranks algorithms per dataset on `metric`; records must come from one setting.
pub fn rank_matrix(records: &[MetricRecord], metric: Metric, agg: Aggregation) -> Result<RankTable> {
    let settings: BTreeSet<&str> = records.iter().map(|r| r.setting.as_str()).collect();
    if settings.len() > 1 {
        return Err(Error::InvalidInput(format!(
            "rank table needs a single setting, found {}",
            settings.len()
        )));
    }
    let mut cells: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for r in records {
        cells
            .entry((&r.dataset, &r.algorithm))
            .or_default()
            .push(r.metric(metric));
    }
    let datasets: Vec<String> = records
        .iter()
        .map(|r| r.dataset.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let algorithms: Vec<String> = records
        .iter()
        .map(|r| r.algorithm.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut values = Vec::with_capacity(datasets.len());
    for d in &datasets {
        let mut row = Vec::with_capacity(algorithms.len());
        for a in &algorithms {
            let v = cells.get(&(d.as_str(), a.as_str())).ok_or_else(|| Error::MissingCell {
                dataset: d.clone(),
                algorithm: a.clone(),
            })?;
            row.push(match agg {
                Aggregation::Mean => mean(v),
                Aggregation::Median => median(v),
            });
        }
        values.push(row);
    }
    RankTable::from_values(datasets, algorithms, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(dataset: &str, algorithm: &str, repeat: usize, aucroc: f64) -> MetricRecord {
        MetricRecord {
            dataset: dataset.into(),
            algorithm: algorithm.into(),
            setting: "unsup".into(),
            repeat,
            aucroc,
            aucpr: aucroc / 2.0,
            fit_ms: 0.0,
            score_ms: 0.0,
        }
    }

    fn single(values: &[f64]) -> RankTable {
        let recs: Vec<MetricRecord> = values
            .iter()
            .enumerate()
            .map(|(j, &v)| record("d", &format!("a{j}"), 0, v))
            .collect();
        rank_matrix(&recs, Metric::AucRoc, Aggregation::Mean).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(single(&[0.9, 0.8, 0.7]).ranks[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(single(&[0.9, 0.9, 0.7]).ranks[0], vec![1.5, 1.5, 3.0]);
        assert_eq!(single(&[0.5; 4]).ranks[0], vec![2.5; 4]);
    }

    #[test]
    fn repeats_are_averaged_and_rank_sums_fixed() {
        let mut recs = Vec::new();
        for (d, vals) in [("x", [0.6, 0.9, 0.7, 0.7]), ("y", [0.5, 0.55, 0.9, 0.1])] {
            for (j, v) in vals.iter().enumerate() {
                recs.push(record(d, &format!("a{j}"), 0, *v));
                recs.push(record(d, &format!("a{j}"), 1, v - 0.1 * j as f64));
            }
        }
        let t = rank_matrix(&recs, Metric::AucRoc, Aggregation::Mean).unwrap();
        assert!((t.values[0][1] - 0.85).abs() < 1e-12);
        for r in &t.ranks {
            assert!((r.iter().sum::<f64>() - 10.0).abs() < 1e-9);
        }
        let med = rank_matrix(&recs, Metric::AucRoc, Aggregation::Median).unwrap();
        assert_eq!(med.values, t.values);
    }

    #[test]
    fn missing_cell() {
        let recs = vec![
            record("x", "a", 0, 0.5),
            record("y", "b", 0, 0.5),
            record("x", "b", 0, 0.5),
        ];
        assert_eq!(
            rank_matrix(&recs, Metric::AucRoc, Aggregation::Mean).unwrap_err(),
            Error::MissingCell {
                dataset: "y".into(),
                algorithm: "a".into()
            }
        );
    }
}
