//! Dense feature matrices, label vectors and score vectors.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards, so they can be shared freely between threads.

use std::ops::Index;

use crate::error::{Error, Result};

/// Dense row-major `rows x cols` matrix of finite features.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(n * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(n, d, values)
    }

    /// Single-feature matrix from a column of values.
    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(n, 1, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    /// Feature column `k`, exactly `rows` values.
    pub fn column(&self, k: usize) -> Vec<f64> {
        assert!(k < self.cols, "column {k} out of range");
        (0..self.rows).map(|i| self.values[i * self.cols + k]).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self::new(idx.len(), self.cols, values)
    }

    /// Column-wise concatenation `[self | other]`.
    pub fn hstack(&self, other: &DataMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut values = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            values.extend_from_slice(self.row(i));
            values.extend_from_slice(other.row(i));
        }
        Self::new(self.rows, cols, values)
    }

    /// Row-wise concatenation.
    pub fn vstack(&self, other: &DataMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        Self::new(self.rows + other.rows, self.cols, values)
    }

    /// Appends columns given column-major.
    pub fn with_columns(&self, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return Ok(self.clone());
        }
        for c in columns {
            if c.len() != self.rows {
                return Err(Error::LengthMismatch {
                    expected: self.rows,
                    found: c.len(),
                });
            }
        }
        let cols = self.cols + columns.len();
        let mut values = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            values.extend_from_slice(self.row(i));
            values.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(self.rows, cols, values)
    }

    /// Applies `f(column, value)` elementwise.
    pub fn map_columns(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let cols = self.cols;
        let values = self.values.iter().enumerate().map(|(p, &v)| f(p % cols, v)).collect();
        Self::new(self.rows, cols, values)
    }

    /// Reorders columns so that output column `j` is input column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: perm.len(),
            });
        }
        let mut values = Vec::with_capacity(self.values.len());
        for r in self.row_iter() {
            values.extend(perm.iter().map(|&j| r[j]));
        }
        Self::new(self.rows, self.cols, values)
    }
}

/// Binary ground truth, `0` = normal, `1` = anomaly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector(Vec<u8>);

impl LabelVector {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(index) = labels.iter().position(|&l| l > 1) {
            return Err(Error::LabelDomain {
                index,
                value: i64::from(labels[index]),
            });
        }
        Ok(Self(labels))
    }

    /// Accepts arbitrary integers and rejects anything outside `{0, 1}`.
    pub fn from_ints(labels: &[i64]) -> Result<Self> {
        labels
            .iter()
            .enumerate()
            .map(|(index, &value)| match value {
                0 => Ok(0),
                1 => Ok(1),
                _ => Err(Error::LabelDomain { index, value }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n_anomalies(&self) -> usize {
        self.0.iter().filter(|&&l| l == 1).count()
    }

    pub fn anomaly_ratio(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.n_anomalies() as f64 / self.0.len() as f64
        }
    }

    pub fn is_anomaly(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn indices_of(&self, class: u8) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self(idx.iter().map(|&i| self.0[i]).collect())
    }

    pub fn concat(&self, other: &LabelVector) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn has_both_classes(&self) -> bool {
        let a = self.n_anomalies();
        a > 0 && a < self.0.len()
    }
}

impl Index<usize> for LabelVector {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

/// Which training labels are revealed to a detector.
///
/// Only anomalies can be revealed; every other sample is presented as
/// unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    revealed: Vec<bool>,
}

impl LabelMask {
    pub fn new(revealed: Vec<bool>, labels: &LabelVector) -> Result<Self> {
        if revealed.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                found: revealed.len(),
            });
        }
        if let Some(index) = revealed
            .iter()
            .enumerate()
            .position(|(i, &r)| r && !labels.is_anomaly(i))
        {
            return Err(Error::MaskNotAnomaly { index });
        }
        Ok(Self { revealed })
    }

    /// Reveals every anomaly.
    pub fn all_anomalies(labels: &LabelVector) -> Self {
        Self {
            revealed: labels.as_slice().iter().map(|&l| l == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.revealed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.revealed.is_empty()
    }

    pub fn is_revealed(&self, i: usize) -> bool {
        self.revealed[i]
    }

    pub fn n_revealed(&self) -> usize {
        self.revealed.iter().filter(|&&r| r).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.revealed
    }

    /// Labels a detector trains on: known anomalies are 1, everything else 0.
    pub fn effective_labels(&self) -> LabelVector {
        LabelVector(self.revealed.iter().map(|&r| u8::from(r)).collect())
    }
}

/// Per-sample anomaly scores; higher means more outlying.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(row) = scores.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row, col: 0 });
        }
        Ok(Self(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Index<usize> for ScoreVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A feature matrix paired with matching labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DataMatrix,
    pub y: LabelVector,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.x.rows()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        Ok(Self {
            x: self.x.select_rows(idx)?,
            y: self.y.select(idx),
        })
    }

    /// Rows whose label is 0.
    pub fn normal_rows(&self) -> Result<DataMatrix> {
        let idx = self.y.indices_of(0);
        if idx.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        self.x.select_rows(&idx)
    }
}

/// Checks the pair and returns it unchanged.
pub fn validate_dataset(x: DataMatrix, y: LabelVector) -> Result<Dataset> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if let Some(pos) = x.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            row: pos / x.cols(),
            col: pos % x.cols(),
        });
    }
    if let Some(index) = y.as_slice().iter().position(|&l| l > 1) {
        return Err(Error::LabelDomain {
            index,
            value: i64::from(y[index]),
        });
    }
    Ok(Dataset { x, y })
}
