//! k-nearest neighbours on z-scored features.

use ndarray::Array2;

use super::{check_dim, majority, Classifier, Dataset};
use crate::error::{Error, Result};
use crate::model::{ClassLabel, Task};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub(crate) k: usize,
    pub(crate) task: Task,
    pub(crate) means: Vec<f64>,
    /// `1 / std` per column, 0 for constant columns.
    pub(crate) inv_std: Vec<f64>,
    /// Standardized training rows.
    pub(crate) rows: Array2<f64>,
    pub(crate) labels: Vec<u8>,
}

impl KnnModel {
    pub fn train(data: &Dataset, k: usize) -> Result<Self> {
        let all: Vec<usize> = (0..data.n_rows()).collect();
        Self::train_rows(data, &all, k)
    }

    /// Train on `rows` of `data` (repetition allowed), e.g. a bootstrap replicate.
    pub fn train_rows(data: &Dataset, rows: &[usize], k: usize) -> Result<Self> {
        if k == 0 || k > rows.len() {
            return Err(Error::validation(format!(
                "k = {k} must be in 1..={} (training rows)",
                rows.len()
            )));
        }
        let d = data.n_features();
        let n = rows.len() as f64;
        let x = data.features();
        let mut means = vec![0.0; d];
        for &r in rows {
            for (m, v) in means.iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for &r in rows {
            for ((s, v), m) in var.iter_mut().zip(x.row(r)).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let inv_std: Vec<f64> = var
            .iter()
            .map(|&s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    1.0 / sd
                } else {
                    0.0
                }
            })
            .collect();
        let mut z = Array2::zeros((rows.len(), d));
        for (i, &r) in rows.iter().enumerate() {
            for j in 0..d {
                z[[i, j]] = (x[[r, j]] - means[j]) * inv_std[j];
            }
        }
        Ok(KnnModel {
            k,
            task: data.task(),
            means,
            inv_std,
            rows: z,
            labels: rows.iter().map(|&r| data.ordinals()[r]).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_train(&self) -> usize {
        self.labels.len()
    }

    pub fn standardize(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.inv_std)
            .map(|((v, m), s)| (v - m) * s)
            .collect()
    }

    /// The `k` nearest training rows as `(squared distance, row index)`, nearest
    /// first; equal distances resolve to the lower row index.
    pub fn neighbors(&self, row: &[f64]) -> Result<Vec<(f64, usize)>> {
        check_dim(self.means.len(), row.len())?;
        Ok(self.neighbors_unchecked(row))
    }

    fn neighbors_unchecked(&self, row: &[f64]) -> Vec<(f64, usize)> {
        let q = self.standardize(row);
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .outer_iter()
            .enumerate()
            .map(|(i, t)| {
                let d2 = t
                    .iter()
                    .zip(&q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (d2, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, cmp);
            dist.truncate(self.k);
        }
        dist.sort_by(cmp);
        dist
    }

    pub fn predict(&self, row: &[f64]) -> Result<ClassLabel> {
        Classifier::predict(self, row)
    }
}

impl Classifier for KnnModel {
    fn task(&self) -> Task {
        self.task
    }

    fn n_features(&self) -> usize {
        self.means.len()
    }

    fn predict_ordinal(&self, row: &[f64]) -> usize {
        let mut votes = [0usize; 4];
        for (_, i) in self.neighbors_unchecked(row) {
            votes[self.labels[i] as usize] += 1;
        }
        majority(&votes[..self.task.n_classes()])
    }
}
