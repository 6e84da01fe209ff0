use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ClassLabel, Level};

/// `counts[truth][predicted]`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<Vec<u64>>,
}

/// Two-class counts relative to a chosen positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        ConfusionMatrix {
            n_classes,
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    /// Two-class matrix with Low as the positive class.
    pub fn from_binary(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        let (low, high) = (Level::Low as usize, Level::High as usize);
        let mut cm = ConfusionMatrix::new(2);
        cm.counts[low][low] = tp;
        cm.counts[high][high] = tn;
        cm.counts[high][low] = fp;
        cm.counts[low][high] = fn_;
        cm
    }

    pub fn from_pairs<'a>(
        n_classes: usize,
        pairs: impl IntoIterator<Item = (&'a ClassLabel, &'a ClassLabel)>,
    ) -> Self {
        let mut cm = ConfusionMatrix::new(n_classes);
        for (t, p) in pairs {
            cm.add(t.ordinal(), p.ordinal());
        }
        cm
    }

    pub fn add(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.n_classes).map(|c| self.counts[c][c]).sum()
    }

    pub fn binary(&self, positive: Level) -> BinaryCounts {
        assert_eq!(self.n_classes, 2, "binary counts need a two-class matrix");
        let p = positive as usize;
        let n = 1 - p;
        BinaryCounts {
            tp: self.counts[p][p],
            tn: self.counts[n][n],
            fp: self.counts[n][p],
            fn_: self.counts[p][n],
        }
    }

    /// `correct among true c / count of true c`; `None` for absent classes.
    pub fn per_class_accuracy(&self) -> Vec<Option<f64>> {
        self.counts
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: u64 = row.iter().sum();
                (n > 0).then(|| row[c] as f64 / n as f64)
            })
            .collect()
    }

    /// Unweighted mean of per-class F-scores (each class taken as positive).
    pub fn macro_f_score(&self) -> f64 {
        let k = self.n_classes;
        let sum: f64 = (0..k)
            .map(|c| {
                let tp = self.counts[c][c];
                let fp: u64 = (0..k).filter(|&t| t != c).map(|t| self.counts[t][c]).sum();
                let fn_: u64 = (0..k).filter(|&p| p != c).map(|p| self.counts[c][p]).sum();
                f_from_counts(tp, fp, fn_)
            })
            .sum();
        sum / k as f64
    }
}

/// `(TP + TN) / total`, generalized to `trace / total`.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::validation("accuracy of an empty confusion matrix"));
    }
    Ok(cm.correct() as f64 / total as f64)
}

fn f_from_counts(tp: u64, fp: u64, fn_: u64) -> f64 {
    if tp + fp == 0 || tp + fn_ == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let sensitivity = tp as f64 / (tp + fn_) as f64;
    if precision + sensitivity == 0.0 {
        return 0.0;
    }
    2.0 * precision * sensitivity / (precision + sensitivity)
}

/// Harmonic mean of precision and sensitivity for `positive`; 0 when either
/// denominator vanishes.
pub fn f_score(cm: &ConfusionMatrix, positive: Level) -> f64 {
    let b = cm.binary(positive);
    f_from_counts(b.tp, b.fp, b.fn_)
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}
