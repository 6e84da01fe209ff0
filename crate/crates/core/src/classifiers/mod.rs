//! From-scratch base learners sharing one train/predict contract.
//!
//! Class ordinals drive every tie-break: the lowest ordinal wins a tied vote
//! (Low before High; LALV before LAHV before HALV before HAHV).

pub mod cart;
pub mod codec;
pub mod forest;
pub mod knn;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::model::{ClassLabel, FeatureMatrix, Task};

pub use cart::{CartModel, CartParams, Node};
pub use forest::{ForestModel, ForestParams};
pub use knn::KnnModel;

/// Feature rows with one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<ClassLabel>,
    task: Task,
    ordinals: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Vec<ClassLabel>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::validation(format!(
                "{} labels for {} rows",
                labels.len(),
                features.nrows()
            )));
        }
        let task = labels
            .first()
            .map(|l| l.task())
            .ok_or_else(|| Error::validation("empty dataset"))?;
        if labels.iter().any(|l| l.task() != task) {
            return Err(Error::validation("labels mix tasks"));
        }
        if features.ncols() == 0 {
            return Err(Error::validation("dataset has no feature columns"));
        }
        if let Some(((r, c), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite feature at row {r}, column {c}"
            )));
        }
        let ordinals = labels.iter().map(|l| l.ordinal() as u8).collect();
        Ok(Dataset {
            features,
            labels,
            task,
            ordinals,
        })
    }

    pub fn from_features(features: &FeatureMatrix, labels: Vec<ClassLabel>) -> Result<Self> {
        Dataset::new(features.data().clone(), labels)
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.task.n_classes()
    }

    pub(crate) fn ordinals(&self) -> &[u8] {
        &self.ordinals
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn distinct_classes(&self) -> usize {
        let mut seen = [false; 4];
        for &o in &self.ordinals {
            seen[o as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Rows `indices` (repetition allowed) as a new dataset.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(ndarray::Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            task: self.task,
            ordinals: indices.iter().map(|&i| self.ordinals[i]).collect(),
        }
    }

    /// Same rows with columns reordered by `perm` (new column j = old column perm[j]).
    pub fn permute_columns(&self, perm: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(ndarray::Axis(1), perm),
            ..self.clone()
        }
    }
}

/// A trained model that maps a feature row to a class label.
pub trait Classifier: Send + Sync {
    fn task(&self) -> Task;

    fn n_features(&self) -> usize;

    /// Prediction for a row already checked for dimension.
    fn predict_ordinal(&self, row: &[f64]) -> usize;

    fn predict(&self, row: &[f64]) -> Result<ClassLabel> {
        check_dim(self.n_features(), row.len())?;
        ClassLabel::from_ordinal(self.task(), self.predict_ordinal(row))
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::validation(format!(
            "row has {actual} features, model expects {expected}"
        )));
    }
    Ok(())
}

/// Index of the largest count; ties go to the smallest index.
pub(crate) fn majority<T: PartialOrd + Copy>(counts: &[T]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;

    #[test]
    fn majority_breaks_ties_low() {
        assert_eq!(majority(&[2, 2]), 0);
        assert_eq!(majority(&[1, 3, 3, 0]), 1);
        assert_eq!(majority(&[0, 0, 0, 1]), 3);
    }

    #[test]
    fn dataset_validation() {
        let low = ClassLabel::level(Task::TwoClassArousal, Level::Low);
        assert!(Dataset::new(Array2::zeros((2, 1)), vec![low]).is_err());
        let mixed = vec![low, ClassLabel::level(Task::TwoClassValence, Level::Low)];
        assert!(Dataset::new(Array2::zeros((2, 1)), mixed).is_err());
        let mut x = Array2::zeros((1, 1));
        x[[0, 0]] = f64::NAN;
        assert!(Dataset::new(x, vec![low]).is_err());
    }
}
