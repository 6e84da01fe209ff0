//! The k-fold experiment: fold assignment, per-fold training and pooled metrics.
//!
//! Fold `f` trains with seed `derive(seed, [0xF0, f]).key()`; fold assignment
//! uses `seed` directly, so runs that share a seed share folds.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::cv::{fold_hash, stratified_kfold, subject_kfold, Fold};
use super::metrics::{accuracy, f_score, population_std, ConfusionMatrix};
use crate::classifiers::{CartModel, Classifier, Dataset, ForestModel, ForestParams, KnnModel};
use crate::ensemble::{EnsembleConfig, TrainedEnsemble, VoteTrace};
use crate::error::{Error, Result};
use crate::model::{ClassLabel, Level, Task};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClassifierChoice {
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "CART")]
    Cart,
    #[serde(rename = "RF")]
    Rf,
    #[serde(rename = "ENS")]
    Ens,
}

impl ClassifierChoice {
    pub const ALL: [ClassifierChoice; 4] = [
        ClassifierChoice::Knn,
        ClassifierChoice::Cart,
        ClassifierChoice::Rf,
        ClassifierChoice::Ens,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierChoice::Knn => "KNN",
            ClassifierChoice::Cart => "CART",
            ClassifierChoice::Rf => "RF",
            ClassifierChoice::Ens => "ENS",
        }
    }
}

impl fmt::Display for ClassifierChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(ClassifierChoice::Knn),
            "cart" => Ok(ClassifierChoice::Cart),
            "rf" | "forest" => Ok(ClassifierChoice::Rf),
            "ens" | "ensemble" => Ok(ClassifierChoice::Ens),
            _ => Err(Error::validation(format!(
                "unknown classifier {s:?} (expected knn, cart, rf or ens)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Stratified over trials; subjects appear in both train and test sets.
    Trial,
    /// Whole subjects held out per fold.
    Subject,
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trial" => Ok(SplitMode::Trial),
            "subject" => Ok(SplitMode::Subject),
            _ => Err(Error::validation(format!(
                "unknown split {s:?} (expected trial or subject)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvConfig {
    pub folds: usize,
    pub split: SplitMode,
    /// Positive class for the two-class F-score.
    pub positive: Level,
    pub macro_f: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            split: SplitMode::Trial,
            positive: Level::Low,
            macro_f: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub row: usize,
    pub fold: usize,
    pub truth: ClassLabel,
    pub predicted: ClassLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub votes: Option<VoteTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub task: Task,
    pub classifier: ClassifierChoice,
    pub seed: u64,
    pub n_rows: usize,
    pub n_features: usize,
    pub fold_hash: String,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// Pooled over all folds; two-class tasks only.
    pub f_score: Option<f64>,
    pub macro_f_score: Option<f64>,
    /// Pooled per-class accuracy; four-class task only.
    pub per_class_accuracy: Option<Vec<Option<f64>>>,
    pub confusion: ConfusionMatrix,
    pub fold_confusions: Vec<ConfusionMatrix>,
    pub predictions: Vec<Prediction>,
}

impl EvaluationReport {
    /// `ACC ± STD` in percent, plus the F-score when defined.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{:>4}  acc {:6.2}% ± {:5.2}%",
            self.classifier.as_str(),
            100.0 * self.mean_accuracy,
            100.0 * self.std_accuracy
        );
        if let Some(f) = self.f_score {
            s.push_str(&format!("  F {:.4}", f));
        }
        if let Some(pc) = &self.per_class_accuracy {
            let names = self.task.class_names();
            for (name, acc) in names.iter().zip(pc) {
                match acc {
                    Some(a) => s.push_str(&format!("  {name} {:.2}%", 100.0 * a)),
                    None => s.push_str(&format!("  {name} n/a")),
                }
            }
        }
        s
    }
}

/// Folds for `dataset` under `cv`; `subjects` is required for subject splits.
pub fn make_folds(
    dataset: &Dataset,
    subjects: Option<&[u16]>,
    cv: &CvConfig,
    seed: u64,
) -> Result<Vec<Fold>> {
    match cv.split {
        SplitMode::Trial => {
            let ordinals: Vec<usize> = dataset.labels().iter().map(|l| l.ordinal()).collect();
            stratified_kfold(&ordinals, cv.folds, seed)
        }
        SplitMode::Subject => {
            let subjects =
                subjects.ok_or_else(|| Error::validation("subject split needs subject ids"))?;
            if subjects.len() != dataset.n_rows() {
                return Err(Error::validation(format!(
                    "{} subject ids for {} rows",
                    subjects.len(),
                    dataset.n_rows()
                )));
            }
            subject_kfold(subjects, cv.folds, seed)
        }
    }
}

pub fn run_experiment(
    dataset: &Dataset,
    subjects: Option<&[u16]>,
    classifier: ClassifierChoice,
    cv: &CvConfig,
    config: &EnsembleConfig,
    seed: u64,
) -> Result<EvaluationReport> {
    let folds = make_folds(dataset, subjects, cv, seed)?;
    run_with_folds(dataset, &folds, classifier, cv, config, seed)
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    Stream::derive(seed, &[0xF0, fold as u64]).key()
}

fn run_fold(
    dataset: &Dataset,
    fold: &Fold,
    classifier: ClassifierChoice,
    config: &EnsembleConfig,
    seed: u64,
) -> Result<Vec<(ClassLabel, Option<VoteTrace>)>> {
    if fold.test.is_empty() {
        return Err(Error::validation("fold has no test rows"));
    }
    let row = |i: usize| dataset.row(i).to_vec();
    let predict_all = |model: &dyn Classifier| -> Result<Vec<(ClassLabel, Option<VoteTrace>)>> {
        fold.test
            .iter()
            .map(|&i| Ok((model.predict(&row(i))?, None)))
            .collect()
    };
    match classifier {
        ClassifierChoice::Knn => {
            predict_all(&KnnModel::train_rows(dataset, &fold.train, config.knn_k)?)
        }
        ClassifierChoice::Cart => {
            predict_all(&CartModel::train_rows(dataset, &fold.train, config.cart)?)
        }
        ClassifierChoice::Rf => {
            let params = ForestParams {
                seed,
                ..config.forest
            };
            predict_all(&ForestModel::train_rows(dataset, &fold.train, params)?)
        }
        ClassifierChoice::Ens => {
            let model = TrainedEnsemble::train(&dataset.subset(&fold.train), config, seed)?;
            fold.test
                .iter()
                .map(|&i| model.predict_traced(&row(i)).map(|(l, t)| (l, Some(t))))
                .collect()
        }
    }
}

/// Runs every fold (in parallel) and pools the results.
pub fn run_with_folds(
    dataset: &Dataset,
    folds: &[Fold],
    classifier: ClassifierChoice,
    cv: &CvConfig,
    config: &EnsembleConfig,
    seed: u64,
) -> Result<EvaluationReport> {
    if folds.len() < 2 {
        return Err(Error::validation("need at least two folds"));
    }
    if let Some(&bad) = folds
        .iter()
        .flat_map(|f| f.train.iter().chain(&f.test))
        .find(|&&i| i >= dataset.n_rows())
    {
        return Err(Error::validation(format!("fold index {bad} out of range")));
    }
    let outputs: Vec<Vec<(ClassLabel, Option<VoteTrace>)>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            run_fold(dataset, fold, classifier, config, fold_seed(seed, f)).map_err(|e| {
                Error::InFold {
                    fold: f,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<_>>()?;

    let task = dataset.task();
    let k = task.n_classes();
    let mut confusion = ConfusionMatrix::new(k);
    let mut fold_confusions = Vec::with_capacity(folds.len());
    let mut fold_accuracies = Vec::with_capacity(folds.len());
    let mut predictions = Vec::with_capacity(dataset.n_rows());
    for (f, (fold, out)) in folds.iter().zip(&outputs).enumerate() {
        let mut cm = ConfusionMatrix::new(k);
        for (&i, &(predicted, votes)) in fold.test.iter().zip(out) {
            let truth = dataset.labels()[i];
            cm.add(truth.ordinal(), predicted.ordinal());
            predictions.push(Prediction {
                row: i,
                fold: f,
                truth,
                predicted,
                votes,
            });
        }
        fold_accuracies.push(accuracy(&cm)?);
        confusion.merge(&cm);
        fold_confusions.push(cm);
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
    Ok(EvaluationReport {
        task,
        classifier,
        seed,
        n_rows: dataset.n_rows(),
        n_features: dataset.n_features(),
        fold_hash: fold_hash(folds),
        std_accuracy: population_std(&fold_accuracies),
        mean_accuracy,
        fold_accuracies,
        f_score: (k == 2).then(|| f_score(&confusion, cv.positive)),
        macro_f_score: cv.macro_f.then(|| confusion.macro_f_score()),
        per_class_accuracy: (k == 4).then(|| confusion.per_class_accuracy()),
        confusion,
        fold_confusions,
        predictions,
    })
}

/// The same rows with labels shuffled (a chance-level control).
pub fn permute_labels(dataset: &Dataset, seed: u64) -> Dataset {
    let mut labels = dataset.labels().to_vec();
    Stream::new(seed).shuffle(&mut labels);
    Dataset::new(dataset.features().clone(), labels).expect("same shape as a valid dataset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn blobs(n: usize, seed: u64) -> Dataset {
        let mut s = Stream::new(seed);
        let mut x = Array2::zeros((n, 3));
        let mut labels = Vec::new();
        for i in 0..n {
            let level = if i % 2 == 0 { Level::Low } else { Level::High };
            let shift = if level == Level::High { 3.0 } else { 0.0 };
            for j in 0..3 {
                x[[i, j]] = s.normal() + shift;
            }
            labels.push(ClassLabel::level(Task::TwoClassArousal, level));
        }
        Dataset::new(x, labels).unwrap()
    }

    fn small_config() -> EnsembleConfig {
        EnsembleConfig {
            forest: ForestParams {
                n_trees: 15,
                ..ForestParams::default()
            },
            ..EnsembleConfig::default()
        }
    }

    #[test]
    fn separable_data_scores_high_for_every_classifier() {
        let d = blobs(80, 3);
        let cv = CvConfig {
            folds: 5,
            ..CvConfig::default()
        };
        for c in ClassifierChoice::ALL {
            let r = run_experiment(&d, None, c, &cv, &small_config(), 11).unwrap();
            assert!(r.mean_accuracy > 0.9, "{c}: {}", r.mean_accuracy);
            assert_eq!(r.fold_accuracies.len(), 5);
            assert_eq!(r.predictions.len(), 80);
            assert_eq!(r.confusion.total(), 80);
            assert!(r.f_score.is_some() && r.per_class_accuracy.is_none());
            assert_eq!(
                r.predictions.iter().any(|p| p.votes.is_some()),
                c == ClassifierChoice::Ens
            );
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let d = blobs(60, 5);
        let cv = CvConfig {
            folds: 4,
            ..CvConfig::default()
        };
        let a = run_experiment(&d, None, ClassifierChoice::Ens, &cv, &small_config(), 9).unwrap();
        let b = run_experiment(&d, None, ClassifierChoice::Ens, &cv, &small_config(), 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fold_errors_carry_the_fold_index() {
        let d = blobs(20, 1);
        let cv = CvConfig {
            folds: 2,
            ..CvConfig::default()
        };
        // k larger than any training set.
        let config = EnsembleConfig {
            knn_k: 50,
            ..small_config()
        };
        let err = run_experiment(&d, None, ClassifierChoice::Knn, &cv, &config, 0).unwrap_err();
        assert!(matches!(err, Error::InFold { .. }));
        assert!(err.root().is_validation());
    }

    #[test]
    fn subject_split_requires_ids() {
        let d = blobs(20, 1);
        let cv = CvConfig {
            folds: 2,
            split: SplitMode::Subject,
            ..CvConfig::default()
        };
        assert!(run_experiment(&d, None, ClassifierChoice::Cart, &cv, &small_config(), 0).is_err());
        let subjects: Vec<u16> = (0..20).map(|i| (i % 4) as u16 + 1).collect();
        let r = run_experiment(
            &d,
            Some(&subjects),
            ClassifierChoice::Cart,
            &cv,
            &small_config(),
            0,
        )
        .unwrap();
        assert_eq!(r.predictions.len(), 20);
    }

    #[test]
    fn permuted_labels_keep_class_counts() {
        let d = blobs(30, 2);
        let p = permute_labels(&d, 4);
        let count = |ds: &Dataset| ds.labels().iter().filter(|l| l.ordinal() == 0).count();
        assert_eq!(count(&d), count(&p));
        assert_ne!(d.labels(), p.labels());
    }
}
