//! Metrics and the cross-validation protocol.

pub mod cv;
pub mod experiment;
pub mod metrics;

pub use cv::{fold_hash, stratified_kfold, subject_kfold, Fold};
pub use experiment::{
    make_folds, permute_labels, run_experiment, run_with_folds, ClassifierChoice, CvConfig,
    EvaluationReport, Prediction, SplitMode,
};
pub use metrics::{accuracy, f_score, BinaryCounts, ConfusionMatrix};
