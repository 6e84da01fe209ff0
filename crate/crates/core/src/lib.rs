//! Emotion classification from multichannel physiological recordings.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`filterbank`] designs order-N Butterworth band-pass filters (theta, alpha,
//!    beta, gamma) and applies them forward-backward to every channel.
//! 2. [`hjorth`] cuts each filtered channel into fixed windows and computes the
//!    Hjorth Activity, Mobility and Complexity of each window.
//! 3. [`classifiers`] and [`ensemble`] provide KNN, CART and random-forest base
//!    learners and a three-member bagging ensemble combined by majority vote.
//! 4. [`evaluation`] runs stratified cross-validation and produces accuracy,
//!    F-score and per-class reports.
//!
//! [`ingestion`] holds the PSR1 recording format, the ratings CSV and a
//! synthetic corpus generator so the whole pipeline runs without external data.

pub mod classifiers;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod filterbank;
pub mod hjorth;
pub mod ingestion;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
