//! Experiment runner for the emoband pipeline.

pub mod commands;
pub mod config;
