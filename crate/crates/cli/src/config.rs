//! Run configuration: a flat `key = value` document.
//!
//! Lines starting with `#` and blank lines are ignored. Values are applied in
//! the order defaults, config file, `EMOBAND_*` environment variables, then
//! command-line flags.

use std::path::PathBuf;

use emoband::evaluation::{ClassifierChoice, SplitMode};
use emoband::hjorth::ComplexityForm;
use emoband::model::{Band, SignalKind, Task};
use emoband::{Error, Result};

pub const KEYS: [&str; 15] = [
    "data_dir",
    "labels",
    "task",
    "signals",
    "classifier",
    "bands",
    "window_seconds",
    "filter_order",
    "cv_folds",
    "threshold",
    "seed",
    "complexity",
    "split",
    "knn_k",
    "forest_trees",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub task: Task,
    /// Always contains EEG; kept in EEG, EOG, EMG order.
    pub signals: Vec<SignalKind>,
    pub classifier: ClassifierChoice,
    pub bands: Vec<Band>,
    pub window_seconds: f64,
    pub filter_order: usize,
    pub cv_folds: usize,
    pub threshold: f64,
    pub seed: Option<u64>,
    pub complexity: ComplexityForm,
    pub split: SplitMode,
    pub knn_k: usize,
    pub forest_trees: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: None,
            labels: None,
            task: Task::TwoClassArousal,
            signals: vec![SignalKind::Eeg],
            classifier: ClassifierChoice::Ens,
            bands: Band::canonical().to_vec(),
            window_seconds: 10.0,
            filter_order: emoband::filterbank::DEFAULT_ORDER,
            cv_folds: 10,
            threshold: 5.0,
            seed: None,
            complexity: ComplexityForm::Paper,
            split: SplitMode::Trial,
            knn_k: emoband::classifiers::knn::DEFAULT_K,
            forest_trees: 100,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Validation(format!("{key}: cannot parse {value:?}")))
}

/// Parses `EEG+EOG` (or comma-separated); the result is sorted and must contain EEG.
pub fn parse_signals(value: &str) -> Result<Vec<SignalKind>> {
    let mut kinds = value
        .split(['+', ','])
        .map(str::parse)
        .collect::<Result<Vec<SignalKind>>>()?;
    kinds.sort();
    kinds.dedup();
    if !kinds.contains(&SignalKind::Eeg) {
        return Err(Error::Validation(format!(
            "signals {value:?} must include EEG"
        )));
    }
    Ok(kinds)
}

pub fn signals_label(kinds: &[SignalKind]) -> String {
    kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join("+")
}

/// The four combinations EEG, EEG+EOG, EEG+EMG, EEG+EOG+EMG.
pub fn signal_combinations() -> Vec<Vec<SignalKind>> {
    use SignalKind::*;
    vec![
        vec![Eeg],
        vec![Eeg, Eog],
        vec![Eeg, Emg],
        vec![Eeg, Eog, Emg],
    ]
}

fn band_text(b: &Band) -> String {
    format!("{}:{}-{}", b.name.as_str(), b.low_hz, b.high_hz)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "data_dir" => self.data_dir = Some(PathBuf::from(value)),
            "labels" => self.labels = Some(PathBuf::from(value)),
            "task" => self.task = value.parse()?,
            "signals" => self.signals = parse_signals(value)?,
            "classifier" => self.classifier = value.parse()?,
            "bands" => {
                self.bands = value
                    .split(',')
                    .map(|b| b.trim().parse())
                    .collect::<Result<_>>()?;
            }
            "window_seconds" => self.window_seconds = num(key, value)?,
            "filter_order" => self.filter_order = num(key, value)?,
            "cv_folds" => self.cv_folds = num(key, value)?,
            "threshold" => self.threshold = num(key, value)?,
            "seed" => self.seed = Some(num(key, value)?),
            "complexity" => self.complexity = value.parse()?,
            "split" => self.split = value.parse()?,
            "knn_k" => self.knn_k = num(key, value)?,
            "forest_trees" => self.forest_trees = num(key, value)?,
            _ => {
                return Err(Error::Validation(format!(
                    "unknown config key {key:?} (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Validation(format!("config line {}: expected key = value", i + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| Error::Validation(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if !self.signals.contains(&SignalKind::Eeg) {
            return bad("signals must include EEG".into());
        }
        if self.bands.is_empty() {
            return bad("at least one band is required".into());
        }
        if !(self.window_seconds.is_finite() && self.window_seconds > 0.0) {
            return bad(format!(
                "window_seconds {} must be > 0",
                self.window_seconds
            ));
        }
        if !(1..=32).contains(&self.filter_order) {
            return bad(format!(
                "filter_order {} must be in 1..=32",
                self.filter_order
            ));
        }
        if self.cv_folds < 2 {
            return bad(format!("cv_folds {} must be >= 2", self.cv_folds));
        }
        if !(self.threshold > 1.0 && self.threshold < 9.0) {
            return bad(format!("threshold {} must be in (1, 9)", self.threshold));
        }
        if self.knn_k == 0 {
            return bad("knn_k must be >= 1".into());
        }
        if self.forest_trees == 0 {
            return bad("forest_trees must be >= 1".into());
        }
        Ok(())
    }

    /// Every key with its resolved value; `apply_text` on the result
    /// reproduces this config.
    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut lines = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                lines.push(format!("{k} = {v}"));
            }
        };
        push("data_dir", path(&self.data_dir));
        push("labels", path(&self.labels));
        push("task", Some(self.task.as_str().into()));
        push("signals", Some(signals_label(&self.signals)));
        push(
            "classifier",
            Some(self.classifier.as_str().to_ascii_lowercase()),
        );
        push(
            "bands",
            Some(
                self.bands
                    .iter()
                    .map(band_text)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        );
        push("window_seconds", Some(self.window_seconds.to_string()));
        push("filter_order", Some(self.filter_order.to_string()));
        push("cv_folds", Some(self.cv_folds.to_string()));
        push("threshold", Some(self.threshold.to_string()));
        push("seed", self.seed.map(|s| s.to_string()));
        push("complexity", Some(self.complexity.as_str().into()));
        push(
            "split",
            Some(match self.split {
                SplitMode::Trial => "trial".into(),
                SplitMode::Subject => "subject".into(),
            }),
        );
        push("knn_k", Some(self.knn_k.to_string()));
        push("forest_trees", Some(self.forest_trees.to_string()));
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::Validation(
                "a seed is required (--seed, EMOBAND_SEED or `seed =` in the config)".into(),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\ntask = quadrant4\nsignals = EEG+EMG\nseed = 7\nbands = beta:13-30\ndata_dir = /tmp/x\n")
            .unwrap();
        let mut d = RunConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
        assert_eq!(d.signals, vec![SignalKind::Eeg, SignalKind::Emg]);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("nonsense").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.set("signals", "EOG").is_err());
        assert!(c.set("cv_folds", "ten").is_err());
        c.set("threshold", "9").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn combinations_are_the_four_cells() {
        let labels: Vec<String> = signal_combinations()
            .iter()
            .map(|c| signals_label(c))
            .collect();
        assert_eq!(labels, ["EEG", "EEG+EOG", "EEG+EMG", "EEG+EOG+EMG"]);
    }
}
