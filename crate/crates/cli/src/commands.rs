//! Subcommand implementations.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use emoband::classifiers::{Dataset, ForestParams};
use emoband::ensemble::EnsembleConfig;
use emoband::evaluation::{
    make_folds, run_with_folds, ClassifierChoice, CvConfig, EvaluationReport, Fold,
};
use emoband::filterbank::{ApplyMode, FilterBank};
use emoband::hjorth::{extract_features, WindowSpec};
use emoband::ingestion::{
    generate_synthetic_corpus, read_labels, read_recording, recording_file_name, write_corpus,
    LabelMap, SynthSpec,
};
use emoband::model::{ChannelGroup, ClassLabel, FeatureMatrix, Recording, SignalKind, Task};
use emoband::{Error, Result};

use crate::config::{signal_combinations, signals_label, RunConfig};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn data_dir(cfg: &RunConfig) -> Result<&Path> {
    cfg.data_dir.as_deref().ok_or_else(|| {
        Error::Validation("data_dir is not set (--data-dir or EMOBAND_DATA_DIR)".into())
    })
}

fn labels_path(cfg: &RunConfig) -> Result<PathBuf> {
    Ok(match &cfg.labels {
        Some(p) => p.clone(),
        None => data_dir(cfg)?.join("labels.csv"),
    })
}

/// Recordings and labels in `(subject, trial)` order.
pub struct Corpus {
    pub labels: LabelMap,
    pub recordings: Vec<Recording>,
}

/// Loads every recording named by the labels file. All missing files are
/// reported together before any file is read.
pub fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let dir = data_dir(cfg)?;
    let labels_file = labels_path(cfg)?;
    if !labels_file.is_file() {
        return Err(Error::Data(format!(
            "labels file {} not found (expected a CSV with header subject,trial,valence,arousal)",
            labels_file.display()
        )));
    }
    let labels = read_labels(&labels_file)?;
    if labels.is_empty() {
        return Err(Error::Data(format!(
            "{} lists no trials",
            labels_file.display()
        )));
    }
    let paths: Vec<PathBuf> = labels
        .keys()
        .map(|&(s, t)| dir.join(recording_file_name(s, t)))
        .collect();
    let missing: Vec<String> = paths
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Data(format!(
            "{} of {} recordings missing:\n  {}",
            missing.len(),
            paths.len(),
            missing.join("\n  ")
        )));
    }
    let recordings = paths
        .par_iter()
        .map(|p| read_recording(p))
        .collect::<Result<Vec<_>>>()?;
    for (rec, &(s, t)) in recordings.iter().zip(labels.keys()) {
        if (rec.subject_id(), rec.trial_id()) != (s, t) {
            return Err(Error::Data(format!(
                "{} holds subject {} trial {}",
                recording_file_name(s, t),
                rec.subject_id(),
                rec.trial_id()
            )));
        }
    }
    Ok(Corpus { labels, recordings })
}

/// Features for the union of `kinds` over all recordings.
pub fn compute_features(
    cfg: &RunConfig,
    recordings: &[Recording],
    kinds: &[SignalKind],
) -> Result<FeatureMatrix> {
    let first = recordings
        .first()
        .ok_or_else(|| Error::Data("no recordings".into()))?;
    let groups = kinds
        .iter()
        .map(|&k| ChannelGroup::resolve(k, first.channel_names()))
        .collect::<Result<Vec<_>>>()?;
    let bank = FilterBank::design(
        &cfg.bands,
        cfg.filter_order,
        first.sampling_rate(),
        ApplyMode::ZeroPhase,
    )?;
    let window = WindowSpec::new(cfg.window_seconds, 0.0)?;
    extract_features(recordings, &groups, &bank, &window, cfg.complexity)
}

/// Columns of `features` whose channel belongs to one of `kinds`.
pub fn select_signals(features: &FeatureMatrix, kinds: &[SignalKind]) -> FeatureMatrix {
    features.select_columns(|c| {
        SignalKind::of_channel(&c.channel_name).is_some_and(|k| kinds.contains(&k))
    })
}

fn available_kinds(rec: &Recording) -> BTreeSet<SignalKind> {
    rec.channel_names()
        .iter()
        .filter_map(|n| SignalKind::of_channel(n))
        .collect()
}

pub fn features_csv(keys: &[(u16, u16)], features: &FeatureMatrix) -> String {
    let mut out = String::from("subject,trial");
    for c in features.columns() {
        out.push(',');
        out.push_str(&c.header());
    }
    out.push('\n');
    for (row, &(s, t)) in features.data().outer_iter().zip(keys) {
        write!(out, "{s},{t}").unwrap();
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes `features_<signals>.csv` for every combination the recordings support.
pub fn cmd_extract(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let corpus = load_corpus(cfg)?;
    let available = available_kinds(&corpus.recordings[0]);
    let combos: Vec<Vec<SignalKind>> = signal_combinations()
        .into_iter()
        .filter(|c| c.iter().all(|k| available.contains(k)))
        .collect();
    if combos.is_empty() {
        return Err(Error::Data("recordings contain no EEG channels".into()));
    }
    let all: Vec<SignalKind> = available.into_iter().collect();
    let features = compute_features(cfg, &corpus.recordings, &all)?;
    let keys: Vec<(u16, u16)> = corpus.labels.keys().copied().collect();
    let mut written = Vec::new();
    for combo in combos {
        let path = out.join(format!("features_{}.csv", signals_label(&combo)));
        write_file(
            &path,
            features_csv(&keys, &select_signals(&features, &combo)).as_bytes(),
        )?;
        written.push(path);
    }
    Ok(written)
}

fn ensemble_config(cfg: &RunConfig) -> EnsembleConfig {
    EnsembleConfig {
        knn_k: cfg.knn_k,
        forest: ForestParams {
            n_trees: cfg.forest_trees,
            ..ForestParams::default()
        },
        ..EnsembleConfig::default()
    }
}

fn cv_config(cfg: &RunConfig) -> CvConfig {
    CvConfig {
        folds: cfg.cv_folds,
        split: cfg.split,
        ..CvConfig::default()
    }
}

fn labels_for(cfg: &RunConfig, labels: &LabelMap) -> Result<Vec<ClassLabel>> {
    labels
        .values()
        .map(|r| cfg.task.label(r, cfg.threshold))
        .collect()
}

/// Table header matching [`table_row`].
pub fn table_header(task: Task) -> String {
    match task {
        Task::FourClassQuadrant => format!(
            "{:<12} {:<5} {:>16} {}",
            "signals",
            "clf",
            "overall",
            task.class_names()
                .iter()
                .map(|n| format!("{n:>7}"))
                .collect::<String>()
        ),
        _ => format!(
            "{:<12} {:<5} {:>16} {:>8}",
            "signals", "clf", "accuracy", "F"
        ),
    }
}

/// One results row: accuracy as `mean ± std` in percent, then the F-score
/// (two classes) or per-class accuracies (four classes).
pub fn table_row(signals: &str, r: &EvaluationReport) -> String {
    let acc = format!(
        "{:.2} ± {:.2}",
        100.0 * r.mean_accuracy,
        100.0 * r.std_accuracy
    );
    let mut row = format!("{:<12} {:<5} {:>16}", signals, r.classifier.as_str(), acc);
    if let Some(f) = r.f_score {
        write!(row, " {f:>8.4}").unwrap();
    }
    if let Some(pc) = &r.per_class_accuracy {
        for a in pc {
            match a {
                Some(a) => write!(row, " {:>7.2}", 100.0 * a).unwrap(),
                None => write!(row, " {:>7}", "n/a").unwrap(),
            }
        }
    }
    row
}

#[derive(Serialize)]
struct EvaluateFile<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    signals: String,
    config_text: String,
    report: &'a EvaluationReport,
}

pub struct Evaluated {
    pub report: EvaluationReport,
    pub json_path: PathBuf,
    pub row: String,
}

fn dataset_for(
    cfg: &RunConfig,
    corpus: &Corpus,
    features: &FeatureMatrix,
) -> Result<(Dataset, Vec<u16>)> {
    let data = Dataset::from_features(features, labels_for(cfg, &corpus.labels)?)?;
    let subjects = corpus.labels.keys().map(|k| k.0).collect();
    Ok((data, subjects))
}

/// Runs one (signals, classifier) cell and writes its JSON report.
pub fn cmd_evaluate(cfg: &RunConfig, out: &Path) -> Result<Evaluated> {
    let seed = cfg.require_seed()?;
    let corpus = load_corpus(cfg)?;
    let features = compute_features(cfg, &corpus.recordings, &cfg.signals)?;
    let (data, subjects) = dataset_for(cfg, &corpus, &features)?;
    let cv = cv_config(cfg);
    let folds = make_folds(&data, Some(&subjects), &cv, seed)?;
    let report = run_with_folds(
        &data,
        &folds,
        cfg.classifier,
        &cv,
        &ensemble_config(cfg),
        seed,
    )?;
    let signals = signals_label(&cfg.signals);
    let file = EvaluateFile {
        tool: "emoband",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        signals: signals.clone(),
        config_text: cfg.to_text(),
        report: &report,
    };
    let json_path = out.join(format!(
        "evaluate_{}_{}.json",
        signals,
        cfg.classifier.as_str()
    ));
    write_file(&json_path, &to_json(&file)?)?;
    let row = table_row(&signals, &report);
    Ok(Evaluated {
        report,
        json_path,
        row,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| Error::Computation(format!("json: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Serialize)]
pub struct AblationCell {
    pub signals: String,
    pub classifier: ClassifierChoice,
    pub fold_hash: String,
    pub report: EvaluationReport,
}

#[derive(Serialize)]
struct AblationFile<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config_text: String,
    fold_hash: &'a str,
    folds: &'a [Fold],
    cells: &'a [AblationCell],
}

pub struct Ablation {
    pub cells: Vec<AblationCell>,
    pub fold_hash: String,
    pub json_path: PathBuf,
    pub table_path: PathBuf,
    pub table: String,
}

/// The 4 signal combinations x 4 classifiers grid over one shared fold
/// assignment. Cells run on a pool of `jobs` threads; output does not depend on `jobs`.
pub fn cmd_ablate(cfg: &RunConfig, out: &Path, jobs: usize) -> Result<Ablation> {
    let seed = cfg.require_seed()?;
    if jobs == 0 {
        return Err(Error::Validation("--jobs must be >= 1".into()));
    }
    let corpus = load_corpus(cfg)?;
    let available = available_kinds(&corpus.recordings[0]);
    let combos = signal_combinations();
    if let Some(k) = [SignalKind::Eeg, SignalKind::Eog, SignalKind::Emg]
        .into_iter()
        .find(|k| !available.contains(k))
    {
        return Err(Error::Data(format!(
            "ablation needs {k} channels; the recordings have none"
        )));
    }
    let all = vec![SignalKind::Eeg, SignalKind::Eog, SignalKind::Emg];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Computation(format!("thread pool: {e}")))?;
    let cv = cv_config(cfg);
    let ens = ensemble_config(cfg);
    let (cells, fold_hash, folds) = pool.install(|| -> Result<_> {
        let features = compute_features(cfg, &corpus.recordings, &all)?;
        let datasets = combos
            .iter()
            .map(|c| dataset_for(cfg, &corpus, &select_signals(&features, c)))
            .collect::<Result<Vec<_>>>()?;
        let (d0, subjects) = &datasets[0];
        let folds = make_folds(d0, Some(subjects), &cv, seed)?;
        let fold_hash = emoband::evaluation::fold_hash(&folds);
        let grid: Vec<(usize, ClassifierChoice)> = (0..combos.len())
            .flat_map(|i| ClassifierChoice::ALL.map(|c| (i, c)))
            .collect();
        let cells = grid
            .par_iter()
            .map(|&(i, clf)| {
                let report = run_with_folds(&datasets[i].0, &folds, clf, &cv, &ens, seed)?;
                Ok(AblationCell {
                    signals: signals_label(&combos[i]),
                    classifier: clf,
                    fold_hash: report.fold_hash.clone(),
                    report,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((cells, fold_hash, folds))
    })?;

    let mut table = table_header(cfg.task);
    table.push('\n');
    for c in &cells {
        table.push_str(&table_row(&c.signals, &c.report));
        table.push('\n');
    }
    let file = AblationFile {
        tool: "emoband",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config_text: cfg.to_text(),
        fold_hash: &fold_hash,
        folds: &folds,
        cells: &cells,
    };
    let json_path = out.join("ablation.json");
    let table_path = out.join("ablation.txt");
    write_file(&json_path, &to_json(&file)?)?;
    write_file(&table_path, table.as_bytes())?;
    Ok(Ablation {
        cells,
        fold_hash,
        json_path,
        table_path,
        table,
    })
}

#[derive(Debug)]
pub struct CheckOutcome {
    pub path: PathBuf,
    pub result: std::result::Result<String, String>,
}

fn psr1_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| io_err(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "psr1"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn check_one(path: &Path) -> std::result::Result<String, String> {
    let rec = read_recording(path).map_err(|e| e.to_string())?;
    let (s, t) = (rec.subject_id(), rec.trial_id());
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    let looks_canonical = name.starts_with('s') && name.contains("_t") && name.ends_with(".psr1");
    if looks_canonical && name != recording_file_name(s, t) {
        return Err(format!(
            "file name does not match header (subject {s}, trial {t})"
        ));
    }
    Ok(format!(
        "subject {s}, trial {t}, {} channels x {} samples at {} Hz",
        rec.n_channels(),
        rec.n_samples(),
        rec.sampling_rate()
    ))
}

/// Validates PSR1 files (directories are scanned for `*.psr1`). With a
/// labels file, every labelled trial must have a file.
pub fn cmd_convert_check(paths: &[PathBuf], labels: Option<&Path>) -> Result<Vec<CheckOutcome>> {
    let files = psr1_files(paths)?;
    if files.is_empty() {
        return Err(Error::Validation("no .psr1 files to check".into()));
    }
    let mut outcomes: Vec<CheckOutcome> = files
        .par_iter()
        .map(|p| CheckOutcome {
            path: p.clone(),
            result: check_one(p),
        })
        .collect();
    if let Some(labels) = labels {
        let map = read_labels(labels)?;
        let present: BTreeSet<String> = files
            .iter()
            .filter_map(|f| f.file_name().and_then(|n| n.to_str()).map(String::from))
            .collect();
        let base = files[0].parent().unwrap_or(Path::new("")).to_path_buf();
        for &(s, t) in map.keys() {
            let name = recording_file_name(s, t);
            if !present.contains(&name) {
                outcomes.push(CheckOutcome {
                    path: base.join(&name),
                    result: Err(format!(
                        "labelled trial (subject {s}, trial {t}) has no file"
                    )),
                });
            }
        }
    }
    Ok(outcomes)
}

pub fn cmd_synth(spec: &SynthSpec, out: &Path) -> Result<usize> {
    let corpus = generate_synthetic_corpus(spec)?;
    write_corpus(&corpus, out)?;
    Ok(corpus.recordings.len())
}

/// Process exit status for an error: 2 validation, 3 data, 4 internal.
pub fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Validation(_) => 2,
        Error::Data(_) | Error::Format { .. } | Error::Corruption { .. } | Error::Io { .. } => 3,
        Error::Computation(_) | Error::InFold { .. } => 4,
    }
}
