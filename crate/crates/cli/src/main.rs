use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use emoband::ingestion::{BandPowerProfile, ChannelLayout, SynthSpec};
use emoband::{Error, Result};
use emoband_cli::commands::{self, exit_code};
use emoband_cli::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "emoband",
    version,
    args_override_self = true,
    about = "Band-wise Hjorth features and ensemble classification of emotion recordings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one feature CSV per signal combination the recordings support.
    Extract {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, env = "EMOBAND_OUT")]
        out: PathBuf,
    },
    /// Cross-validate one (signals, classifier) cell and write its report.
    Evaluate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, env = "EMOBAND_OUT")]
        out: PathBuf,
    },
    /// Run the 4 signal combinations x 4 classifiers grid on shared folds.
    Ablate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, env = "EMOBAND_OUT")]
        out: PathBuf,
        /// Grid cells evaluated concurrently.
        #[arg(long, env = "EMOBAND_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Validate PSR1 recording files or directories of them.
    ConvertCheck {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Also require a file for every trial in this labels CSV.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Generate a synthetic corpus (PSR1 files plus labels.csv).
    Synth(SynthArgs),
}

/// Run settings. Each overrides the matching key of `--config`.
#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` file, or a report JSON whose embedded config is reused.
    #[arg(long, env = "EMOBAND_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "EMOBAND_DATA_DIR")]
    data_dir: Option<String>,
    #[arg(long, env = "EMOBAND_LABELS")]
    labels: Option<String>,
    /// arousal2, valence2 or quadrant4.
    #[arg(long, env = "EMOBAND_TASK")]
    task: Option<String>,
    /// e.g. EEG+EOG; must include EEG.
    #[arg(long, env = "EMOBAND_SIGNALS")]
    signals: Option<String>,
    /// knn, cart, rf or ens.
    #[arg(long, env = "EMOBAND_CLASSIFIER")]
    classifier: Option<String>,
    /// e.g. theta:4-8,alpha:8-13,beta:13-30,gamma:30-43
    #[arg(long, env = "EMOBAND_BANDS")]
    bands: Option<String>,
    #[arg(long, env = "EMOBAND_WINDOW_SECONDS")]
    window_seconds: Option<String>,
    #[arg(long, env = "EMOBAND_FILTER_ORDER")]
    filter_order: Option<String>,
    #[arg(long, env = "EMOBAND_CV_FOLDS")]
    cv_folds: Option<String>,
    #[arg(long, env = "EMOBAND_THRESHOLD")]
    threshold: Option<String>,
    #[arg(long, env = "EMOBAND_SEED")]
    seed: Option<String>,
    /// paper or classical.
    #[arg(long, env = "EMOBAND_COMPLEXITY")]
    complexity: Option<String>,
    /// trial or subject.
    #[arg(long, env = "EMOBAND_SPLIT")]
    split: Option<String>,
    #[arg(long, env = "EMOBAND_KNN_K")]
    knn_k: Option<String>,
    #[arg(long, env = "EMOBAND_FOREST_TREES")]
    forest_trees: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    subjects: u16,
    #[arg(long, default_value_t = 8)]
    trials: u16,
    #[arg(long, default_value_t = 7680)]
    samples: usize,
    #[arg(long, default_value_t = 128.0)]
    fs: f64,
    /// `deap` for the 40-channel layout, or a number of EEG channels.
    #[arg(long, default_value = "deap")]
    channels: String,
    /// Beta amplitude multiplier for High-arousal trials.
    #[arg(long, default_value_t = 3.0)]
    arousal_beta_gain: f64,
    /// Alpha amplitude multiplier for High-valence trials.
    #[arg(long, default_value_t = 2.0)]
    valence_alpha_gain: f64,
    #[arg(long, default_value_t = 0.2)]
    jitter: f64,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read_config_file(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    if path.extension().is_some_and(|x| x == "json") {
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        return value["config_text"]
            .as_str()
            .map(String::from)
            .ok_or_else(|| Error::Format {
                path: path.to_path_buf(),
                message: "report has no config_text".into(),
            });
    }
    Ok(text)
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&read_config_file(path)?)?;
        }
        let flags = [
            ("data_dir", &self.data_dir),
            ("labels", &self.labels),
            ("task", &self.task),
            ("signals", &self.signals),
            ("classifier", &self.classifier),
            ("bands", &self.bands),
            ("window_seconds", &self.window_seconds),
            ("filter_order", &self.filter_order),
            ("cv_folds", &self.cv_folds),
            ("threshold", &self.threshold),
            ("seed", &self.seed),
            ("complexity", &self.complexity),
            ("split", &self.split),
            ("knn_k", &self.knn_k),
            ("forest_trees", &self.forest_trees),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SynthArgs {
    fn spec(&self) -> Result<SynthSpec> {
        let layout = match self.channels.as_str() {
            "deap" => ChannelLayout::Deap,
            n => ChannelLayout::Eeg(n.parse().map_err(|_| {
                Error::Validation(format!("--channels {n:?}: expected deap or a count"))
            })?),
        };
        let mut profile = BandPowerProfile {
            amplitude_jitter: self.jitter,
            ..BandPowerProfile::default()
        };
        profile.arousal_gain[2] = self.arousal_beta_gain;
        profile.valence_gain[1] = self.valence_alpha_gain;
        Ok(SynthSpec {
            n_subjects: self.subjects,
            n_trials: self.trials,
            n_samples: self.samples,
            sampling_rate: self.fs,
            layout,
            profile,
            noise_sigma: self.noise,
            seed: self.seed,
        })
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Extract { config, out } => {
            for path in commands::cmd_extract(&config.resolve()?, &out)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Evaluate { config, out } => {
            let cfg = config.resolve()?;
            let done = commands::cmd_evaluate(&cfg, &out)?;
            println!("{}", commands::table_header(cfg.task));
            println!("{}", done.row);
            println!("wrote {}", done.json_path.display());
        }
        Command::Ablate { config, out, jobs } => {
            let done = commands::cmd_ablate(&config.resolve()?, &out, jobs)?;
            print!("{}", done.table);
            println!("fold hash {}", done.fold_hash);
            println!("wrote {}", done.json_path.display());
        }
        Command::ConvertCheck { paths, labels } => {
            let outcomes = commands::cmd_convert_check(&paths, labels.as_deref())?;
            let mut failed = 0;
            for o in &outcomes {
                match &o.result {
                    Ok(msg) => println!("ok    {}: {msg}", o.path.display()),
                    Err(msg) => {
                        failed += 1;
                        println!("FAIL  {}: {msg}", o.path.display());
                    }
                }
            }
            println!("{} checked, {failed} failed", outcomes.len());
            if failed > 0 {
                return Ok(3);
            }
        }
        Command::Synth(args) => {
            let n = commands::cmd_synth(&args.spec()?, &args.out)?;
            println!(
                "wrote {n} recordings and labels.csv to {}",
                args.out.display()
            );
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
