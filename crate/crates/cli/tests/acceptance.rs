//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use ndarray::Array2;
use rustfft::{num_complex::Complex64, FftPlanner};

use emoband::classifiers::{CartModel, CartParams, Dataset, KnnModel, Node};
use emoband::ensemble::{combine_votes, Decision, EnsembleConfig};
use emoband::evaluation::{permute_labels, run_experiment, ClassifierChoice, CvConfig};
use emoband::filterbank::{ApplyMode, DigitalFilter, FilterBank};
use emoband::hjorth::{self, extract_features, ComplexityForm, WindowSpec};
use emoband::ingestion::{generate_synthetic_corpus, BandPowerProfile, ChannelLayout, SynthSpec};
use emoband::model::{
    binarize_rating, Band, BandName, ChannelGroup, ClassLabel, HjorthParameter, Level, SignalKind,
    Task,
};
use emoband::rng::Stream;

type Criterion = (&'static str, fn() -> Verdict);

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
    /// The stated target is unreachable; the consistent check passed.
    KnownFail(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// ---------------------------------------------------------------------------
// Filter response

fn filter_response() -> Verdict {
    let start = Instant::now();
    let fs = 128.0;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst_edge = 0.0f64;
    let mut worst_center = f64::INFINITY;
    let mut worst_stop = 0.0f64;
    for band in Band::canonical() {
        let f = DigitalFilter::design(8, band, fs).unwrap();
        let grid: Vec<f64> = (0..=256).map(|i| i as f64 * 0.25).collect();
        let mag: Vec<f64> = grid
            .iter()
            .map(|&g| f.frequency_response(g).unwrap())
            .collect();
        let at = |hz: f64| mag[(hz / 0.25).round() as usize];
        worst_edge = worst_edge
            .max((at(band.low_hz) - target).abs())
            .max((at(band.high_hz) - target).abs());
        worst_center = worst_center.min(f.frequency_response(band.center_hz()).unwrap());
        for (&g, &m) in grid.iter().zip(&mag) {
            if g <= band.low_hz / 2.0 || g >= 2.0 * band.high_hz {
                worst_stop = worst_stop.max(m);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst_edge <= 0.02 && worst_center >= 0.97 && worst_stop < 0.05 && secs < 5.0,
        format!(
            "max |edge - 1/sqrt2| = {worst_edge:.2e}, min center = {worst_center:.4}, max stopband = {worst_stop:.2e}, {secs:.2}s"
        ),
    )
}

// ---------------------------------------------------------------------------
// Hjorth

/// Activity and Mobility from the power spectrum. The forward difference's
/// energy is the circular second spectral moment minus the wrap-around term.
fn spectral_oracle(y: &[f64], fft: &dyn rustfft::Fft<f64>) -> (f64, f64) {
    let n = y.len();
    let mut buf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let nf = n as f64;
    let power: Vec<f64> = buf.iter().map(|c| c.norm_sqr()).collect();
    let activity = power[1..].iter().sum::<f64>() / (nf * nf);
    let circ: f64 = power
        .iter()
        .enumerate()
        .map(|(k, p)| p * 4.0 * (std::f64::consts::PI * k as f64 / nf).sin().powi(2))
        .sum::<f64>()
        / nf;
    let wrap = y[0] - y[n - 1];
    let linear = circ - wrap * wrap;
    let mean_d = (y[n - 1] - y[0]) / (nf - 1.0);
    let var_d = linear / (nf - 1.0) - mean_d * mean_d;
    (activity, (var_d / activity).sqrt())
}

fn hjorth_oracle() -> Verdict {
    let n = 1280;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut s = Stream::new(20_240_601);
    let mut worst_act = 0.0f64;
    let mut worst_mob = 0.0f64;
    let mut complexity_mismatch = 0;
    for w in 0..1000 {
        // Alternate white noise, random walks and noisy sines.
        let y: Vec<f64> = match w % 3 {
            0 => (0..n).map(|_| s.normal() * 3.0 + 1.5).collect(),
            1 => {
                let mut acc = 0.0;
                (0..n)
                    .map(|_| {
                        acc += s.normal();
                        acc
                    })
                    .collect()
            }
            _ => {
                let f = s.uniform(1.0, 60.0);
                (0..n)
                    .map(|i| {
                        (std::f64::consts::TAU * f * i as f64 / 128.0).sin() + 0.1 * s.normal()
                    })
                    .collect()
            }
        };
        let (act_o, mob_o) = spectral_oracle(&y, fft.as_ref());
        let act = hjorth::activity(&y).unwrap();
        let mob = hjorth::mobility(&y).unwrap();
        worst_act = worst_act.max(((act - act_o) / act_o).abs());
        worst_mob = worst_mob.max(((mob - mob_o) / mob_o).abs());

        let composed = (hjorth::mobility(&hjorth::derivative(&y).unwrap()).unwrap() / mob).sqrt();
        let fused = hjorth::hjorth(&y, ComplexityForm::Paper).unwrap();
        let direct = hjorth::complexity(&y).unwrap();
        if composed.to_bits() != direct.to_bits()
            || composed.to_bits() != fused.complexity.to_bits()
            || fused.activity.to_bits() != act.to_bits()
            || fused.mobility.to_bits() != mob.to_bits()
        {
            complexity_mismatch += 1;
        }
    }
    let mut sine_range = (f64::INFINITY, f64::NEG_INFINITY);
    for band in Band::canonical() {
        let f = band.center_hz();
        let y: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::TAU * f * i as f64 / 128.0 + 0.3).sin())
            .collect();
        let c = hjorth::complexity(&y).unwrap();
        sine_range = (sine_range.0.min(c), sine_range.1.max(c));
    }
    verdict(
        worst_act <= 1e-6 && worst_mob <= 1e-6 && complexity_mismatch == 0 && sine_range.0 >= 0.98 && sine_range.1 <= 1.02,
        format!(
            "max rel err activity {worst_act:.1e}, mobility {worst_mob:.1e}; {complexity_mismatch} complexity bit mismatches; sine complexity in [{:.4}, {:.4}]",
            sine_range.0, sine_range.1
        ),
    )
}

// ---------------------------------------------------------------------------
// Feature counts

fn feature_counts() -> Verdict {
    let spec = SynthSpec {
        n_subjects: 1,
        n_trials: 2,
        layout: ChannelLayout::Deap,
        seed: 1,
        ..SynthSpec::default()
    };
    let corpus = generate_synthetic_corpus(&spec).unwrap();
    let names = corpus.recordings[0].channel_names().to_vec();
    let bank = FilterBank::design(&Band::canonical(), 8, 128.0, ApplyMode::ZeroPhase).unwrap();
    let window = WindowSpec::new(10.0, 0.0).unwrap();
    use SignalKind::*;
    let combos: [&[SignalKind]; 4] = [&[Eeg], &[Eeg, Eog], &[Eeg, Emg], &[Eeg, Eog, Emg]];
    let counts: Vec<usize> = combos
        .iter()
        .map(|c| {
            let groups: Vec<ChannelGroup> = c
                .iter()
                .map(|&k| ChannelGroup::resolve(k, &names).unwrap())
                .collect();
            extract_features(
                &corpus.recordings,
                &groups,
                &bank,
                &window,
                ComplexityForm::Paper,
            )
            .unwrap()
            .n_features()
        })
        .collect();
    // Stated targets. 2592 and 2880 are 36 and 40 channels' worth at 72 features
    // per channel, so 34- and 36-channel input cannot produce them.
    let stated = [2304, 2592, 2592, 2880];
    // Channels x bands x windows x parameters.
    let per_channel = 4 * (7680 / 1280) * 3;
    let rule: Vec<usize> = [32, 34, 34, 36].iter().map(|c| c * per_channel).collect();
    let detail = format!(
        "EEG/EEG+EOG/EEG+EMG/all = {counts:?}; stated {stated:?}; channels x 72 = {rule:?}"
    );
    if counts != rule || corpus.recordings[0].n_samples() != 7680 {
        Verdict::Fail(detail)
    } else if counts != stated {
        Verdict::KnownFail(detail)
    } else {
        Verdict::Pass(detail)
    }
}

// ---------------------------------------------------------------------------
// Classifier oracles

fn knn_oracle(x: &Array2<f64>, y: &[usize], q: &[f64], k: usize, n_classes: usize) -> usize {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let mut dists: Vec<(f64, usize)> = (0..x.nrows())
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..d {
                let col = x.column(j);
                let mean = col.sum() / n;
                let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                if sd > 0.0 {
                    let diff = (q[j] - x[[i, j]]) / sd;
                    acc += diff * diff;
                }
            }
            (acc, i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; n_classes];
    for &(_, i) in &dists[..k] {
        votes[y[i]] += 1;
    }
    let best = *votes.iter().max().unwrap();
    votes.iter().position(|&v| v == best).unwrap()
}

fn knn_check(s: &mut Stream) -> (usize, usize) {
    let mut agree = 0;
    let mut total = 0;
    for (task, k) in [
        (Task::TwoClassArousal, 5),
        (Task::FourClassQuadrant, 4),
        (Task::TwoClassValence, 1),
        (Task::FourClassQuadrant, 7),
    ] {
        let (n, d) = (80, 6);
        let mut x = Array2::from_shape_fn((n, d), |(_, j)| s.normal() * (j + 1) as f64 + j as f64);
        x.column_mut(3).fill(2.5);
        let y: Vec<usize> = (0..n)
            .map(|_| s.below(task.n_classes() as u64) as usize)
            .collect();
        let labels = y
            .iter()
            .map(|&o| ClassLabel::from_ordinal(task, o).unwrap())
            .collect();
        let data = Dataset::new(x.clone(), labels).unwrap();
        let model = KnnModel::train(&data, k).unwrap();
        for _ in 0..50 {
            let q: Vec<f64> = (0..d)
                .map(|j| s.normal() * (j + 1) as f64 + j as f64)
                .collect();
            total += 1;
            if model.predict(&q).unwrap().ordinal() == knn_oracle(&x, &y, &q, k, task.n_classes()) {
                agree += 1;
            }
        }
    }
    (agree, total)
}

#[derive(Debug, PartialEq)]
enum OracleNode {
    Leaf(Vec<u32>),
    Split(usize, f64, Box<OracleNode>, Box<OracleNode>),
}

fn gini(counts: &[u32]) -> f64 {
    let n: u32 = counts.iter().sum();
    1.0 - counts
        .iter()
        .map(|&c| (c as f64 / n as f64).powi(2))
        .sum::<f64>()
}

fn class_counts(y: &[usize], rows: &[usize], k: usize) -> Vec<u32> {
    let mut c = vec![0u32; k];
    for &r in rows {
        c[y[r]] += 1;
    }
    c
}

/// Exhaustive search: every column, every midpoint between distinct sorted values.
fn cart_oracle(x: &Array2<f64>, y: &[usize], rows: &[usize], k: usize) -> OracleNode {
    let counts = class_counts(y, rows, k);
    if counts.iter().filter(|&&c| c > 0).count() <= 1 || rows.len() < 2 {
        return OracleNode::Leaf(counts);
    }
    let n = rows.len() as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    for j in 0..x.ncols() {
        let mut values: Vec<f64> = rows.iter().map(|&r| x[[r, j]]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, j]] <= t);
            let imp = l.len() as f64 / n * gini(&class_counts(y, &l, k))
                + r.len() as f64 / n * gini(&class_counts(y, &r, k));
            if best.is_none_or(|b| imp < b.0 - 1e-12) {
                best = Some((imp, j, t));
            }
        }
    }
    let Some((_, j, t)) = best else {
        return OracleNode::Leaf(counts);
    };
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, j]] <= t);
    OracleNode::Split(
        j,
        t,
        Box::new(cart_oracle(x, y, &l, k)),
        Box::new(cart_oracle(x, y, &r, k)),
    )
}

fn same_tree(nodes: &[Node], at: usize, oracle: &OracleNode) -> bool {
    match (&nodes[at], oracle) {
        (Node::Leaf { counts }, OracleNode::Leaf(c)) => counts == c,
        (
            Node::Split {
                column,
                threshold,
                left,
                right,
                ..
            },
            OracleNode::Split(j, t, l, r),
        ) => {
            column == j
                && (threshold - t).abs() <= 1e-12 * t.abs().max(1.0)
                && same_tree(nodes, *left, l)
                && same_tree(nodes, *right, r)
        }
        _ => false,
    }
}

fn cart_check(s: &mut Stream) -> (usize, usize) {
    let mut agree = 0;
    let trials = 60;
    for t in 0..trials {
        let n = 5 + s.below(46) as usize;
        let d = 1 + s.below(5) as usize;
        let task = if t % 2 == 0 {
            Task::TwoClassArousal
        } else {
            Task::FourClassQuadrant
        };
        // Half the datasets use a coarse value grid to force tied values and tied splits.
        let coarse = t % 4 < 2;
        let x = Array2::from_shape_fn((n, d), |_| {
            if coarse {
                s.below(4) as f64
            } else {
                s.normal()
            }
        });
        let mut y: Vec<usize> = (0..n)
            .map(|_| s.below(task.n_classes() as u64) as usize)
            .collect();
        y[0] = 0;
        y[1] = 1;
        let labels = y
            .iter()
            .map(|&o| ClassLabel::from_ordinal(task, o).unwrap())
            .collect();
        let data = Dataset::new(x.clone(), labels).unwrap();
        let model = CartModel::train(&data, CartParams::default()).unwrap();
        let rows: Vec<usize> = (0..n).collect();
        if same_tree(
            model.nodes(),
            0,
            &cart_oracle(&x, &y, &rows, task.n_classes()),
        ) {
            agree += 1;
        }
    }
    (agree, trials)
}

fn vote_check() -> (usize, usize) {
    let mut agree = 0;
    let mut total = 0;
    for task in [Task::TwoClassArousal, Task::FourClassQuadrant] {
        let k = task.n_classes();
        let l = |o: usize| ClassLabel::from_ordinal(task, o).unwrap();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    total += 1;
                    let votes = [a, b, c];
                    let winner = (0..k).find(|&v| votes.iter().filter(|&&x| x == v).count() >= 2);
                    let expected = match winner {
                        Some(v) => (l(v), Decision::Majority),
                        None => (l(c), Decision::Fallback),
                    };
                    if combine_votes(l(a), l(b), l(c)) == expected {
                        agree += 1;
                    }
                }
            }
        }
    }
    (agree, total)
}

fn classifier_oracles() -> Verdict {
    let mut s = Stream::new(77);
    let (knn_ok, knn_n) = knn_check(&mut s);
    let (cart_ok, cart_n) = cart_check(&mut s);
    let (vote_ok, vote_n) = vote_check();
    verdict(
        knn_ok == knn_n && knn_n == 200 && cart_ok == cart_n && vote_ok == vote_n && vote_n == 8 + 64,
        format!("KNN {knn_ok}/{knn_n} queries, CART {cart_ok}/{cart_n} trees, votes {vote_ok}/{vote_n} patterns"),
    )
}

// ---------------------------------------------------------------------------
// Learnability

fn cohens_d(low: &[f64], high: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    (mean(high) - mean(low)) / ((var(low) + var(high)) / 2.0).sqrt()
}

fn learnability() -> Verdict {
    let start = Instant::now();
    let spec = SynthSpec {
        n_subjects: 4,
        n_trials: 32,
        n_samples: 7680,
        sampling_rate: 128.0,
        layout: ChannelLayout::Eeg(4),
        profile: BandPowerProfile {
            base_amplitude: [1.0; 4],
            arousal_gain: [1.0, 1.0, 2.0, 1.0],
            valence_gain: [1.0; 4],
            amplitude_jitter: 0.28,
        },
        noise_sigma: 1.0,
        seed: 2024,
    };
    let corpus = generate_synthetic_corpus(&spec).unwrap();
    let groups =
        [ChannelGroup::resolve(SignalKind::Eeg, corpus.recordings[0].channel_names()).unwrap()];
    let bank = FilterBank::design(&Band::canonical(), 8, 128.0, ApplyMode::ZeroPhase).unwrap();
    let fm = extract_features(
        &corpus.recordings,
        &groups,
        &bank,
        &WindowSpec::new(10.0, 0.0).unwrap(),
        ComplexityForm::Paper,
    )
    .unwrap();
    let levels: Vec<Level> = corpus
        .labels
        .values()
        .map(|r| binarize_rating(r.arousal(), 5.0).unwrap())
        .collect();

    let ds: Vec<f64> = fm
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.band == BandName::Beta && c.parameter == HjorthParameter::Activity)
        .map(|(j, _)| {
            let x = fm.data().column(j);
            let pick = |l: Level| {
                (0..x.len())
                    .filter(|&i| levels[i] == l)
                    .map(|i| x[i])
                    .collect::<Vec<_>>()
            };
            cohens_d(&pick(Level::Low), &pick(Level::High))
        })
        .collect();
    let mean_d = ds.iter().sum::<f64>() / ds.len() as f64;

    let labels = levels
        .iter()
        .map(|&l| ClassLabel::level(Task::TwoClassArousal, l))
        .collect();
    let data = Dataset::from_features(&fm, labels).unwrap();
    let cv = CvConfig::default();
    let config = EnsembleConfig::default();
    let acc = |d: &Dataset, c| {
        run_experiment(d, None, c, &cv, &config, 31)
            .unwrap()
            .mean_accuracy
    };
    let [knn, cart, rf, ens] = ClassifierChoice::ALL.map(|c| acc(&data, c));
    let shuffled = acc(&permute_labels(&data, 5), ClassifierChoice::Ens);
    let sigma = (0.25f64 / data.n_rows() as f64).sqrt();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        (1.5..=2.5).contains(&mean_d)
            && ens >= 0.85
            && [knn, cart, rf].iter().all(|&b| ens >= b - 0.05)
            && (shuffled - 0.5).abs() <= 3.0 * sigma
            && secs < 120.0,
        format!(
            "beta d = {mean_d:.2}; ENS {ens:.3}, KNN {knn:.3}, CART {cart:.3}, RF {rf:.3}; shuffled ENS {shuffled:.3} (3 sigma = {:.3}); {secs:.1}s",
            3.0 * sigma
        ),
    )
}

// ---------------------------------------------------------------------------
// Determinism

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_emoband"))
        .args(args)
        .output()
        .unwrap()
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let p = |name: &str| tmp.path().join(name).to_str().unwrap().to_string();
    let data = p("data");
    let o = run_cli(&[
        "synth",
        "--out",
        &data,
        "--subjects",
        "2",
        "--trials",
        "10",
        "--samples",
        "1280",
        "--seed",
        "6",
    ]);
    assert!(o.status.success());
    let ablate = |out: &str| {
        let o = run_cli(&[
            "ablate",
            "--data-dir",
            &data,
            "--out",
            out,
            "--seed",
            "12",
            "--cv-folds",
            "5",
            "--forest-trees",
            "10",
            "--jobs",
            "2",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let (a, b) = (p("a"), p("b"));
    ablate(&a);
    ablate(&b);
    let read = |dir: &str, f: &str| std::fs::read(Path::new(dir).join(f)).unwrap();
    let identical = ["ablation.json", "ablation.txt"]
        .iter()
        .all(|f| read(&a, f) == read(&b, f));
    let v: serde_json::Value = serde_json::from_slice(&read(&a, "ablation.json")).unwrap();
    let cells = v["cells"].as_array().unwrap();
    let shared = cells.iter().all(|c| c["fold_hash"] == v["fold_hash"]);
    verdict(
        identical && shared && cells.len() == 16,
        format!(
            "reports byte-identical: {identical}; {} cells, all fold hashes equal: {shared}",
            cells.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// Paper-scale reproduction (needs converted DEAP data)

fn deap_reproduction() -> Verdict {
    let Ok(dir) = std::env::var("EMOBAND_DEAP_DIR") else {
        return Verdict::Skip(
            "set EMOBAND_DEAP_DIR to a directory of converted PSR1 files and labels.csv".into(),
        );
    };
    let mut cfg = emoband_cli::config::RunConfig {
        data_dir: Some(dir.into()),
        ..Default::default()
    };
    let corpus = emoband_cli::commands::load_corpus(&cfg).unwrap();
    let all = [SignalKind::Eeg, SignalKind::Eog, SignalKind::Emg];
    let fm = emoband_cli::commands::compute_features(&cfg, &corpus.recordings, &all).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for (task, paper) in [
        (Task::TwoClassArousal, 94.42),
        (Task::TwoClassValence, 94.02),
        (Task::FourClassQuadrant, 90.74),
    ] {
        cfg.task = task;
        let labels = corpus
            .labels
            .values()
            .map(|r| task.label(r, cfg.threshold).unwrap())
            .collect();
        let data = Dataset::from_features(&fm, labels).unwrap();
        let acc = |c| {
            run_experiment(
                &data,
                None,
                c,
                &CvConfig::default(),
                &EnsembleConfig::default(),
                1,
            )
            .unwrap()
            .mean_accuracy
        };
        let (knn, rf, ens) = (
            acc(ClassifierChoice::Knn),
            acc(ClassifierChoice::Rf),
            acc(ClassifierChoice::Ens),
        );
        ok &= ens > knn && ens >= rf;
        detail.push(format!(
            "{}: ENS {:.2}% (paper {paper}%), KNN {:.2}%, RF {:.2}%",
            task.as_str(),
            100.0 * ens,
            100.0 * knn,
            100.0 * rf
        ));
    }
    verdict(ok, detail.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("filter-response", filter_response),
        ("hjorth-oracle", hjorth_oracle),
        ("feature-counts", feature_counts),
        ("classifier-oracles", classifier_oracles),
        ("learnability", learnability),
        ("determinism", determinism),
        ("deap-reproduction (conditional)", deap_reproduction),
    ];
    let mut failed = 0;
    let mut known = 0;
    for (name, run) in criteria {
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::Fail(format!("panicked: {msg}"))
        });
        match v {
            Verdict::Pass(d) => println!("acceptance {name}: PASS ({d})"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("acceptance {name}: FAIL ({d})");
            }
            Verdict::Skip(d) => println!("acceptance {name}: SKIP ({d})"),
            Verdict::KnownFail(d) => {
                known += 1;
                println!("acceptance {name}: FAIL [unattainable as stated] ({d})");
            }
        }
    }
    println!("acceptance summary: {failed} failed, {known} unattainable as stated");
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
