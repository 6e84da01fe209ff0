//! Synthetic corpus with class-dependent band power.
//!
//! Each subject gets `n_trials` trials whose quadrants cycle through
//! LALV, HAHV, LAHV, HALV and are then shuffled with `derive(seed, [s, 0])`.
//! This keeps arousal, valence and quadrant classes balanced within each subject.
//! Ratings are `1 + below(399)/100` (Low) or `5 + below(401)/100` (High), drawn
//! from `derive(seed, [s, t, 1])`.
//!
//! Channel `c` of trial `(s, t)` uses the stream `derive(seed, [s, t, 2, c])`.
//! For each canonical band `b` it draws, in order:
//! - an amplitude jitter `z ~ N(0, 1)`;
//! - a frequency `low + (high - low)(0.25 + 0.5u)`;
//! - a phase `2πu`.
//!
//! It then adds `max(0, 1 + jitter·z) · base[b] · gain_a[b] · gain_v[b] · sin(2πft + φ)`.
//! Here `gain_a` and `gain_v` are the High-arousal and High-valence gains, and
//! they are 1 for Low. After all bands, one `N(0, σ²)` noise sample is added
//! per sample point, in time order.

use std::path::Path;

use ndarray::Array2;

use super::labels::{write_labels, LabelMap};
use super::psr1::{recording_file_name, write_recording};
use crate::error::{Error, Result};
use crate::model::{Band, Level, Quadrant, Ratings, Recording, DEAP_CHANNELS};
use crate::rng::Stream;

/// Per-band amplitudes in canonical order (theta, alpha, beta, gamma).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPowerProfile {
    pub base_amplitude: [f64; 4],
    /// Amplitude multiplier applied to High-arousal trials.
    pub arousal_gain: [f64; 4],
    /// Amplitude multiplier applied to High-valence trials.
    pub valence_gain: [f64; 4],
    /// Relative standard deviation of per-trial amplitudes.
    pub amplitude_jitter: f64,
}

impl Default for BandPowerProfile {
    fn default() -> Self {
        BandPowerProfile {
            base_amplitude: [1.0; 4],
            arousal_gain: [1.0, 1.0, 3.0, 1.0],
            valence_gain: [1.0, 2.0, 1.0, 1.0],
            amplitude_jitter: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelLayout {
    /// The 40 DEAP channel names.
    Deap,
    /// `n` EEG channels named after the first `n` DEAP EEG electrodes.
    Eeg(usize),
}

impl ChannelLayout {
    pub fn names(self) -> Result<Vec<String>> {
        match self {
            ChannelLayout::Deap => Ok(DEAP_CHANNELS.iter().map(|s| s.to_string()).collect()),
            ChannelLayout::Eeg(n) if (1..=32).contains(&n) => {
                Ok(DEAP_CHANNELS[..n].iter().map(|s| s.to_string()).collect())
            }
            ChannelLayout::Eeg(n) => Err(Error::validation(format!(
                "{n} EEG channels; expected 1..=32"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n_subjects: u16,
    pub n_trials: u16,
    pub n_samples: usize,
    pub sampling_rate: f64,
    pub layout: ChannelLayout,
    pub profile: BandPowerProfile,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_subjects: 2,
            n_trials: 8,
            n_samples: 128 * 60,
            sampling_rate: 128.0,
            layout: ChannelLayout::Deap,
            profile: BandPowerProfile::default(),
            noise_sigma: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub recordings: Vec<Recording>,
    pub labels: LabelMap,
}

const QUADRANT_CYCLE: [Quadrant; 4] = [
    Quadrant::Lalv,
    Quadrant::Hahv,
    Quadrant::Lahv,
    Quadrant::Halv,
];

fn validate(spec: &SynthSpec) -> Result<()> {
    if spec.n_subjects == 0 || spec.n_trials < 2 {
        return Err(Error::validation(format!(
            "degenerate corpus: {} subjects x {} trials cannot cover two classes",
            spec.n_subjects, spec.n_trials
        )));
    }
    if spec.n_samples == 0 {
        return Err(Error::validation("n_samples must be positive"));
    }
    for b in Band::canonical() {
        b.check_sampling_rate(spec.sampling_rate)?;
    }
    if !(spec.noise_sigma.is_finite() && spec.noise_sigma >= 0.0) {
        return Err(Error::validation(format!(
            "noise sigma {} must be >= 0",
            spec.noise_sigma
        )));
    }
    let p = &spec.profile;
    let all = p
        .base_amplitude
        .iter()
        .chain(&p.arousal_gain)
        .chain(&p.valence_gain);
    if all.clone().any(|v| !(v.is_finite() && *v >= 0.0))
        || !(p.amplitude_jitter.is_finite() && p.amplitude_jitter >= 0.0)
    {
        return Err(Error::validation(
            "profile amplitudes, gains and jitter must be finite and >= 0",
        ));
    }
    Ok(())
}

fn rating(level: Level, stream: &mut Stream) -> f64 {
    match level {
        Level::Low => 1.0 + stream.below(399) as f64 / 100.0,
        Level::High => 5.0 + stream.below(401) as f64 / 100.0,
    }
}

fn synth_channel(spec: &SynthSpec, quadrant: Quadrant, stream: &mut Stream, out: &mut [f64]) {
    let p = &spec.profile;
    let dt = 1.0 / spec.sampling_rate;
    for (b, band) in Band::canonical().iter().enumerate() {
        let z = stream.normal();
        let mut amp = p.base_amplitude[b] * (1.0 + p.amplitude_jitter * z).max(0.0);
        if quadrant.arousal() == Level::High {
            amp *= p.arousal_gain[b];
        }
        if quadrant.valence() == Level::High {
            amp *= p.valence_gain[b];
        }
        let f = band.low_hz + (band.high_hz - band.low_hz) * (0.25 + 0.5 * stream.next_f64());
        let phase = std::f64::consts::TAU * stream.next_f64();
        let w = std::f64::consts::TAU * f * dt;
        for (i, x) in out.iter_mut().enumerate() {
            *x += amp * (w * i as f64 + phase).sin();
        }
    }
    for x in out.iter_mut() {
        *x += spec.noise_sigma * stream.normal();
    }
}

pub fn generate_synthetic_corpus(spec: &SynthSpec) -> Result<SyntheticCorpus> {
    validate(spec)?;
    let names = spec.layout.names()?;
    let mut recordings = Vec::with_capacity(spec.n_subjects as usize * spec.n_trials as usize);
    let mut labels = LabelMap::new();
    for s in 1..=spec.n_subjects {
        let mut quadrants: Vec<Quadrant> = (0..spec.n_trials as usize)
            .map(|i| QUADRANT_CYCLE[i % 4])
            .collect();
        Stream::derive(spec.seed, &[s as u64, 0]).shuffle(&mut quadrants);
        for (t, &q) in (1..=spec.n_trials).zip(&quadrants) {
            let mut rs = Stream::derive(spec.seed, &[s as u64, t as u64, 1]);
            let valence = rating(q.valence(), &mut rs);
            let arousal = rating(q.arousal(), &mut rs);
            labels.insert((s, t), Ratings::new(valence, arousal)?);

            let mut data = Array2::zeros((names.len(), spec.n_samples));
            for (c, mut row) in data.outer_iter_mut().enumerate() {
                let mut cs = Stream::derive(spec.seed, &[s as u64, t as u64, 2, c as u64]);
                synth_channel(
                    spec,
                    q,
                    &mut cs,
                    row.as_slice_mut().expect("standard layout"),
                );
            }
            recordings.push(Recording::new(
                s,
                t,
                spec.sampling_rate,
                names.clone(),
                data,
            )?);
        }
    }
    Ok(SyntheticCorpus { recordings, labels })
}

/// Writes every recording as PSR1 plus `labels.csv` into `dir`.
pub fn write_corpus(corpus: &SyntheticCorpus, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for rec in &corpus.recordings {
        write_recording(
            rec,
            &dir.join(recording_file_name(rec.subject_id(), rec.trial_id())),
        )?;
    }
    write_labels(&dir.join("labels.csv"), &corpus.labels)
}
