//! Hjorth parameters and windowed feature extraction.
//!
//! Conventions: variances are population variances (divide by `n`), and the
//! derivative is the unscaled first forward difference `y[k+1] - y[k]`. The
//! sampling-rate factor would cancel in Mobility and Complexity anyway.
//! A window with zero variance yields `(0, 0, 0)`.

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use crate::model::{ChannelGroup, FeatureColumn, FeatureMatrix, HjorthParameter, Recording};

/// Which form of the Complexity ratio to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComplexityForm {
    /// `sqrt(Mobility(dy) / Mobility(y))`
    #[default]
    Paper,
    /// `Mobility(dy) / Mobility(y)`
    Classical,
}

impl ComplexityForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ComplexityForm::Paper => "paper",
            ComplexityForm::Classical => "classical",
        }
    }

    fn apply(self, ratio: f64) -> f64 {
        match self {
            ComplexityForm::Paper => ratio.sqrt(),
            ComplexityForm::Classical => ratio,
        }
    }
}

impl FromStr for ComplexityForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(ComplexityForm::Paper),
            "classical" => Ok(ComplexityForm::Classical),
            other => Err(Error::validation(format!(
                "unknown complexity form {other:?} (expected paper or classical)"
            ))),
        }
    }
}

// Shifted by the first sample so a constant window gives exactly zero.
fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let origin = x[0];
    let mean = x.iter().map(|v| v - origin).sum::<f64>() / n;
    x.iter().map(|v| (v - origin - mean).powi(2)).sum::<f64>() / n
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Population variance of the window.
pub fn activity(window: &[f64]) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::validation("activity of an empty window"));
    }
    Ok(variance(window))
}

/// First forward difference, length `n - 1`.
pub fn derivative(window: &[f64]) -> Result<Vec<f64>> {
    if window.len() < 2 {
        return Err(Error::validation(format!(
            "derivative needs at least 2 samples, got {}",
            window.len()
        )));
    }
    Ok(diff(window))
}

fn mobility_from(var_y: f64, var_dy: f64) -> f64 {
    if var_y == 0.0 {
        0.0
    } else {
        (var_dy / var_y).sqrt()
    }
}

/// `sqrt(var(dy) / var(y))`, or 0 for a constant window.
pub fn mobility(window: &[f64]) -> Result<f64> {
    let d = derivative(window)?;
    Ok(mobility_from(variance(window), variance(&d)))
}

/// Complexity in the default (paper) form.
pub fn complexity(window: &[f64]) -> Result<f64> {
    complexity_with(window, ComplexityForm::Paper)
}

/// `Mobility(dy) / Mobility(y)`, square-rooted for [`ComplexityForm::Paper`].
pub fn complexity_with(window: &[f64], form: ComplexityForm) -> Result<f64> {
    if window.len() < 3 {
        return Err(Error::validation(format!(
            "complexity needs at least 3 samples, got {}",
            window.len()
        )));
    }
    let m_y = mobility(window)?;
    if m_y == 0.0 {
        return Ok(0.0);
    }
    let m_dy = mobility(&derivative(window)?)?;
    Ok(form.apply(m_dy / m_y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjorthTriple {
    pub activity: f64,
    pub mobility: f64,
    pub complexity: f64,
}

impl HjorthTriple {
    pub fn get(&self, p: HjorthParameter) -> f64 {
        match p {
            HjorthParameter::Activity => self.activity,
            HjorthParameter::Mobility => self.mobility,
            HjorthParameter::Complexity => self.complexity,
        }
    }
}

/// All three parameters in one pass over the window and its two differences.
/// Bit-identical to calling [`activity`], [`mobility`] and [`complexity_with`].
pub fn hjorth(window: &[f64], form: ComplexityForm) -> Result<HjorthTriple> {
    if window.len() < 3 {
        return Err(Error::validation(format!(
            "Hjorth parameters need at least 3 samples, got {}",
            window.len()
        )));
    }
    let d1 = diff(window);
    let d2 = diff(&d1);
    let (v0, v1, v2) = (variance(window), variance(&d1), variance(&d2));
    let mobility = mobility_from(v0, v1);
    let complexity = if mobility == 0.0 {
        0.0
    } else {
        form.apply(mobility_from(v1, v2) / mobility)
    };
    Ok(HjorthTriple {
        activity: v0,
        mobility,
        complexity,
    })
}

/// Fixed-length windows with optional overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub length_seconds: f64,
    pub overlap_seconds: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            length_seconds: 10.0,
            overlap_seconds: 0.0,
        }
    }
}

impl WindowSpec {
    pub fn new(length_seconds: f64, overlap_seconds: f64) -> Result<Self> {
        if !(length_seconds.is_finite() && length_seconds > 0.0) {
            return Err(Error::validation(format!(
                "window length {length_seconds} must be > 0"
            )));
        }
        if !(overlap_seconds >= 0.0 && overlap_seconds < length_seconds) {
            return Err(Error::validation(format!(
                "window overlap {overlap_seconds} must be in [0, {length_seconds})"
            )));
        }
        Ok(WindowSpec {
            length_seconds,
            overlap_seconds,
        })
    }

    pub fn window_samples(&self, sampling_rate: f64) -> Result<usize> {
        let n = (self.length_seconds * sampling_rate).round() as usize;
        if n < 3 {
            return Err(Error::validation(format!(
                "window of {} s at {} Hz is {} samples; need at least 3",
                self.length_seconds, sampling_rate, n
            )));
        }
        Ok(n)
    }

    fn step_samples(&self, sampling_rate: f64) -> Result<usize> {
        let step = ((self.length_seconds - self.overlap_seconds) * sampling_rate).round() as usize;
        Ok(step.max(1))
    }

    /// Start offsets of all complete windows; trailing partial windows are dropped.
    pub fn window_starts(&self, n_samples: usize, sampling_rate: f64) -> Result<Vec<usize>> {
        let len = self.window_samples(sampling_rate)?;
        let step = self.step_samples(sampling_rate)?;
        if n_samples < len {
            return Ok(Vec::new());
        }
        Ok((0..=(n_samples - len) / step).map(|i| i * step).collect())
    }
}

/// Sorted union of the channel indices of `groups`.
pub fn selected_channels(groups: &[ChannelGroup]) -> Vec<usize> {
    let mut ch: Vec<usize> = groups
        .iter()
        .flat_map(|g| g.channel_indices().iter().copied())
        .collect();
    ch.sort_unstable();
    ch.dedup();
    ch
}

/// One row per recording; columns ordered channel, band, window, parameter.
pub fn extract_features(
    recordings: &[Recording],
    groups: &[ChannelGroup],
    bank: &FilterBank,
    window: &WindowSpec,
    form: ComplexityForm,
) -> Result<FeatureMatrix> {
    let first = recordings
        .first()
        .ok_or_else(|| Error::validation("no recordings to extract features from"))?;
    let fs = first.sampling_rate();
    let n_samples = first.n_samples();
    for r in recordings {
        if r.sampling_rate() != fs
            || r.n_samples() != n_samples
            || r.channel_names() != first.channel_names()
        {
            return Err(Error::validation(format!(
                "recording s{}/t{} ({} ch, {} samples, {} Hz) does not match s{}/t{} ({} ch, {} samples, {} Hz)",
                r.subject_id(),
                r.trial_id(),
                r.n_channels(),
                r.n_samples(),
                r.sampling_rate(),
                first.subject_id(),
                first.trial_id(),
                first.n_channels(),
                n_samples,
                fs
            )));
        }
    }
    if bank.sampling_rate() != fs {
        return Err(Error::validation(format!(
            "filter bank designed for {} Hz, recordings are {} Hz",
            bank.sampling_rate(),
            fs
        )));
    }
    let channels = selected_channels(groups);
    if channels.is_empty() {
        return Err(Error::validation("no channels selected"));
    }
    if let Some(&c) = channels.iter().find(|&&c| c >= first.n_channels()) {
        return Err(Error::validation(format!(
            "channel index {c} out of range for {} channels",
            first.n_channels()
        )));
    }
    let starts = window.window_starts(n_samples, fs)?;
    if starts.is_empty() {
        return Err(Error::validation(format!(
            "recordings of {n_samples} samples are shorter than one window"
        )));
    }
    let wlen = window.window_samples(fs)?;
    let bands = bank.bands();

    let mut columns = Vec::with_capacity(channels.len() * bands.len() * starts.len() * 3);
    for &c in &channels {
        for band in &bands {
            for w in 0..starts.len() {
                for p in HjorthParameter::ALL {
                    columns.push(FeatureColumn {
                        channel_index: c,
                        channel_name: first.channel_names()[c].clone(),
                        band: band.name,
                        window_index: w,
                        parameter: p,
                    });
                }
            }
        }
    }
    let per_channel = bands.len() * starts.len() * 3;

    let blocks: Vec<Vec<f64>> = recordings
        .par_iter()
        .flat_map_iter(|r| channels.iter().map(move |&c| (r, c)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(r, c)| {
            let raw = r.channel(c).to_vec();
            let mut out = Vec::with_capacity(per_channel);
            for (b, band) in bands.iter().enumerate() {
                let filtered = bank.filter(b, &raw)?;
                if filtered.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Computation(format!(
                        "non-finite filter output on channel {} ({}), band {}",
                        c,
                        r.channel_names()[c],
                        band.name
                    )));
                }
                for &s in &starts {
                    let t = hjorth(&filtered[s..s + wlen], form)?;
                    out.extend(HjorthParameter::ALL.iter().map(|&p| t.get(p)));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut data = Vec::with_capacity(recordings.len() * columns.len());
    for block in blocks {
        data.extend(block);
    }
    let data = ndarray::Array2::from_shape_vec((recordings.len(), columns.len()), data)
        .map_err(|e| Error::Computation(e.to_string()))?;
    FeatureMatrix::new(data, columns)
}
