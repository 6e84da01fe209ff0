//! Domain types shared across the pipeline.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// One subject/trial multichannel recording. Samples are channel-major:
/// row `c` holds channel `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    subject_id: u16,
    trial_id: u16,
    sampling_rate: f64,
    channel_names: Vec<String>,
    samples: Array2<f64>,
}

impl Recording {
    pub fn new(
        subject_id: u16,
        trial_id: u16,
        sampling_rate: f64,
        channel_names: Vec<String>,
        samples: Array2<f64>,
    ) -> Result<Self> {
        let (n_channels, n_samples) = samples.dim();
        if n_channels == 0 || n_samples == 0 {
            return Err(Error::validation(
                "recording needs at least one channel and one sample",
            ));
        }
        if channel_names.len() != n_channels {
            return Err(Error::validation(format!(
                "{} channel names for {} channels",
                channel_names.len(),
                n_channels
            )));
        }
        if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(Error::validation(format!(
                "sampling rate {sampling_rate} must be > 0"
            )));
        }
        for (i, name) in channel_names.iter().enumerate() {
            if channel_names[..i].contains(name) {
                return Err(Error::validation(format!(
                    "duplicate channel name {name:?}"
                )));
            }
        }
        for ((c, s), v) in samples.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "non-finite value at channel {c}, sample {s}"
                )));
            }
        }
        Ok(Recording {
            subject_id,
            trial_id,
            sampling_rate,
            channel_names,
            samples,
        })
    }

    pub fn subject_id(&self) -> u16 {
        self.subject_id
    }

    pub fn trial_id(&self) -> u16 {
        self.trial_id
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn n_channels(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.ncols()
    }

    pub fn channel(&self, index: usize) -> ndarray::ArrayView1<'_, f64> {
        self.samples.row(index)
    }
}

/// The 40-channel layout of the DEAP preprocessed recordings.
pub const DEAP_CHANNELS: [&str; 40] = [
    "Fp1",
    "AF3",
    "F3",
    "F7",
    "FC5",
    "FC1",
    "C3",
    "T7",
    "CP5",
    "CP1",
    "P3",
    "P7",
    "PO3",
    "O1",
    "Oz",
    "Pz",
    "Fp2",
    "AF4",
    "Fz",
    "F4",
    "F8",
    "FC6",
    "FC2",
    "Cz",
    "C4",
    "T8",
    "CP6",
    "CP2",
    "P4",
    "P8",
    "PO4",
    "O2",
    "hEOG",
    "vEOG",
    "zEMG",
    "tEMG",
    "GSR",
    "Respiration belt",
    "Plethysmograph",
    "Temperature",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignalKind {
    Eeg,
    Eog,
    Emg,
}

impl SignalKind {
    pub const ALL: [SignalKind; 3] = [SignalKind::Eeg, SignalKind::Eog, SignalKind::Emg];

    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Eeg => "EEG",
            SignalKind::Eog => "EOG",
            SignalKind::Emg => "EMG",
        }
    }

    /// Classify a channel by name. EOG/EMG channels carry the kind as a suffix
    /// (`hEOG`, `zEMG`); the 32 DEAP scalp positions are EEG.
    pub fn of_channel(name: &str) -> Option<SignalKind> {
        if name.ends_with("EOG") {
            Some(SignalKind::Eog)
        } else if name.ends_with("EMG") {
            Some(SignalKind::Emg)
        } else if DEAP_CHANNELS[..32].contains(&name) {
            Some(SignalKind::Eeg)
        } else {
            None
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EEG" => Ok(SignalKind::Eeg),
            "EOG" => Ok(SignalKind::Eog),
            "EMG" => Ok(SignalKind::Emg),
            other => Err(Error::validation(format!("unknown signal kind {other:?}"))),
        }
    }
}

/// A named set of channel indices within a recording layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelGroup {
    kind: SignalKind,
    channel_indices: Vec<usize>,
}

impl ChannelGroup {
    pub fn new(kind: SignalKind, channel_indices: Vec<usize>, n_channels: usize) -> Result<Self> {
        if channel_indices.is_empty() {
            return Err(Error::validation(format!("{kind} group has no channels")));
        }
        for (i, &c) in channel_indices.iter().enumerate() {
            if c >= n_channels {
                return Err(Error::validation(format!(
                    "{kind} channel index {c} out of range for {n_channels} channels"
                )));
            }
            if channel_indices[..i].contains(&c) {
                return Err(Error::validation(format!(
                    "{kind} channel index {c} repeated"
                )));
            }
        }
        Ok(ChannelGroup {
            kind,
            channel_indices,
        })
    }

    /// Fixed DEAP layout: EEG 0..32, EOG 32..34, EMG 34..36.
    pub fn deap(kind: SignalKind) -> Self {
        let range = match kind {
            SignalKind::Eeg => 0..32,
            SignalKind::Eog => 32..34,
            SignalKind::Emg => 34..36,
        };
        ChannelGroup {
            kind,
            channel_indices: range.collect(),
        }
    }

    /// Group built from channel names via [`SignalKind::of_channel`].
    pub fn resolve(kind: SignalKind, channel_names: &[String]) -> Result<Self> {
        let indices = channel_names
            .iter()
            .enumerate()
            .filter(|(_, n)| SignalKind::of_channel(n) == Some(kind))
            .map(|(i, _)| i)
            .collect();
        ChannelGroup::new(kind, indices, channel_names.len())
    }

    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn channel_indices(&self) -> &[usize] {
        &self.channel_indices
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BandName {
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl BandName {
    pub fn as_str(self) -> &'static str {
        match self {
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
            BandName::Gamma => "gamma",
        }
    }
}

impl FromStr for BandName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "theta" => Ok(BandName::Theta),
            "alpha" => Ok(BandName::Alpha),
            "beta" => Ok(BandName::Beta),
            "gamma" => Ok(BandName::Gamma),
            other => Err(Error::validation(format!("unknown band {other:?}"))),
        }
    }
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A frequency band in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub name: BandName,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Band {
    pub fn new(name: BandName, low_hz: f64, high_hz: f64) -> Result<Self> {
        if !(low_hz.is_finite() && high_hz.is_finite() && 0.0 < low_hz && low_hz < high_hz) {
            return Err(Error::validation(format!(
                "band {name} needs 0 < low < high, got {low_hz}..{high_hz}"
            )));
        }
        Ok(Band {
            name,
            low_hz,
            high_hz,
        })
    }

    pub const THETA: Band = Band {
        name: BandName::Theta,
        low_hz: 4.0,
        high_hz: 8.0,
    };
    pub const ALPHA: Band = Band {
        name: BandName::Alpha,
        low_hz: 8.0,
        high_hz: 13.0,
    };
    pub const BETA: Band = Band {
        name: BandName::Beta,
        low_hz: 13.0,
        high_hz: 30.0,
    };
    pub const GAMMA: Band = Band {
        name: BandName::Gamma,
        low_hz: 30.0,
        high_hz: 43.0,
    };

    pub fn canonical() -> [Band; 4] {
        [Band::THETA, Band::ALPHA, Band::BETA, Band::GAMMA]
    }

    /// Geometric center `sqrt(low * high)`.
    pub fn center_hz(&self) -> f64 {
        (self.low_hz * self.high_hz).sqrt()
    }

    pub fn check_sampling_rate(&self, sampling_rate: f64) -> Result<()> {
        if self.high_hz >= sampling_rate / 2.0 {
            return Err(Error::validation(format!(
                "band {} upper edge {} Hz is not below Nyquist ({} Hz)",
                self.name,
                self.high_hz,
                sampling_rate / 2.0
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.name, self.low_hz, self.high_hz)
    }
}

/// Parses `name:low-high`, e.g. `beta:13-30`.
impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once(':')
            .ok_or_else(|| Error::validation(format!("band {s:?} is not name:low-high")))?;
        let (lo, hi) = range
            .split_once('-')
            .ok_or_else(|| Error::validation(format!("band {s:?} is not name:low-high")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::validation(format!("bad band edge {v:?} in {s:?}")))
        };
        Band::new(name.parse()?, parse(lo)?, parse(hi)?)
    }
}

/// Self-assessed ratings on the 1..=9 scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratings {
    valence: f64,
    arousal: f64,
}

impl Ratings {
    pub fn new(valence: f64, arousal: f64) -> Result<Self> {
        check_rating(valence)?;
        check_rating(arousal)?;
        Ok(Ratings { valence, arousal })
    }

    pub fn valence(&self) -> f64 {
        self.valence
    }

    pub fn arousal(&self) -> f64 {
        self.arousal
    }
}

fn check_rating(rating: f64) -> Result<()> {
    if !(1.0..=9.0).contains(&rating) {
        return Err(Error::validation(format!("rating {rating} outside [1, 9]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Low,
    High,
}

/// Arousal-first quadrant naming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quadrant {
    Lalv,
    Lahv,
    Halv,
    Hahv,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::Lalv,
        Quadrant::Lahv,
        Quadrant::Halv,
        Quadrant::Hahv,
    ];

    pub fn from_levels(arousal: Level, valence: Level) -> Self {
        match (arousal, valence) {
            (Level::Low, Level::Low) => Quadrant::Lalv,
            (Level::Low, Level::High) => Quadrant::Lahv,
            (Level::High, Level::Low) => Quadrant::Halv,
            (Level::High, Level::High) => Quadrant::Hahv,
        }
    }

    pub fn arousal(self) -> Level {
        match self {
            Quadrant::Lalv | Quadrant::Lahv => Level::Low,
            Quadrant::Halv | Quadrant::Hahv => Level::High,
        }
    }

    pub fn valence(self) -> Level {
        match self {
            Quadrant::Lalv | Quadrant::Halv => Level::Low,
            Quadrant::Lahv | Quadrant::Hahv => Level::High,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    TwoClassArousal,
    TwoClassValence,
    FourClassQuadrant,
}

impl Task {
    pub fn n_classes(self) -> usize {
        match self {
            Task::TwoClassArousal | Task::TwoClassValence => 2,
            Task::FourClassQuadrant => 4,
        }
    }

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            Task::TwoClassArousal | Task::TwoClassValence => &["Low", "High"],
            Task::FourClassQuadrant => &["LALV", "LAHV", "HALV", "HAHV"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::TwoClassArousal => "arousal2",
            Task::TwoClassValence => "valence2",
            Task::FourClassQuadrant => "quadrant4",
        }
    }

    pub fn label(self, ratings: &Ratings, threshold: f64) -> Result<ClassLabel> {
        Ok(match self {
            Task::TwoClassArousal => {
                ClassLabel::level(self, binarize_rating(ratings.arousal, threshold)?)
            }
            Task::TwoClassValence => {
                ClassLabel::level(self, binarize_rating(ratings.valence, threshold)?)
            }
            Task::FourClassQuadrant => ClassLabel::quadrant(quadrant_label(ratings, threshold)?),
        })
    }
}

impl Serialize for Task {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "arousal2" => Ok(Task::TwoClassArousal),
            "valence2" => Ok(Task::TwoClassValence),
            "quadrant4" => Ok(Task::FourClassQuadrant),
            other => Err(Error::validation(format!(
                "unknown task {other:?} (expected arousal2, valence2 or quadrant4)"
            ))),
        }
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A class label tied to its task. The ordinal orders classes for tie-breaks:
/// Low < High and LALV < LAHV < HALV < HAHV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassLabel {
    task: Task,
    ordinal: u8,
}

impl ClassLabel {
    pub fn level(task: Task, level: Level) -> Self {
        assert!(
            task != Task::FourClassQuadrant,
            "level label for a four-class task"
        );
        ClassLabel {
            task,
            ordinal: level as u8,
        }
    }

    pub fn quadrant(q: Quadrant) -> Self {
        ClassLabel {
            task: Task::FourClassQuadrant,
            ordinal: q as u8,
        }
    }

    pub fn from_ordinal(task: Task, ordinal: usize) -> Result<Self> {
        if ordinal >= task.n_classes() {
            return Err(Error::validation(format!(
                "class ordinal {ordinal} invalid for {task}"
            )));
        }
        Ok(ClassLabel {
            task,
            ordinal: ordinal as u8,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn ordinal(&self) -> usize {
        self.ordinal as usize
    }

    pub fn name(&self) -> &'static str {
        self.task.class_names()[self.ordinal()]
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `High` iff `rating >= threshold`.
pub fn binarize_rating(rating: f64, threshold: f64) -> Result<Level> {
    check_rating(rating)?;
    if !(threshold > 1.0 && threshold < 9.0) {
        return Err(Error::validation(format!(
            "threshold {threshold} outside (1, 9)"
        )));
    }
    Ok(if rating >= threshold {
        Level::High
    } else {
        Level::Low
    })
}

pub fn quadrant_label(ratings: &Ratings, threshold: f64) -> Result<Quadrant> {
    Ok(Quadrant::from_levels(
        binarize_rating(ratings.arousal, threshold)?,
        binarize_rating(ratings.valence, threshold)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HjorthParameter {
    Activity,
    Mobility,
    Complexity,
}

impl HjorthParameter {
    pub const ALL: [HjorthParameter; 3] = [
        HjorthParameter::Activity,
        HjorthParameter::Mobility,
        HjorthParameter::Complexity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HjorthParameter::Activity => "activity",
            HjorthParameter::Mobility => "mobility",
            HjorthParameter::Complexity => "complexity",
        }
    }
}

/// Provenance of one feature column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureColumn {
    pub channel_index: usize,
    pub channel_name: String,
    pub band: BandName,
    pub window_index: usize,
    pub parameter: HjorthParameter,
}

impl FeatureColumn {
    /// Stable column header, e.g. `c03_F7.beta.w2.mobility`.
    pub fn header(&self) -> String {
        format!(
            "c{:02}_{}.{}.w{}.{}",
            self.channel_index,
            self.channel_name.replace([' ', ','], "_"),
            self.band,
            self.window_index,
            self.parameter.as_str()
        )
    }
}

/// Samples x features table with per-column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Array2<f64>,
    columns: Vec<FeatureColumn>,
}

impl FeatureMatrix {
    pub fn new(data: Array2<f64>, columns: Vec<FeatureColumn>) -> Result<Self> {
        if data.ncols() != columns.len() {
            return Err(Error::validation(format!(
                "{} column descriptors for {} columns",
                columns.len(),
                data.ncols()
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(columns.len());
        for c in &columns {
            if !seen.insert(c) {
                return Err(Error::validation(format!(
                    "duplicate feature column {}",
                    c.header()
                )));
            }
        }
        if let Some(((r, c), _)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite feature at row {r}, column {c}"
            )));
        }
        Ok(FeatureMatrix { data, columns })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.data.ncols()
    }

    /// Keep only the columns satisfying `keep`, preserving order.
    pub fn select_columns(&self, keep: impl Fn(&FeatureColumn) -> bool) -> FeatureMatrix {
        let idx: Vec<usize> = (0..self.columns.len())
            .filter(|&i| keep(&self.columns[i]))
            .collect();
        FeatureMatrix {
            data: self.data.select(ndarray::Axis(1), &idx),
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
        }
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }
}
