//! Recording files, label files and the synthetic corpus generator.

pub mod labels;
pub mod psr1;
pub mod synth;

pub use labels::{read_labels, write_labels, LabelMap};
pub use psr1::{
    decode_recording, encode_recording, read_recording, recording_file_name, write_recording,
};
pub use synth::{
    generate_synthetic_corpus, write_corpus, BandPowerProfile, ChannelLayout, SynthSpec,
    SyntheticCorpus,
};
