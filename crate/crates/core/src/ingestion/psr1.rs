//! PSR1 recording files.
//!
//! Little-endian layout:
//!
//! | field         | type                          |
//! |---------------|-------------------------------|
//! | magic         | `b"PSR1"`                     |
//! | version       | u16 (= 1)                     |
//! | subject_id    | u16                           |
//! | trial_id      | u16                           |
//! | n_channels    | u16                           |
//! | n_samples     | u32                           |
//! | sampling_rate | f32                           |
//! | names         | per channel: u8 length, UTF-8 |
//! | payload       | f32, channel-major            |
//!
//! Samples are narrowed from f64 to f32 with round-to-nearest-even (`as f32`)
//! and widened exactly on read.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::Recording;

pub const MAGIC: &[u8; 4] = b"PSR1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 20;

/// `s{subject:02}_t{trial:02}.psr1`
pub fn recording_file_name(subject: u16, trial: u16) -> String {
    format!("s{subject:02}_t{trial:02}.psr1")
}

pub fn encode_recording(rec: &Recording) -> Result<Vec<u8>> {
    let n_ch = u16::try_from(rec.n_channels()).map_err(|_| {
        Error::validation(format!(
            "{} channels exceed the u16 limit",
            rec.n_channels()
        ))
    })?;
    let n_samp = u32::try_from(rec.n_samples()).map_err(|_| {
        Error::validation(format!("{} samples exceed the u32 limit", rec.n_samples()))
    })?;
    let fs = rec.sampling_rate() as f32;
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::validation(format!(
            "sampling rate {} not representable as f32",
            rec.sampling_rate()
        )));
    }
    let names_len: usize = rec.channel_names().iter().map(|n| 1 + n.len()).sum();
    let mut out =
        Vec::with_capacity(HEADER_LEN + names_len + 4 * rec.n_channels() * rec.n_samples());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&rec.subject_id().to_le_bytes());
    out.extend_from_slice(&rec.trial_id().to_le_bytes());
    out.extend_from_slice(&n_ch.to_le_bytes());
    out.extend_from_slice(&n_samp.to_le_bytes());
    out.extend_from_slice(&fs.to_le_bytes());
    for name in rec.channel_names() {
        let len = u8::try_from(name.len()).map_err(|_| {
            Error::validation(format!("channel name {name:?} longer than 255 bytes"))
        })?;
        out.push(len);
        out.extend_from_slice(name.as_bytes());
    }
    for ((c, s), &v) in rec.samples().indexed_iter() {
        let x = v as f32;
        if !x.is_finite() {
            return Err(Error::Data(format!(
                "value {v} at channel {c}, sample {s} overflows f32"
            )));
        }
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

pub fn write_recording(rec: &Recording, path: &Path) -> Result<()> {
    let bytes = encode_recording(rec)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

/// `path` is used only in error messages.
pub fn decode_recording(bytes: &[u8], path: &Path) -> Result<Recording> {
    let corrupt = |expected: usize| Error::Corruption {
        path: path.to_path_buf(),
        expected: expected as u64,
        actual: bytes.len() as u64,
    };
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::format(path, "missing PSR1 magic"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(HEADER_LEN));
    }
    let version = u16_at(bytes, 4);
    if version != VERSION {
        return Err(Error::format(
            path,
            format!("unsupported version {version}"),
        ));
    }
    let subject = u16_at(bytes, 6);
    let trial = u16_at(bytes, 8);
    let n_ch = u16_at(bytes, 10) as usize;
    let n_samp = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let fs = f32::from_le_bytes(bytes[16..20].try_into().unwrap());
    if n_ch == 0 || n_samp == 0 {
        return Err(Error::format(
            path,
            format!("{n_ch} channels x {n_samp} samples"),
        ));
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::format(path, format!("sampling rate {fs}")));
    }

    let mut at = HEADER_LEN;
    let mut names = Vec::with_capacity(n_ch);
    for c in 0..n_ch {
        let len = *bytes.get(at).ok_or_else(|| corrupt(at + 1))? as usize;
        let raw = bytes
            .get(at + 1..at + 1 + len)
            .ok_or_else(|| corrupt(at + 1 + len))?;
        let name = std::str::from_utf8(raw)
            .map_err(|_| Error::format(path, format!("channel {c} name is not UTF-8")))?;
        if names.iter().any(|n: &String| n == name) {
            return Err(Error::format(
                path,
                format!("duplicate channel name {name:?}"),
            ));
        }
        names.push(name.to_string());
        at += 1 + len;
    }

    let expected = at + 4 * n_ch * n_samp;
    if bytes.len() != expected {
        return Err(corrupt(expected));
    }
    let mut data = Array2::zeros((n_ch, n_samp));
    for (k, chunk) in bytes[at..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        let (c, s) = (k / n_samp, k % n_samp);
        if !v.is_finite() {
            return Err(Error::Data(format!(
                "{}: non-finite value at channel {c}, sample {s}",
                path.display()
            )));
        }
        data[[c, s]] = v as f64;
    }
    Recording::new(subject, trial, fs as f64, names, data)
}

pub fn read_recording(path: &Path) -> Result<Recording> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_recording(&bytes, path)
}
