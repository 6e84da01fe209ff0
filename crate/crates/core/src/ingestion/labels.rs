//! Label files: CSV with header `subject,trial,valence,arousal`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Ratings;

/// Ratings keyed by `(subject, trial)`.
pub type LabelMap = BTreeMap<(u16, u16), Ratings>;

const HEADER: [&str; 4] = ["subject", "trial", "valence", "arousal"];

/// Parses label CSV text. Row numbers in errors count the header as line 1.
pub fn parse_labels(text: &str, path: &Path) -> Result<LabelMap> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::format(path, e.to_string()))?
        .clone();
    if headers.iter().ne(HEADER) {
        return Err(Error::format(
            path,
            format!(
                "header must be {:?}, found {:?}",
                HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut out = LabelMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::format(path, format!("line {line}: {e}")))?;
        if record.len() != 4 {
            return Err(Error::validation(format!(
                "{}: line {line} has {} columns, expected 4",
                path.display(),
                record.len()
            )));
        }
        let int = |j: usize| -> Result<u16> {
            record[j].parse().map_err(|_| {
                Error::validation(format!(
                    "{}: line {line}: bad {} {:?}",
                    path.display(),
                    HEADER[j],
                    &record[j]
                ))
            })
        };
        let float = |j: usize| -> Result<f64> {
            record[j].parse().map_err(|_| {
                Error::validation(format!(
                    "{}: line {line}: bad {} {:?}",
                    path.display(),
                    HEADER[j],
                    &record[j]
                ))
            })
        };
        let key = (int(0)?, int(1)?);
        let ratings = Ratings::new(float(2)?, float(3)?)
            .map_err(|e| Error::validation(format!("{}: line {line}: {e}", path.display())))?;
        if out.insert(key, ratings).is_some() {
            return Err(Error::validation(format!(
                "{}: line {line}: duplicate subject {} trial {}",
                path.display(),
                key.0,
                key.1
            )));
        }
    }
    Ok(out)
}

pub fn read_labels(path: &Path) -> Result<LabelMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, path)
}

/// Rows in key order; ratings use the shortest round-tripping decimal form.
pub fn format_labels(labels: &LabelMap) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for (&(s, t), r) in labels {
        out.push_str(&format!("{s},{t},{},{}\n", r.valence(), r.arousal()));
    }
    out
}

pub fn write_labels(path: &Path, labels: &LabelMap) -> Result<()> {
    std::fs::write(path, format_labels(labels)).map_err(|e| Error::io(path, e))
}
