use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One observed lookup: the selected item ids and, optionally, their weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookupRecord {
    pub indices: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl LookupRecord {
    pub fn binary(indices: Vec<u64>) -> Self {
        Self {
            indices,
            weights: None,
        }
    }

    pub fn weighted(indices: Vec<u64>, weights: Vec<f64>) -> Self {
        Self {
            indices,
            weights: Some(weights),
        }
    }

    /// Checks indices against the item count and weights for shape and finiteness.
    pub fn validate(&self, n: u64) -> Result<()> {
        if let Some(&i) = self.indices.iter().find(|&&i| i >= n) {
            return Err(Error::record(format!("index {i} outside [0, {n})")));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.indices.len() {
                return Err(Error::record(format!(
                    "{} weights for {} indices",
                    w.len(),
                    self.indices.len()
                )));
            }
            if let Some(x) = w.iter().find(|x| !x.is_finite()) {
                return Err(Error::record(format!("weight {x} is not finite")));
            }
        }
        Ok(())
    }
}

/// Line syntax of an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    /// JSON when the line starts with `{`, text otherwise.
    #[default]
    Auto,
    /// `{"indices": [...], "weights": [...]}` per line.
    Json,
    /// Whitespace-separated item ids per line.
    Text,
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Auto => "auto",
            InputFormat::Json => "json",
            InputFormat::Text => "text",
        })
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(InputFormat::Auto),
            "json" => Ok(InputFormat::Json),
            "text" => Ok(InputFormat::Text),
            _ => Err(Error::domain(format!("unknown input format '{s}'"))),
        }
    }
}

/// Records parsed from a line-delimited file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<LookupRecord>,
    /// Non-blank lines that did not parse.
    pub malformed: u64,
}

fn parse_text(line: &str) -> Option<LookupRecord> {
    line.split_whitespace()
        .map(|tok| tok.parse::<u64>().ok())
        .collect::<Option<Vec<_>>>()
        .map(LookupRecord::binary)
}

fn parse_line(line: &str, format: InputFormat) -> Option<LookupRecord> {
    match format {
        InputFormat::Json => serde_json::from_str(line).ok(),
        InputFormat::Text => parse_text(line),
        InputFormat::Auto if line.starts_with('{') => serde_json::from_str(line).ok(),
        InputFormat::Auto => parse_text(line),
    }
}

/// Reads one record per line. Blank lines are ignored, unparsable lines are
/// counted in [`Dataset::malformed`], and read failures report their
/// one-based line number.
pub fn read_records<R: BufRead>(reader: R, format: InputFormat) -> Result<Dataset> {
    let mut out = Dataset::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            line: i + 1,
            source,
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line, format) {
            Some(r) => out.records.push(r),
            None => out.malformed += 1,
        }
    }
    Ok(out)
}
