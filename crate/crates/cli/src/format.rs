//! CSV and JSON encodings of command output.

use std::collections::BTreeMap;

use embdim::{EntropyCurve, EntropyMethod, RooflineRow, Rounding};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One row of the sample-signature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub n: u64,
    pub k: u64,
    pub h_bits: f64,
    pub d_s8: u64,
    pub d_s16: u64,
    pub d_s32: u64,
    pub h_embedding: u64,
}

impl TableRecord {
    pub fn from_row(row: &RooflineRow) -> Self {
        let d = |s| row.d_by_s.get(&s).copied().unwrap_or(0);
        Self {
            n: row.signature.n(),
            k: row.signature.k(),
            h_bits: row.h_lookup.bits(),
            d_s8: d(8),
            d_s16: d(16),
            d_s32: d(32),
            h_embedding: row.h_embedding.bits() as u64,
        }
    }
}

pub const TABLE_HEADER: &str = "n,k,h_bits,d_s8,d_s16,d_s32,h_embedding";

/// Table CSV; entropies are printed with one decimal.
pub fn table_csv(records: &[TableRecord]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{:.1},{},{},{},{}\n",
            r.n, r.k, r.h_bits, r.d_s8, r.d_s16, r.d_s32, r.h_embedding
        ));
    }
    out
}

fn read_csv<T: for<'de> Deserialize<'de>>(text: &str, header: &str) -> Result<Vec<T>, CliError> {
    let first = text.lines().next().unwrap_or_default();
    if first != header {
        return Err(CliError::Validation(format!(
            "unexpected CSV header '{first}'"
        )));
    }
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Validation(format!("malformed CSV: {e}")))
}

pub fn parse_table_csv(text: &str) -> Result<Vec<TableRecord>, CliError> {
    read_csv(text, TABLE_HEADER)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    /// Present only for grouped (multi-`n`) output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub k: u64,
    pub h_bits: f64,
}

pub const CURVE_HEADER: &str = "k,h_bits";
pub const GROUPED_CURVE_HEADER: &str = "n,k,h_bits";

pub fn curve_records(curves: &[EntropyCurve], grouped: bool) -> Vec<CurveRecord> {
    curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |&(k, h)| CurveRecord {
                n: grouped.then_some(c.n),
                k,
                h_bits: h,
            })
        })
        .collect()
}

/// Curve CSV at full precision (shortest round-trip decimal).
pub fn curve_csv(records: &[CurveRecord]) -> String {
    let grouped = records.first().is_some_and(|r| r.n.is_some());
    let mut out = String::from(if grouped {
        GROUPED_CURVE_HEADER
    } else {
        CURVE_HEADER
    });
    out.push('\n');
    for r in records {
        match r.n {
            Some(n) => out.push_str(&format!("{n},{},{:?}\n", r.k, r.h_bits)),
            None => out.push_str(&format!("{},{:?}\n", r.k, r.h_bits)),
        }
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRecord>, CliError> {
    if text.starts_with(GROUPED_CURVE_HEADER) {
        read_csv(text, GROUPED_CURVE_HEADER)
    } else {
        read_csv(text, CURVE_HEADER)
    }
}

/// Entropy of one signature under one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: EntropyMethod,
    pub h_bits: f64,
    /// Recommended dimension keyed by element width.
    pub recommended_d: BTreeMap<u32, u64>,
    /// `d * s` for each recommendation.
    pub capacity_bits: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RooflineReport {
    pub n: u64,
    pub k: u64,
    pub t: u32,
    pub rounding: Rounding,
    pub reports: Vec<MethodReport>,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("cannot encode JSON: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_csv_round_trips() {
        let rows = vec![TableRecord {
            n: 10_000_000,
            k: 100,
            h_bits: 1656.314,
            d_s8: 208,
            d_s16: 104,
            d_s32: 52,
            h_embedding: 1664,
        }];
        let text = table_csv(&rows);
        assert_eq!(
            text,
            "n,k,h_bits,d_s8,d_s16,d_s32,h_embedding\n10000000,100,1656.3,208,104,52,1664\n"
        );
        assert_eq!(table_csv(&parse_table_csv(&text).unwrap()), text);
    }

    #[test]
    fn curve_csv_round_trips() {
        let single = vec![CurveRecord {
            n: None,
            k: 1,
            h_bits: 6.0,
        }];
        let text = curve_csv(&single);
        assert_eq!(text, "k,h_bits\n1,6.0\n");
        assert_eq!(parse_curve_csv(&text).unwrap(), single);
        let grouped = vec![CurveRecord {
            n: Some(64),
            k: 3,
            h_bits: 15.310_694_927_259_986,
        }];
        let text = curve_csv(&grouped);
        assert_eq!(curve_csv(&parse_curve_csv(&text).unwrap()), text);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(parse_table_csv("a,b\n1,2\n").is_err());
    }
}
