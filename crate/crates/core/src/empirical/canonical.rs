use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LookupRecord;
use crate::{Error, Result};

/// Widest weight code a scan will produce.
pub const MAX_WEIGHT_BITS: u32 = 32;

/// Closed interval weights are quantized over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRange {
    lo: f64,
    hi: f64,
}

impl WeightRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!(
                "weight range needs finite lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Range spanning the observed extremes. A single observed value `v`
    /// becomes `[v, v + 1]`, so every weight quantizes to code 0.
    pub fn spanning(min: f64, max: f64) -> Result<Self> {
        if min == max {
            Self::new(min, min + 1.0)
        } else {
            Self::new(min, max)
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Parameters a histogram was built with. Histograms merge only when these
/// match exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub n: u64,
    pub t: u32,
    pub weight_range: Option<WeightRange>,
}

impl ScanParams {
    pub fn new(n: u64, t: u32, weight_range: Option<WeightRange>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("item count n must be at least 1"));
        }
        if t > MAX_WEIGHT_BITS {
            return Err(Error::domain(format!(
                "weight bits t = {t} exceeds {MAX_WEIGHT_BITS}"
            )));
        }
        if t > 0 && weight_range.is_none() {
            return Err(Error::domain("weighted scans need a weight range"));
        }
        Ok(Self {
            n,
            t,
            weight_range: if t == 0 { None } else { weight_range },
        })
    }

    /// First pass of a weighted scan: the range is the global min and max of
    /// the duplicate-merged weights of every valid record. For `t = 0` no pass
    /// is made.
    pub fn observe(records: &[LookupRecord], n: u64, t: u32) -> Result<Self> {
        if t == 0 {
            return Self::new(n, 0, None);
        }
        let mut bounds: Option<(f64, f64)> = None;
        for r in records {
            if r.validate(n).is_err() {
                continue;
            }
            let Some(weights) = &r.weights else { continue };
            for w in merge_duplicates(&r.indices, weights).into_values() {
                bounds = Some(match bounds {
                    None => (w, w),
                    Some((lo, hi)) => (lo.min(w), hi.max(w)),
                });
            }
        }
        let range = match bounds {
            Some((lo, hi)) => Some(WeightRange::spanning(lo, hi)?),
            // nothing weighted: every record will be skipped anyway
            None => Some(WeightRange::new(0.0, 1.0)?),
        };
        Self::new(n, t, range)
    }
}

/// Canonical identity of a lookup combination: sorted distinct item ids, each
/// followed by its weight code in weighted scans.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CombinationKey(Box<[u8]>);

impl CombinationKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CombinationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.0))
    }
}

impl Serialize for CombinationKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(&self.0))
    }
}

impl<'de> Deserialize<'de> for CombinationKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        hex::decode(s)
            .map(|b| CombinationKey(b.into_boxed_slice()))
            .map_err(serde::de::Error::custom)
    }
}

fn merge_duplicates(indices: &[u64], weights: &[f64]) -> BTreeMap<u64, f64> {
    let mut merged = BTreeMap::new();
    for (&i, &w) in indices.iter().zip(weights) {
        *merged.entry(i).or_insert(0.0) += w;
    }
    merged
}

/// Uniform `t`-bit code for `w`: the position of `w` in `range` scaled to
/// `2^t` steps, rounded half-to-even and saturated to `[0, 2^t - 1]`.
pub fn quantize(w: f64, t: u32, range: WeightRange) -> u32 {
    debug_assert!((1..=MAX_WEIGHT_BITS).contains(&t));
    let steps = (1u64 << t) as f64;
    let x = ((w - range.lo) / (range.hi - range.lo)).clamp(0.0, 1.0);
    let code = (x * steps).round_ties_even().min(steps - 1.0);
    code as u32
}

/// Maps a record to its combination key.
///
/// Duplicate indices are merged by summing their weights before sorting. With
/// `t = 0` weights are ignored.
pub fn canonicalize(record: &LookupRecord, params: &ScanParams) -> Result<CombinationKey> {
    record.validate(params.n)?;
    if params.t == 0 {
        let mut ids = record.indices.clone();
        ids.sort_unstable();
        ids.dedup();
        let bytes: Vec<u8> = ids.iter().flat_map(|i| i.to_be_bytes()).collect();
        return Ok(CombinationKey(bytes.into_boxed_slice()));
    }
    let weights = record
        .weights
        .as_deref()
        .ok_or_else(|| Error::record(format!("weighted scan (t = {}) needs weights", params.t)))?;
    let range = params
        .weight_range
        .ok_or_else(|| Error::domain("weighted scan without a weight range"))?;
    let merged = merge_duplicates(&record.indices, weights);
    let mut bytes = Vec::with_capacity(merged.len() * 12);
    for (i, w) in merged {
        bytes.extend_from_slice(&i.to_be_bytes());
        bytes.extend_from_slice(&quantize(w, params.t, range).to_be_bytes());
    }
    Ok(CombinationKey(bytes.into_boxed_slice()))
}

/// Number of distinct item ids in a record.
pub(super) fn distinct_len(record: &LookupRecord) -> u64 {
    let mut ids = record.indices.clone();
    ids.sort_unstable();
    ids.dedup();
    ids.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(n: u64) -> ScanParams {
        ScanParams::new(n, 0, None).unwrap()
    }

    #[test]
    fn order_invariant() {
        let p = binary(10);
        let a = canonicalize(&LookupRecord::binary(vec![2, 1]), &p).unwrap();
        let b = canonicalize(&LookupRecord::binary(vec![1, 2]), &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicates_merge_and_weights_drop_at_t0() {
        let p = binary(10);
        let a = canonicalize(
            &LookupRecord::weighted(vec![1, 1, 2], vec![0.5, 0.5, 1.0]),
            &p,
        )
        .unwrap();
        let b = canonicalize(&LookupRecord::binary(vec![1, 2]), &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn midpoint_of_two_cell_quantizer() {
        let range = WeightRange::new(0.0, 1.0).unwrap();
        // position 0.5 scaled to 2 steps is exactly 1.0
        assert_eq!(quantize(0.5, 1, range), 1);
        let p = ScanParams::new(10, 1, Some(range)).unwrap();
        let key = canonicalize(&LookupRecord::weighted(vec![1], vec![0.5]), &p).unwrap();
        let mut expected = 1u64.to_be_bytes().to_vec();
        expected.extend_from_slice(&1u32.to_be_bytes());
        assert_eq!(key.as_bytes(), &expected[..]);
    }

    #[test]
    fn quantizer_ties_go_to_even() {
        let range = WeightRange::new(0.0, 1.0).unwrap();
        // 0.25 * 2 = 0.5 -> 0, 0.75 * 2 = 1.5 -> 2 -> saturates at 1
        assert_eq!(quantize(0.25, 1, range), 0);
        assert_eq!(quantize(0.75, 1, range), 1);
        // 2 bits: 0.375 * 4 = 1.5 -> 2, 0.625 * 4 = 2.5 -> 2
        assert_eq!(quantize(0.375, 2, range), 2);
        assert_eq!(quantize(0.625, 2, range), 2);
        assert_eq!(quantize(-3.0, 2, range), 0);
        assert_eq!(quantize(7.0, 2, range), 3);
    }

    #[test]
    fn weighted_keys_distinguish_codes() {
        let p = ScanParams::new(10, 2, Some(WeightRange::new(0.0, 1.0).unwrap())).unwrap();
        let a = canonicalize(&LookupRecord::weighted(vec![3], vec![0.1]), &p).unwrap();
        let b = canonicalize(&LookupRecord::weighted(vec![3], vec![0.9]), &p).unwrap();
        assert_ne!(a, b);
        // 0.3 + 0.3 merges to 0.6, same cell as 0.6
        let c = canonicalize(&LookupRecord::weighted(vec![3, 3], vec![0.3, 0.3]), &p).unwrap();
        let d = canonicalize(&LookupRecord::weighted(vec![3], vec![0.6]), &p).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn record_errors() {
        let p = binary(4);
        assert!(matches!(
            canonicalize(&LookupRecord::binary(vec![4]), &p),
            Err(Error::Record(_))
        ));
        let w = ScanParams::new(4, 3, Some(WeightRange::new(0.0, 1.0).unwrap())).unwrap();
        assert!(matches!(
            canonicalize(&LookupRecord::binary(vec![1]), &w),
            Err(Error::Record(_))
        ));
    }

    #[test]
    fn params_validation() {
        assert!(ScanParams::new(0, 0, None).is_err());
        assert!(ScanParams::new(5, 1, None).is_err());
        assert!(ScanParams::new(5, 33, Some(WeightRange::new(0.0, 1.0).unwrap())).is_err());
        assert!(WeightRange::new(1.0, 1.0).is_err());
        assert_eq!(WeightRange::spanning(2.0, 2.0).unwrap().hi(), 3.0);
    }

    #[test]
    fn observed_range_uses_merged_weights() {
        let records = vec![
            LookupRecord::weighted(vec![1, 1], vec![2.0, 3.0]),
            LookupRecord::weighted(vec![2], vec![-1.0]),
            LookupRecord::weighted(vec![99], vec![100.0]),
        ];
        let p = ScanParams::observe(&records, 10, 4).unwrap();
        let r = p.weight_range.unwrap();
        assert_eq!((r.lo(), r.hi()), (-1.0, 5.0));
    }

    #[test]
    fn key_hex_round_trip() {
        let key = canonicalize(&LookupRecord::binary(vec![5, 3]), &binary(10)).unwrap();
        let json = serde_json::to_string(&key).unwrap();
        assert_eq!(serde_json::from_str::<CombinationKey>(&json).unwrap(), key);
    }
}
