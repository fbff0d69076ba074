//! Embedding-dimension recommendations from entropy rooflines.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::{weighted_lookup_entropy, EntropyBits, EntropyMethod, LookupSignature};
use crate::{multi_lookup_entropy, Error, Real, Result};

/// Element widths an embedding can be stored in.
pub const ELEMENT_BITS: [u32; 4] = [8, 16, 32, 64];

/// Element widths used by the sample-signature table.
pub const TABLE_ELEMENT_BITS: [u32; 3] = [8, 16, 32];

/// An embedding vector of `d` elements, `s` bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    d: u64,
    s: u32,
}

impl EmbeddingSpec {
    pub fn new(d: u64, s: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("embedding dimension d must be at least 1"));
        }
        check_element_bits(s)?;
        Ok(Self { d, s })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn capacity_bits(&self) -> u64 {
        self.d * u64::from(self.s)
    }
}

fn check_element_bits(s: u32) -> Result<()> {
    if ELEMENT_BITS.contains(&s) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "element width s = {s} is not one of 8, 16, 32, 64"
        )))
    }
}

/// How a required entropy is turned into a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// Smallest `d` with `d * s >= H`.
    #[default]
    Ceil,
    /// Pick `d` at 32-bit elements, then scale by `32 / s`. This is the rule
    /// the printed sample-signature table follows.
    TableCompat,
}

impl Rounding {
    pub fn name(self) -> &'static str {
        match self {
            Rounding::Ceil => "ceil",
            Rounding::TableCompat => "table-compat",
        }
    }
}

impl fmt::Display for Rounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ceil" => Ok(Rounding::Ceil),
            "table-compat" => Ok(Rounding::TableCompat),
            _ => Err(Error::domain(format!(
                "unknown rounding '{s}' (expected ceil or table-compat)"
            ))),
        }
    }
}

fn ceil_div<T: Real>(h: T, s: u32) -> Result<u64> {
    (h / T::count(u64::from(s)))
        .ceil()
        .to_u64()
        .ok_or_else(|| Error::domain(format!("entropy {h} is too large to size")))
}

/// Recommends an embedding dimension able to hold `h` bits at `s` bits per
/// element. The result always satisfies `d * s >= h` and `d >= 1`.
pub fn recommend_dim<T: Real>(h: EntropyBits<T>, s: u32, rounding: Rounding) -> Result<u64> {
    check_element_bits(s)?;
    match rounding {
        Rounding::Ceil => Ok(ceil_div(h.bits(), s)?.max(1)),
        Rounding::TableCompat => {
            if s > 32 {
                return Err(Error::domain(format!(
                    "table-compat rounding supports s in {{8, 16, 32}}, got {s}"
                )));
            }
            Ok(u64::from(32 / s) * ceil_div(h.bits(), 32)?.max(1))
        }
    }
}

/// One line of a roofline table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RooflineRow<T> {
    pub signature: LookupSignature,
    pub h_lookup: EntropyBits<T>,
    /// Recommended `d` keyed by element width.
    pub d_by_s: BTreeMap<u32, u64>,
    /// Largest capacity `d * s` across the requested widths.
    pub h_embedding: EntropyBits<T>,
}

/// Computes the lookup entropy of every signature and the dimension needed at
/// each element width. Rows come back in input order.
pub fn roofline_table<T: Real>(
    signatures: &[LookupSignature],
    s_values: &[u32],
    method: EntropyMethod,
    rounding: Rounding,
) -> Result<Vec<RooflineRow<T>>> {
    if s_values.is_empty() {
        return Err(Error::domain("at least one element width is required"));
    }
    signatures
        .iter()
        .map(|sig| {
            let h_lookup = weighted_lookup_entropy::<T>(sig, method)?;
            let mut d_by_s = BTreeMap::new();
            for &s in s_values {
                d_by_s.insert(s, recommend_dim(h_lookup, s, rounding)?);
            }
            let capacity = d_by_s
                .iter()
                .map(|(&s, &d)| d * u64::from(s))
                .max()
                .unwrap_or(0);
            Ok(RooflineRow {
                signature: *sig,
                h_lookup,
                d_by_s,
                h_embedding: EntropyBits::new(T::count(capacity))?,
            })
        })
        .collect()
}

/// Entropy of `C(n, k)` lookups as a function of `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve<T> {
    pub n: u64,
    pub points: Vec<(u64, T)>,
}

impl<T: Real> EntropyCurve<T> {
    /// The point with the largest entropy; the first one on ties.
    pub fn peak(&self) -> Option<(u64, T)> {
        self.points
            .iter()
            .copied()
            .fold(None, |best, p| match best {
                Some((_, h)) if h >= p.1 => best,
                _ => Some(p),
            })
    }
}

/// Binary-lookup entropy at every integer `k` in `k_range`.
pub fn entropy_curve<T: Real>(
    n: u64,
    k_range: RangeInclusive<u64>,
    method: EntropyMethod,
) -> Result<EntropyCurve<T>> {
    if k_range.is_empty() {
        return Err(Error::domain(format!(
            "empty k range {}:{}",
            k_range.start(),
            k_range.end()
        )));
    }
    if *k_range.end() > n {
        return Err(Error::domain(format!(
            "k = {} exceeds n = {n}",
            k_range.end()
        )));
    }
    let points = k_range
        .map(|k| {
            let sig = LookupSignature::binary(n, k)?;
            Ok((k, multi_lookup_entropy::<T>(&sig, method)?.bits()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve { n, points })
}

/// The twelve binary signatures of the sample table: `n` in {1M, 10M, 100M}
/// crossed with `k` in {1, 10, 100, 1000}, ordered by `k` then `n`.
pub fn table_signatures() -> Vec<LookupSignature> {
    let mut out = Vec::with_capacity(12);
    for k in [1, 10, 100, 1000] {
        for n in [1_000_000, 10_000_000, 100_000_000] {
            out.push(LookupSignature::binary(n, k).expect("valid built-in signature"));
        }
    }
    out
}

/// Item counts of the sample-signature entropy plot.
pub const SAMPLE_CURVE_ITEMS: [u64; 4] = [1_000_000, 10_000_000, 100_000_000, 20_000_000];

/// Selection sizes of the sample-signature entropy plot.
pub const SAMPLE_CURVE_KS: [u64; 4] = [1, 10, 100, 1000];

/// One sparse curve per `n` in [`SAMPLE_CURVE_ITEMS`], evaluated at
/// [`SAMPLE_CURVE_KS`].
pub fn sample_curves<T: Real>(method: EntropyMethod) -> Result<Vec<EntropyCurve<T>>> {
    SAMPLE_CURVE_ITEMS
        .iter()
        .map(|&n| {
            let points = SAMPLE_CURVE_KS
                .iter()
                .map(|&k| {
                    let sig = LookupSignature::binary(n, k)?;
                    Ok((k, multi_lookup_entropy::<T>(&sig, method)?.bits()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EntropyCurve { n, points })
        })
        .collect()
}
