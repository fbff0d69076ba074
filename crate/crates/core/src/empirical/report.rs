use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CombinationHistogram;
use crate::entropy::{weighted_lookup_entropy, EntropyBits, EntropyMethod, LookupSignature};
use crate::sizing::{recommend_dim, Rounding};
use crate::summation::NeumaierSum;
use crate::{Error, Real, Result};

/// Element widths a report recommends dimensions for.
pub const REPORT_WIDTHS: [u32; 3] = [8, 16, 32];

const UNDERSAMPLING_CAVEAT: &str = "plug-in estimate over observed combinations only; \
     unseen combinations are not corrected for, so undersampled data underestimates entropy";

/// Measured entropy of a scanned dataset next to its uniform roofline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport<T> {
    pub distinct: u64,
    pub total: u64,
    pub h_empirical_bits: EntropyBits<T>,
    /// Uniform entropy of `(n, k_max, t)`.
    pub h_roofline_bits: EntropyBits<T>,
    pub k_max: u64,
    /// Ceil-rounded dimension for `h_empirical_bits`, keyed by element width.
    pub recommended_d: BTreeMap<u32, u64>,
    pub skipped_records: u64,
    /// Lookup count per number of distinct selected items.
    pub k_breakdown: BTreeMap<u64, u64>,
    pub caveat: String,
}

/// Plug-in (maximum-likelihood) entropy of the observed combination
/// frequencies, `-sum (c/N) log2 (c/N)`.
pub fn empirical_entropy<T: Real>(hist: &CombinationHistogram) -> Result<EmpiricalReport<T>> {
    if hist.is_empty() {
        return Err(Error::domain("histogram is empty"));
    }
    let total = T::count(hist.total());
    let h = hist
        .counts()
        .values()
        .map(|&c| {
            let p = T::count(c) / total;
            -(p * p.log2())
        })
        .sum::<NeumaierSum<T>>()
        .total();
    let ceiling = T::count(hist.distinct()).log2();
    let h_empirical = EntropyBits::new(h.max(T::zero()).min(ceiling))?;

    let params = hist.params();
    let k_max = hist.k_max().unwrap_or(0);
    let sig = LookupSignature::new(params.n, k_max, params.t)?;
    let h_roofline = weighted_lookup_entropy::<T>(&sig, EntropyMethod::Exact)?;

    let recommended_d = REPORT_WIDTHS
        .iter()
        .map(|&s| Ok((s, recommend_dim(h_empirical, s, Rounding::Ceil)?)))
        .collect::<Result<_>>()?;

    Ok(EmpiricalReport {
        distinct: hist.distinct(),
        total: hist.total(),
        h_empirical_bits: h_empirical,
        h_roofline_bits: h_roofline,
        k_max,
        recommended_d,
        skipped_records: hist.skipped(),
        k_breakdown: hist.k_counts().clone(),
        caveat: UNDERSAMPLING_CAVEAT.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::{scan, scan_shard, LookupRecord, ScanParams};

    fn hist(counts: &[u64]) -> CombinationHistogram {
        let mut records = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                records.push(LookupRecord::binary(vec![i as u64]));
            }
        }
        scan(&records, counts.len() as u64, 0).unwrap()
    }

    #[test]
    fn uniform_over_four() {
        let r = empirical_entropy::<f64>(&hist(&[1, 1, 1, 1])).unwrap();
        assert_eq!(r.h_empirical_bits.bits(), 2.0);
        assert_eq!(r.distinct, 4);
        assert_eq!(r.h_roofline_bits.bits(), 2.0);
    }

    #[test]
    fn skewed_pair() {
        let r = empirical_entropy::<f64>(&hist(&[3, 1])).unwrap();
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((r.h_empirical_bits.bits() - expected).abs() < 1e-15);
    }

    #[test]
    fn single_combination() {
        let r = empirical_entropy::<f64>(&hist(&[7])).unwrap();
        assert_eq!(r.h_empirical_bits.bits(), 0.0);
        assert!(r.recommended_d.values().all(|&d| d == 1));
        assert_eq!(r.recommended_d.len(), 3);
    }

    #[test]
    fn empty_histogram_rejected() {
        let h = scan_shard(&[], ScanParams::new(4, 0, None).unwrap());
        assert!(empirical_entropy::<f64>(&h).is_err());
    }

    #[test]
    fn report_json_keys() {
        let r = empirical_entropy::<f64>(&hist(&[2, 2])).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "distinct",
            "total",
            "h_empirical_bits",
            "h_roofline_bits",
            "recommended_d",
            "skipped_records",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["recommended_d"]["32"], 1);
    }
}
