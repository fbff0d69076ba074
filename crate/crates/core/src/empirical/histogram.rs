use std::collections::BTreeMap;
use std::thread;

use serde::{Deserialize, Serialize};

use super::canonical::{canonicalize, distinct_len, CombinationKey, ScanParams};
use super::LookupRecord;
use crate::{Error, Result};

/// Occurrence counts of canonical lookup combinations.
///
/// Histograms built with the same [`ScanParams`] form a commutative monoid
/// under [`merge`](CombinationHistogram::merge), with
/// [`empty`](CombinationHistogram::empty) as identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationHistogram {
    params: ScanParams,
    counts: BTreeMap<CombinationKey, u64>,
    /// Lookups per number of distinct selected items.
    k_counts: BTreeMap<u64, u64>,
    total: u64,
    skipped: u64,
}

impl CombinationHistogram {
    pub fn empty(params: ScanParams) -> Self {
        Self {
            params,
            counts: BTreeMap::new(),
            k_counts: BTreeMap::new(),
            total: 0,
            skipped: 0,
        }
    }

    /// Counts one record, or bumps the skip counter if it is invalid.
    pub fn observe(&mut self, record: &LookupRecord) {
        match canonicalize(record, &self.params) {
            Ok(key) => {
                *self.counts.entry(key).or_insert(0) += 1;
                *self.k_counts.entry(distinct_len(record)).or_insert(0) += 1;
                self.total += 1;
            }
            Err(_) => self.skipped += 1,
        }
    }

    /// Adds records that were rejected before reaching the histogram, such as
    /// unparsable input lines.
    pub fn add_skipped(&mut self, count: u64) {
        self.skipped += count;
    }

    /// Combines two histograms built with identical parameters.
    pub fn merge(mut self, other: &CombinationHistogram) -> Result<Self> {
        if self.params != other.params {
            return Err(Error::Merge(format!(
                "scan parameters differ: {:?} vs {:?}",
                self.params, other.params
            )));
        }
        for (key, &c) in &other.counts {
            *self.counts.entry(key.clone()).or_insert(0) += c;
        }
        for (&k, &c) in &other.k_counts {
            *self.k_counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
        self.skipped += other.skipped;
        Ok(self)
    }

    pub fn params(&self) -> &ScanParams {
        &self.params
    }

    pub fn counts(&self) -> &BTreeMap<CombinationKey, u64> {
        &self.counts
    }

    pub fn k_counts(&self) -> &BTreeMap<u64, u64> {
        &self.k_counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    /// Largest number of distinct items in any counted lookup.
    pub fn k_max(&self) -> Option<u64> {
        self.k_counts.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Counts one shard of records with fixed parameters. Never fails; invalid
/// records are skipped.
pub fn scan_shard<'a, I>(records: I, params: ScanParams) -> CombinationHistogram
where
    I: IntoIterator<Item = &'a LookupRecord>,
{
    let mut hist = CombinationHistogram::empty(params);
    for r in records {
        hist.observe(r);
    }
    hist
}

fn non_empty(hist: CombinationHistogram) -> Result<CombinationHistogram> {
    if hist.is_empty() {
        Err(Error::EmptyInput)
    } else {
        Ok(hist)
    }
}

/// Two-pass scan: observe the weight range (weighted scans only), then count.
pub fn scan(records: &[LookupRecord], n: u64, t: u32) -> Result<CombinationHistogram> {
    let params = ScanParams::observe(records, n, t)?;
    non_empty(scan_shard(records, params))
}

/// Same result as [`scan`], with the counting pass split over `shards`
/// threads and merged.
pub fn scan_parallel(
    records: &[LookupRecord],
    n: u64,
    t: u32,
    shards: usize,
) -> Result<CombinationHistogram> {
    let params = ScanParams::observe(records, n, t)?;
    let shards = shards.max(1);
    let chunk = records.len().div_ceil(shards).max(1);
    let parts: Vec<CombinationHistogram> = thread::scope(|s| {
        let handles: Vec<_> = records
            .chunks(chunk)
            .map(|c| s.spawn(move || scan_shard(c, params)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan shard panicked"))
            .collect()
    });
    let merged = parts
        .iter()
        .try_fold(CombinationHistogram::empty(params), |acc, h| acc.merge(h))?;
    non_empty(merged)
}
