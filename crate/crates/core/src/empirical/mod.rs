//! Empirical entropy of a dataset of sparse lookups.
//!
//! A scan canonicalizes each lookup into a [`CombinationKey`], counts how often
//! each combination occurs, and turns the counts into a plug-in entropy
//! estimate that can be set against the uniform roofline.

mod canonical;
mod histogram;
mod reader;
mod report;

pub use canonical::{
    canonicalize, quantize, CombinationKey, ScanParams, WeightRange, MAX_WEIGHT_BITS,
};
pub use histogram::{scan, scan_parallel, scan_shard, CombinationHistogram};
pub use reader::{read_records, Dataset, InputFormat, LookupRecord};
pub use report::{empirical_entropy, EmpiricalReport, REPORT_WIDTHS};
