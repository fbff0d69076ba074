//! Information-entropy rooflines for sparse embedding lookups.
//!
//! A sparse feature that selects `k` of `n` items, each with a `t`-bit
//! weight, can carry at most `tk + log2 C(n, k)` bits per lookup. An
//! embedding vector of `d` elements of `s` bits can carry at most `d * s`.
//! This crate computes the first number accurately at production scale
//! ([`entropy`]), turns it into dimension recommendations ([`sizing`]),
//! measures what a real dataset actually uses ([`empirical`]), and checks the
//! lookup algebra itself against dense products ([`kernels`], [`verify`]).
//!
//! The numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what all reported values use.

pub mod empirical;
pub mod entropy;
mod error;
pub mod kernels;
mod scalar;
pub mod sizing;
pub mod summation;
pub mod verify;

pub use empirical::{
    canonicalize, empirical_entropy, read_records, scan, scan_parallel, CombinationHistogram,
    CombinationKey, InputFormat, LookupRecord,
};
pub use entropy::{
    embedding_entropy_uniform, entropy_of_distribution, log2_binomial, log2_factorial,
    multi_lookup_entropy, single_lookup_entropy, weighted_lookup_entropy, EntropyMethod,
    LookupSignature,
};
pub use error::{Error, Result};
pub use kernels::{gather_single, lookup_batch, lookup_weighted};
pub use scalar::Real;
pub use sizing::{entropy_curve, recommend_dim, roofline_table, EmbeddingSpec, Rounding};

pub type Bits = entropy::EntropyBits<f64>;
pub type Distribution = entropy::Distribution<f64>;
pub type EmbeddingTable = kernels::EmbeddingTable<f64>;
pub type SparseLookup = kernels::SparseLookup<f64>;
pub type LookupBatch = kernels::LookupBatch<f64>;
pub type RooflineRow = sizing::RooflineRow<f64>;
pub type EntropyCurve = sizing::EntropyCurve<f64>;
pub type EmpiricalReport = empirical::EmpiricalReport<f64>;

pub type Bits32 = entropy::EntropyBits<f32>;
pub type EmbeddingTable32 = kernels::EmbeddingTable<f32>;
pub type SparseLookup32 = kernels::SparseLookup<f32>;
