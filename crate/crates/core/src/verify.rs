//! Randomized self-check of the lookup kernels against dense products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::kernels::{
    gather_single, lookup_batch, lookup_weighted, EmbeddingTable, LookupBatch, SparseLookup,
};
use crate::{Error, Result};

/// Relative tolerance for sums whose accumulation order differs from the
/// dense product.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelCheckConfig {
    pub n: usize,
    pub d: usize,
    /// Lookups per batch.
    pub r: usize,
    /// Entries per lookup.
    pub k: usize,
    pub seed: u64,
    /// Random instances per property; instance `i` uses seed `seed + i`.
    pub trials: u64,
    /// Corrupts one accumulation in the batch output. Negative control.
    pub inject_fault: bool,
}

impl Default for KernelCheckConfig {
    fn default() -> Self {
        Self {
            n: 128,
            d: 16,
            r: 8,
            k: 5,
            seed: 0x5eed,
            trials: 10,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Counterexample description on failure.
    pub detail: Option<String>,
}

/// `V^T x` for a dense `x`, summing rows in index order.
pub fn dense_product(table: &EmbeddingTable<f64>, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; table.d()];
    for (i, &xi) in x.iter().enumerate() {
        let row = &table.values()[i * table.d()..(i + 1) * table.d()];
        for (o, &v) in out.iter_mut().zip(row) {
            *o += v * xi;
        }
    }
    out
}

/// Largest elementwise error relative to the magnitude `sum |w v|` of the
/// terms being summed; `None` when within [`RELATIVE_TOLERANCE`].
fn compare(
    table: &EmbeddingTable<f64>,
    a: &SparseLookup<f64>,
    got: &[f64],
    want: &[f64],
) -> Option<String> {
    let mut scale = vec![0.0f64; table.d()];
    for &(i, w) in a.entries() {
        if let Ok(row) = table.row(i) {
            for (s, &v) in scale.iter_mut().zip(row) {
                *s += (w * v).abs();
            }
        }
    }
    got.iter()
        .zip(want)
        .zip(&scale)
        .enumerate()
        .find(|(_, ((g, w), s))| (*g - *w).abs() > RELATIVE_TOLERANCE * **s)
        .map(|(j, ((g, w), _))| format!("column {j}: {g} vs {w}"))
}

/// Random table with values uniform in `[-1, 1)`.
pub fn random_table(rng: &mut impl Rng, n: usize, d: usize) -> Result<EmbeddingTable<f64>> {
    let values = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    EmbeddingTable::new(n, d, values)
}

/// Random lookup of `k` entries; indices may repeat.
pub fn random_lookup(rng: &mut impl Rng, n: usize, k: usize) -> SparseLookup<f64> {
    let entries = (0..k)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(-1.0..1.0)))
        .collect();
    SparseLookup::new(entries).expect("finite weights")
}

struct Instance {
    table: EmbeddingTable<f64>,
    batch: LookupBatch<f64>,
    output: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

fn instance(cfg: &KernelCheckConfig, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = random_table(&mut rng, cfg.n, cfg.d)?;
    let batch = LookupBatch::new(
        (0..cfg.r)
            .map(|_| random_lookup(&mut rng, cfg.n, cfg.k))
            .collect(),
    )?;
    let mut output = lookup_batch(&table, &batch)?;
    if cfg.inject_fault {
        // accumulate the first entry of the first lookup a second time
        if let Some(&(i, w)) = batch.lookups()[0].entries().first() {
            let row = table.row(i)?;
            for (o, &v) in output[0].iter_mut().zip(row) {
                *o += w * v;
            }
        }
    }
    Ok(Instance {
        table,
        batch,
        output,
        rng,
    })
}

type Check = fn(&mut Instance) -> Result<Option<String>>;

fn one_hot(inst: &mut Instance) -> Result<Option<String>> {
    let n = inst.table.n();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let dense = dense_product(&inst.table, &e);
        if gather_single(&inst.table, i)? != dense {
            return Ok(Some(format!("row {i} differs from V^T e_{i}")));
        }
    }
    Ok(None)
}

fn weighted_vs_dense(inst: &mut Instance) -> Result<Option<String>> {
    let n = inst.table.n();
    // one fully dense weight vector plus the batch lookups
    let dense_all =
        SparseLookup::new((0..n).map(|i| (i, inst.rng.gen_range(-1.0..1.0))).collect())?;
    for a in std::iter::once(&dense_all).chain(inst.batch.lookups()) {
        let got = lookup_weighted(&inst.table, a)?;
        let want = dense_product(&inst.table, &a.densify(n)?);
        if let Some(msg) = compare(&inst.table, a, &got, &want) {
            return Ok(Some(msg));
        }
    }
    Ok(None)
}

fn batch_vs_dense(inst: &mut Instance) -> Result<Option<String>> {
    let n = inst.table.n();
    for (j, (a, got)) in inst.batch.lookups().iter().zip(&inst.output).enumerate() {
        let want = dense_product(&inst.table, &a.densify(n)?);
        if let Some(msg) = compare(&inst.table, a, got, &want) {
            return Ok(Some(format!("lookup {j}, {msg}")));
        }
    }
    Ok(None)
}

fn batch_rows_match_single(inst: &mut Instance) -> Result<Option<String>> {
    for (j, (a, got)) in inst.batch.lookups().iter().zip(&inst.output).enumerate() {
        if lookup_weighted(&inst.table, a)? != *got {
            return Ok(Some(format!(
                "batch row {j} differs from the single lookup"
            )));
        }
    }
    Ok(None)
}

fn permutation_independence(inst: &mut Instance) -> Result<Option<String>> {
    let mut order: Vec<usize> = (0..inst.batch.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, inst.rng.gen_range(0..=i));
    }
    let permuted = LookupBatch::new(
        order
            .iter()
            .map(|&j| inst.batch.lookups()[j].clone())
            .collect(),
    )?;
    let out = lookup_batch(&inst.table, &permuted)?;
    for (pos, &j) in order.iter().enumerate() {
        if out[pos] != inst.output[j] {
            return Ok(Some(format!(
                "row {j} changed when moved to position {pos}"
            )));
        }
    }
    Ok(None)
}

fn deletion_independence(inst: &mut Instance) -> Result<Option<String>> {
    if inst.batch.len() < 2 {
        return Ok(None);
    }
    let drop = inst.rng.gen_range(0..inst.batch.len());
    let kept: Vec<usize> = (0..inst.batch.len()).filter(|&j| j != drop).collect();
    let smaller = LookupBatch::new(
        kept.iter()
            .map(|&j| inst.batch.lookups()[j].clone())
            .collect(),
    )?;
    let out = lookup_batch(&inst.table, &smaller)?;
    for (pos, &j) in kept.iter().enumerate() {
        if out[pos] != inst.output[j] {
            return Ok(Some(format!("row {j} changed after deleting row {drop}")));
        }
    }
    Ok(None)
}

fn linearity(inst: &mut Instance) -> Result<Option<String>> {
    let n = inst.table.n();
    let a = &inst.batch.lookups()[0];
    let b = random_lookup(&mut inst.rng, n, a.len().max(1));
    let (alpha, beta): (f64, f64) = (inst.rng.gen_range(-2.0..2.0), inst.rng.gen_range(-2.0..2.0));
    let combined = a.scaled(alpha).plus(&b.scaled(beta));
    let got = lookup_weighted(&inst.table, &combined)?;
    let ua = &inst.output[0];
    let ub = lookup_weighted(&inst.table, &b)?;
    let want: Vec<f64> = ua
        .iter()
        .zip(&ub)
        .map(|(x, y)| alpha * x + beta * y)
        .collect();
    // scale by the terms of both sides
    let both = SparseLookup::new(
        a.scaled(alpha)
            .entries()
            .iter()
            .chain(b.scaled(beta).entries())
            .copied()
            .collect(),
    )?;
    Ok(compare(&inst.table, &both, &got, &want))
}

const CHECKS: [(&str, Check); 7] = [
    ("one-hot gather equals V^T e_i", one_hot),
    ("weighted lookup equals dense V^T a", weighted_vs_dense),
    ("batch lookup equals dense V^T A", batch_vs_dense),
    ("batch rows equal single lookups", batch_rows_match_single),
    (
        "batch row permutation independence",
        permutation_independence,
    ),
    ("batch row deletion independence", deletion_independence),
    ("weighted lookup linearity", linearity),
];

/// Runs every kernel property over `cfg.trials` seeded instances.
pub fn verify_kernels(cfg: &KernelCheckConfig) -> Result<Vec<PropertyOutcome>> {
    if cfg.n == 0 || cfg.d == 0 || cfg.r == 0 || cfg.k == 0 {
        return Err(Error::domain("n, d, r and k must all be at least 1"));
    }
    if cfg.trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let mut outcomes = Vec::with_capacity(CHECKS.len());
    for (name, check) in CHECKS {
        let mut detail = None;
        for trial in 0..cfg.trials {
            let seed = cfg.seed.wrapping_add(trial);
            let mut inst = instance(cfg, seed)?;
            if let Some(msg) = check(&mut inst)? {
                detail = Some(format!("seed {seed}: {msg}"));
                break;
            }
        }
        outcomes.push(PropertyOutcome {
            name,
            passed: detail.is_none(),
            detail,
        });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let out = verify_kernels(&KernelCheckConfig::default()).unwrap();
        assert_eq!(out.len(), 7);
        assert!(out.iter().all(|o| o.passed), "{out:?}");
    }

    #[test]
    fn degenerate_table_passes() {
        let cfg = KernelCheckConfig {
            n: 1,
            d: 1,
            ..Default::default()
        };
        assert!(verify_kernels(&cfg).unwrap().iter().all(|o| o.passed));
    }

    #[test]
    fn injected_fault_is_caught() {
        let cfg = KernelCheckConfig {
            inject_fault: true,
            ..Default::default()
        };
        let out = verify_kernels(&cfg).unwrap();
        let failed: Vec<_> = out.iter().filter(|o| !o.passed).map(|o| o.name).collect();
        assert!(failed.contains(&"batch lookup equals dense V^T A"));
        assert!(out.iter().filter(|o| !o.passed).all(|o| o
            .detail
            .as_deref()
            .unwrap()
            .starts_with("seed ")));
    }

    #[test]
    fn zero_sizes_rejected() {
        let cfg = KernelCheckConfig {
            r: 0,
            ..Default::default()
        };
        assert!(verify_kernels(&cfg).is_err());
    }
}
