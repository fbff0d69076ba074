//! Reference embedding lookups.
//!
//! A table `V` holds one `d`-vector per item. A one-hot lookup copies a row, a
//! weighted lookup forms `sum w_i * V[i]`, and a batch applies weighted lookups
//! independently, row by row. Sums accumulate in the order the entries are
//! given, so results are reproducible bit for bit.

use crate::{Error, Real, Result};

/// Dense `n x d` table of embedding vectors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    n: usize,
    d: usize,
    values: Vec<T>,
}

impl<T: Real> EmbeddingTable<T> {
    pub fn new(n: usize, d: usize, values: Vec<T>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::domain(format!(
                "table shape {n}x{d} must be at least 1x1"
            )));
        }
        if values.len() != n * d {
            return Err(Error::domain(format!(
                "{} values for a {n}x{d} table",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("embedding values must be finite"));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::domain("table rows have different lengths"));
        }
        Self::new(n, d, rows.into_iter().flatten().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> Result<&[T]> {
        if i >= self.n {
            return Err(Error::domain(format!(
                "index {i} outside table of {} rows",
                self.n
            )));
        }
        Ok(&self.values[i * self.d..(i + 1) * self.d])
    }
}

/// Sparse weight vector `a`: `(index, weight)` entries in accumulation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLookup<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Real> SparseLookup<T> {
    pub fn new(entries: Vec<(usize, T)>) -> Result<Self> {
        if entries.iter().any(|(_, w)| !w.is_finite()) {
            return Err(Error::domain("lookup weights must be finite"));
        }
        Ok(Self { entries })
    }

    /// Multi-hot lookup with every weight equal to one.
    pub fn binary(indices: &[usize]) -> Self {
        Self {
            entries: indices.iter().map(|&i| (i, T::one())).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            entries: self.entries.iter().map(|&(i, w)| (i, alpha * w)).collect(),
        }
    }

    /// Sparse vector sum: weights of shared indices are added, and the result
    /// lists indices in ascending order.
    pub fn plus(&self, other: &Self) -> Self {
        let mut merged = std::collections::BTreeMap::new();
        for &(i, w) in self.entries.iter().chain(&other.entries) {
            *merged.entry(i).or_insert_with(T::zero) += w;
        }
        Self {
            entries: merged.into_iter().collect(),
        }
    }

    /// The dense `n`-vector this lookup represents.
    pub fn densify(&self, n: usize) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); n];
        for &(i, w) in &self.entries {
            *out.get_mut(i)
                .ok_or_else(|| Error::domain(format!("index {i} outside [0, {n})")))? += w;
        }
        Ok(out)
    }
}

/// `r` weighted lookups against one table.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupBatch<T> {
    lookups: Vec<SparseLookup<T>>,
}

impl<T: Real> LookupBatch<T> {
    pub fn new(lookups: Vec<SparseLookup<T>>) -> Result<Self> {
        if lookups.is_empty() {
            return Err(Error::domain("a batch needs at least one lookup"));
        }
        Ok(Self { lookups })
    }

    pub fn lookups(&self) -> &[SparseLookup<T>] {
        &self.lookups
    }

    pub fn len(&self) -> usize {
        self.lookups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookups.is_empty()
    }
}

/// Row `i` of the table, i.e. `V^T e_i`.
pub fn gather_single<T: Real>(table: &EmbeddingTable<T>, i: usize) -> Result<Vec<T>> {
    table.row(i).map(<[T]>::to_vec)
}

/// `V^T a`, accumulated in entry order.
pub fn lookup_weighted<T: Real>(table: &EmbeddingTable<T>, a: &SparseLookup<T>) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); table.d()];
    for &(i, w) in a.entries() {
        let row = table.row(i)?;
        for (o, &v) in out.iter_mut().zip(row) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// `U = (V^T A)^T`: one output row per lookup.
pub fn lookup_batch<T: Real>(
    table: &EmbeddingTable<T>,
    batch: &LookupBatch<T>,
) -> Result<Vec<Vec<T>>> {
    batch
        .lookups()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            lookup_weighted(table, a).map_err(|e| Error::Batch {
                lookup: j,
                source: Box::new(e),
            })
        })
        .collect()
}
