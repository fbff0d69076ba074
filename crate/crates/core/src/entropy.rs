//! Log-factorials, log-binomials and the entropy of lookup signatures.
//!
//! Every value is in bits. A lookup that selects `k` of `n` items with
//! `t`-bit weights can take `2^(tk) * C(n, k)` distinct values, so under a
//! uniform selection its entropy is `tk + log2 C(n, k)`. That roofline is what
//! the embedding capacity `d * s` gets compared against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sizing::EmbeddingSpec;
use crate::summation::NeumaierSum;
use crate::{Error, Real, Result};

/// Largest item count accepted in a [`LookupSignature`].
pub const MAX_ITEMS: u64 = 1 << 40;

/// Above this `n` the exact log-factorial switches from direct summation to
/// the asymptotic Stirling series.
pub const DIRECT_SUM_LIMIT: u64 = 1_000_000;

/// Shape of a sparse lookup: `k` of `n` items selected, each weight carried
/// in `t` bits (`t = 0` for binary presence).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LookupSignature {
    n: u64,
    k: u64,
    t: u32,
}

impl LookupSignature {
    pub fn new(n: u64, k: u64, t: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if n > MAX_ITEMS {
            return Err(Error::domain(format!("n = {n} exceeds 2^40")));
        }
        if k > n {
            return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
        }
        Ok(Self { n, k, t })
    }

    /// Binary (unweighted) signature.
    pub fn binary(n: u64, k: u64) -> Result<Self> {
        Self::new(n, k, 0)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn is_weighted(&self) -> bool {
        self.t > 0
    }

    /// The same selection with weights dropped.
    pub fn unweighted(&self) -> Self {
        Self { t: 0, ..*self }
    }
}

/// A non-negative, finite amount of information in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntropyBits<T>(T);

impl<T: Real> EntropyBits<T> {
    pub fn new(bits: T) -> Result<Self> {
        if !bits.is_finite() || bits < T::zero() {
            return Err(Error::domain(format!(
                "entropy must be finite and >= 0, got {bits}"
            )));
        }
        Ok(Self(bits))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn bits(self) -> T {
        self.0
    }

    /// Clamps tiny negative rounding residue to zero.
    pub(crate) fn from_computed(bits: T) -> Result<Self> {
        Self::new(if bits < T::zero() && bits > -T::lit(1e-9) {
            T::zero()
        } else {
            bits
        })
    }
}

impl<T: fmt::Display> fmt::Display for EntropyBits<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// How a log-factorial or log-binomial is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    /// Compensated summation; the reference every other method is judged by.
    Exact,
    /// `ln n! ~ n ln n - n + ln(2 pi n) / 2`.
    Stirling,
    /// `ln n! ~ n ln n - n + ln(n + 4n^2 + 8n^3) / 6 + ln(pi) / 2`.
    Ramanujan,
    /// Reproduces the printed sample-signature table: `log2 n` for single
    /// lookups, `log2 C(n, k) - k log2 e` otherwise.
    PaperTable,
}

impl EntropyMethod {
    pub const ALL: [EntropyMethod; 4] = [
        EntropyMethod::Exact,
        EntropyMethod::Stirling,
        EntropyMethod::Ramanujan,
        EntropyMethod::PaperTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntropyMethod::Exact => "exact",
            EntropyMethod::Stirling => "stirling",
            EntropyMethod::Ramanujan => "ramanujan",
            EntropyMethod::PaperTable => "paper-table",
        }
    }
}

impl fmt::Display for EntropyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntropyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntropyMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown method '{s}' (expected exact, stirling, ramanujan or paper-table)"
                ))
            })
    }
}

/// A discrete probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    p: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Validates that every entry is finite and non-negative and that the
    /// entries sum to one within `1e-9` (or a few ulps per entry for `f32`).
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("distribution is empty"));
        }
        if let Some((i, x)) = p
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < T::zero())
        {
            return Err(Error::domain(format!(
                "probability p[{i}] = {x} is negative or not finite"
            )));
        }
        let total = p.iter().copied().sum::<NeumaierSum<T>>().total();
        let tol = T::lit(1e-9).max(T::epsilon() * T::count(p.len() as u64));
        if (total - T::one()).abs() > tol {
            return Err(Error::domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { p })
    }

    /// Uniform distribution over `g` outcomes.
    pub fn uniform(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::domain(
                "uniform distribution needs at least one outcome",
            ));
        }
        Ok(Self {
            p: vec![T::one() / T::count(g as u64); g],
        })
    }

    pub fn probabilities(&self) -> &[T] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

#[inline]
fn log2_of<T: Real>(x: u64) -> T {
    T::count(x).log2()
}

fn approximation_domain(n: u64, method: EntropyMethod) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(format!(
            "{method} log-factorial is undefined at n = 0"
        )));
    }
    Ok(())
}

/// `log2(n!)`.
///
/// The exact method sums `log2 i` directly up to [`DIRECT_SUM_LIMIT`] and uses
/// the Stirling series through the `1/(1260 n^5)` term beyond it.
pub fn log2_factorial<T: Real>(n: u64, method: EntropyMethod) -> Result<EntropyBits<T>> {
    let bits = match method {
        EntropyMethod::Exact => {
            if n <= DIRECT_SUM_LIMIT {
                log2_factorial_direct(n)
            } else {
                log2_factorial_series(n)
            }
        }
        EntropyMethod::Stirling => {
            approximation_domain(n, method)?;
            let x = T::count(n);
            let ln = x * (x.ln() - T::one()) + T::lit(0.5) * (T::TAU() * x).ln();
            ln * T::LOG2_E()
        }
        EntropyMethod::Ramanujan => {
            approximation_domain(n, method)?;
            let x = T::count(n);
            let ln = x * (x.ln() - T::one())
                + ramanujan_log_poly::<T>(n) * T::LN_2() / T::lit(6.0)
                + T::lit(0.5) * T::PI().ln();
            ln * T::LOG2_E()
        }
        EntropyMethod::PaperTable => {
            return Err(Error::domain(
                "paper-table is a lookup-entropy mode, not a factorial method",
            ))
        }
    };
    EntropyBits::from_computed(bits)
}

fn log2_factorial_direct<T: Real>(n: u64) -> T {
    (2..=n).map(log2_of::<T>).sum::<NeumaierSum<T>>().total()
}

fn log2_factorial_series<T: Real>(n: u64) -> T {
    let x = T::count(n);
    let inv = x.recip();
    let inv2 = inv * inv;
    // 1/(12n) - 1/(360n^3) + 1/(1260n^5)
    let correction =
        inv * (T::lit(1.0 / 12.0) - inv2 * (T::lit(1.0 / 360.0) - inv2 * T::lit(1.0 / 1260.0)));
    let ln = x * (x.ln() - T::one()) + T::lit(0.5) * (T::TAU() * x).ln() + correction;
    ln * T::LOG2_E()
}

/// `log2(x + 4x^2 + 8x^3)`, split so the cubic never overflows `f32`.
fn ramanujan_log_poly<T: Real>(x: u64) -> T {
    let v = T::count(x);
    v.log2() + (T::one() + T::lit(4.0) * v + T::lit(8.0) * v * v).log2()
}

/// `log2 C(n, k)`.
///
/// The exact method sums `log2(n - m + i) - log2(i)` for `i = 1..=m`,
/// `m = min(k, n - k)`, with compensation; it never forms the factorials, so
/// it stays accurate at `n ~ 10^8` where factorial differences cancel.
pub fn log2_binomial<T: Real>(n: u64, k: u64, method: EntropyMethod) -> Result<EntropyBits<T>> {
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    let bits = match method {
        EntropyMethod::Exact => {
            let m = k.min(n - k);
            let mut acc = NeumaierSum::new();
            for i in 1..=m {
                acc += log2_of::<T>(n - m + i);
                acc += -log2_of::<T>(i);
            }
            acc.total()
        }
        EntropyMethod::Stirling => {
            if k == 0 || k == n {
                return Err(Error::domain(
                    "stirling log-binomial is undefined at k = 0 or k = n",
                ));
            }
            log2_factorial::<T>(n, method)?.bits()
                - log2_factorial::<T>(k, method)?.bits()
                - log2_factorial::<T>(n - k, method)?.bits()
        }
        EntropyMethod::Ramanujan => {
            if k == 0 || k == n {
                return Err(Error::domain(
                    "ramanujan log-binomial is undefined at k = 0 or k = n",
                ));
            }
            let nf = T::count(n);
            let kf = T::count(k);
            let rest = T::count(n - k);
            // n log2(n / (n - k)) written as n log2(1 + k / (n - k))
            let head = nf * (kf / rest).ln_1p() * T::LOG2_E();
            let mid = kf * (rest / kf).log2();
            let poly = (ramanujan_log_poly::<T>(n)
                - ramanujan_log_poly::<T>(n - k)
                - ramanujan_log_poly::<T>(k))
                / T::lit(6.0);
            head + mid + poly - T::lit(0.5) * T::PI().log2()
        }
        EntropyMethod::PaperTable => {
            return Err(Error::domain(
                "paper-table is a lookup-entropy mode, not a binomial method",
            ))
        }
    };
    EntropyBits::from_computed(bits)
}

/// Shannon entropy `-sum p log2 p`, with `0 log2 0 = 0`.
pub fn entropy_of_distribution<T: Real>(p: &Distribution<T>) -> EntropyBits<T> {
    let h = p
        .probabilities()
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| -(x * x.log2()))
        .sum::<NeumaierSum<T>>()
        .total();
    let ceiling = T::count(p.len() as u64).log2();
    EntropyBits(h.max(T::zero()).min(ceiling))
}

/// Entropy of a uniformly used embedding vector: `d * s` bits.
pub fn embedding_entropy_uniform<T: Real>(spec: &EmbeddingSpec) -> EntropyBits<T> {
    EntropyBits(T::count(spec.capacity_bits()))
}

/// Entropy of a uniform single-item lookup over `n` items: `log2 n`.
pub fn single_lookup_entropy<T: Real>(n: u64) -> Result<EntropyBits<T>> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    EntropyBits::new(log2_of(n))
}

/// Entropy of a uniform binary multi-item lookup.
pub fn multi_lookup_entropy<T: Real>(
    sig: &LookupSignature,
    method: EntropyMethod,
) -> Result<EntropyBits<T>> {
    if sig.is_weighted() {
        return Err(Error::domain(
            "multi-item lookup entropy takes a binary signature (t = 0); use weighted_lookup_entropy",
        ));
    }
    let (n, k) = (sig.n(), sig.k());
    match method {
        EntropyMethod::PaperTable if k == 1 => single_lookup_entropy(n),
        EntropyMethod::PaperTable => {
            let exact = log2_binomial::<T>(n, k, EntropyMethod::Exact)?.bits();
            EntropyBits::from_computed(exact - T::count(k) * T::LOG2_E())
        }
        _ => log2_binomial(n, k, method),
    }
}

/// Entropy of a uniform weighted lookup: `t k + H(n, k)`.
pub fn weighted_lookup_entropy<T: Real>(
    sig: &LookupSignature,
    method: EntropyMethod,
) -> Result<EntropyBits<T>> {
    let base = multi_lookup_entropy::<T>(&sig.unweighted(), method)?.bits();
    let weight_bits = T::count(u64::from(sig.t()) * sig.k());
    EntropyBits::new(weight_bits + base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use EntropyMethod::*;

    fn fact(n: u64, m: EntropyMethod) -> f64 {
        log2_factorial::<f64>(n, m).unwrap().bits()
    }

    fn binom(n: u64, k: u64, m: EntropyMethod) -> f64 {
        log2_binomial::<f64>(n, k, m).unwrap().bits()
    }

    fn multi(n: u64, k: u64, m: EntropyMethod) -> f64 {
        multi_lookup_entropy::<f64>(&LookupSignature::binary(n, k).unwrap(), m)
            .unwrap()
            .bits()
    }

    #[test]
    fn factorial_examples() {
        assert!((fact(5, Exact) - 120f64.log2()).abs() < 1e-12);
        assert_eq!(fact(0, Exact), 0.0);
        assert_eq!(fact(1, Exact), 0.0);
        let oracle: f64 = (2..=10).map(|i| (i as f64).log2()).sum();
        assert!((fact(10, Ramanujan) - oracle).abs() < 1e-3);
        let stirling_gap = oracle - fact(10, Stirling);
        assert!(stirling_gap > 0.0, "stirling underestimates");
        assert!((stirling_gap - 0.012).abs() < 1e-3, "gap {stirling_gap}");
    }

    #[test]
    fn factorial_domain_errors() {
        assert!(log2_factorial::<f64>(0, Stirling).is_err());
        assert!(log2_factorial::<f64>(0, Ramanujan).is_err());
        assert!(log2_factorial::<f64>(3, PaperTable).is_err());
    }

    #[test]
    fn factorial_branches_meet_at_crossover() {
        let direct: f64 = log2_factorial_direct(DIRECT_SUM_LIMIT);
        let series: f64 = log2_factorial_series(DIRECT_SUM_LIMIT);
        assert!((direct - series).abs() <= 1e-9, "{direct} vs {series}");
        // one past the boundary keeps increasing by log2(n + 1)
        let step = fact(DIRECT_SUM_LIMIT + 1, Exact) - fact(DIRECT_SUM_LIMIT, Exact);
        assert!((step - ((DIRECT_SUM_LIMIT + 1) as f64).log2()).abs() < 1e-8);
    }

    #[test]
    fn binomial_examples() {
        assert!((binom(4, 2, Exact) - 6f64.log2()).abs() < 1e-12);
        assert_eq!(binom(17, 0, Exact), 0.0);
        assert_eq!(binom(17, 17, Exact), 0.0);
        assert!((binom(64, 32, Exact) - 60.668_616_637).abs() < 1e-8);
        let exact = binom(1_000_000, 100, Exact);
        assert!((binom(1_000_000, 100, Ramanujan) - exact).abs() < 0.01);
    }

    #[test]
    fn binomial_domain_errors() {
        assert!(log2_binomial::<f64>(3, 4, Exact).is_err());
        assert!(log2_binomial::<f64>(5, 0, Ramanujan).is_err());
        assert!(log2_binomial::<f64>(5, 5, Ramanujan).is_err());
        assert!(log2_binomial::<f64>(5, 5, Stirling).is_err());
        assert!(log2_binomial::<f64>(5, 2, PaperTable).is_err());
    }

    #[test]
    fn distribution_examples() {
        let h = |p: Vec<f64>| entropy_of_distribution(&Distribution::new(p).unwrap()).bits();
        assert_eq!(h(vec![0.25; 4]), 2.0);
        assert_eq!(h(vec![1.0, 0.0, 0.0]), 0.0);
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((h(vec![0.75, 0.25]) - expected).abs() < 1e-15);
        assert!((expected - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn distribution_rejects_bad_input() {
        assert!(Distribution::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(Distribution::new(vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Distribution::<f64>::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 + 1e-12]).is_ok());
    }

    #[test]
    fn embedding_capacity() {
        let h = |d, s| embedding_entropy_uniform::<f64>(&EmbeddingSpec::new(d, s).unwrap()).bits();
        assert_eq!(h(1, 32), 32.0);
        assert_eq!(h(64, 32), 2048.0);
        assert!(h(64, 32) >= 1756.3);
        assert_eq!(h(52, 32), 1664.0);
    }

    #[test]
    fn single_lookup() {
        assert_eq!(single_lookup_entropy::<f64>(1).unwrap().bits(), 0.0);
        assert_eq!(single_lookup_entropy::<f64>(1024).unwrap().bits(), 10.0);
        let h = single_lookup_entropy::<f64>(20_000_000).unwrap().bits();
        assert!((h - 24.25).abs() < 0.005);
        assert!(single_lookup_entropy::<f64>(0).is_err());
    }

    #[test]
    fn multi_lookup_examples() {
        assert!((multi(20_000_000, 100, PaperTable) - 1756.3).abs() < 0.05);
        assert!((multi(20_000_000, 100, Exact) - 1900.6).abs() < 0.05);
        assert!((multi(1_000_000, 10, PaperTable) - 163.0).abs() < 0.2);
        for n in [1, 2, 1024, 20_000_000] {
            let log2n = (n as f64).log2();
            assert_eq!(multi(n, 1, Exact), log2n);
            assert_eq!(multi(n, 1, PaperTable), log2n);
        }
        for n in [2, 1024, 20_000_000] {
            assert!((multi(n, 1, Ramanujan) - (n as f64).log2()).abs() < 1e-3);
        }
    }

    #[test]
    fn multi_lookup_rejects_weighted_signature() {
        let sig = LookupSignature::new(10, 2, 4).unwrap();
        assert!(multi_lookup_entropy::<f64>(&sig, Exact).is_err());
    }

    #[test]
    fn weighted_lookup_examples() {
        let w = |n, k, t, m| {
            weighted_lookup_entropy::<f64>(&LookupSignature::new(n, k, t).unwrap(), m)
                .unwrap()
                .bits()
        };
        assert!((w(20_000_000, 100, 16, PaperTable) - 3356.3).abs() < 0.05);
        assert_eq!(w(1024, 1, 4, Exact), 14.0);
        assert_eq!(w(500, 7, 0, Ramanujan), multi(500, 7, Ramanujan));
    }

    #[test]
    fn signature_validation() {
        assert!(LookupSignature::new(0, 0, 0).is_err());
        assert!(LookupSignature::new(5, 6, 0).is_err());
        assert!(LookupSignature::new(MAX_ITEMS + 1, 1, 0).is_err());
        assert!(LookupSignature::new(MAX_ITEMS, 1, 0).is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in EntropyMethod::ALL {
            assert_eq!(m.name().parse::<EntropyMethod>().unwrap(), m);
        }
        assert!("nats".parse::<EntropyMethod>().is_err());
    }

    #[test]
    fn f32_is_usable() {
        let h = log2_binomial::<f32>(64, 32, Exact).unwrap().bits();
        assert!((h - 60.668_617).abs() < 1e-3);
        let r = log2_binomial::<f32>(MAX_ITEMS, 1000, Ramanujan)
            .unwrap()
            .bits();
        assert!(r.is_finite());
    }
}
