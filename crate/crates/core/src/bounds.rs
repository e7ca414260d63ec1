//! Closed-form quantities for group testing: log-binomials, rates, converse
//! bounds on success probability, test-count guarantees of the search
//! algorithms, and capacities of the noisy test channels.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::{E, LN_2, LOG2_E};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `n` items of which `k` are defective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProblemSize {
    n: usize,
    k: usize,
}

impl ProblemSize {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::InvalidSize { n, k });
        }
        Ok(ProblemSize { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn require_defective(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        Ok(())
    }
}

impl fmt::Display for ProblemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, k={})", self.n, self.k)
    }
}

/// How test outcomes are corrupted between the pool and the observer.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum NoiseModel {
    #[default]
    Noiseless,
    /// Each outcome is replaced by an erasure symbol with probability `p`.
    Erasure(f64),
    /// Each outcome is flipped with probability `p`.
    Symmetric(f64),
    /// Each negative outcome is reported positive with probability `p` (Z-channel).
    Additive(f64),
}

impl NoiseModel {
    pub fn erasure(p: f64) -> Result<Self> {
        check_probability(p).map(NoiseModel::Erasure)
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        check_probability(p).map(NoiseModel::Symmetric)
    }

    pub fn additive(p: f64) -> Result<Self> {
        check_probability(p).map(NoiseModel::Additive)
    }

    pub fn p(&self) -> f64 {
        match *self {
            NoiseModel::Noiseless => 0.0,
            NoiseModel::Erasure(p) | NoiseModel::Symmetric(p) | NoiseModel::Additive(p) => p,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseModel::Noiseless => "noiseless",
            NoiseModel::Erasure(_) => "erasure",
            NoiseModel::Symmetric(_) => "symmetric",
            NoiseModel::Additive(_) => "additive",
        }
    }

    /// True when every observed outcome equals the pool's true outcome or is
    /// visibly erased, so retrying erasures yields noiseless behaviour.
    pub fn is_erasure_only(&self) -> bool {
        matches!(self, NoiseModel::Noiseless | NoiseModel::Erasure(_))
    }
}

fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::invalid("p", format!("{p} is not a probability")))
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Noiseless => f.write_str("noiseless"),
            other => write!(f, "{}:{}", other.kind(), other.p()),
        }
    }
}

/// Parses `kind[:p]` with kind one of `noiseless|erasure|symmetric|additive`.
impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, p) = match s.split_once(':') {
            Some((kind, p)) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid("noise", format!("bad probability in `{s}`")))?;
                (kind.trim(), Some(p))
            }
            None => (s.trim(), None),
        };
        let p = p.unwrap_or(0.0);
        match kind {
            "noiseless" if p == 0.0 => Ok(NoiseModel::Noiseless),
            "noiseless" => Err(Error::invalid("noise", "noiseless takes no probability")),
            "erasure" => NoiseModel::erasure(p),
            "symmetric" => NoiseModel::symmetric(p),
            "additive" => NoiseModel::additive(p),
            _ => Err(Error::invalid("noise", format!("unknown noise kind `{kind}`"))),
        }
    }
}

impl Serialize for NoiseModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Exact `C(n, k)` when it fits in a `u128`.
pub(crate) fn exact_binom(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c = C(n, i) here, so c * (n - i) is divisible by i + 1.
        c = c.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(c)
}

/// Natural log of `m!`.
pub(crate) fn ln_factorial(m: usize) -> f64 {
    if m <= 20 {
        let f: u64 = (1..=m as u64).product();
        return (f as f64).ln();
    }
    // Stirling series; the first omitted term is below 1e-15 for m > 20.
    let x = m as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

const DIRECT_SUM_LIMIT: usize = 512;

/// `log2 C(n, k)` in bits.
pub fn log2_binom(size: ProblemSize) -> f64 {
    let ProblemSize { n, k } = size;
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if let Some(c) = exact_binom(n, k) {
        return (c as f64).log2();
    }
    if k <= DIRECT_SUM_LIMIT {
        return (0..k)
            .map(|i| ((n - i) as f64 / (i + 1) as f64).log2())
            .sum();
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)) * LOG2_E
}

/// `ceil(log2 C(n, k))`, exact whenever the binomial fits in 128 bits.
pub(crate) fn ceil_log2_binom(size: ProblemSize) -> usize {
    match exact_binom(size.n, size.k) {
        Some(0 | 1) => 0,
        Some(c) => (128 - (c - 1).leading_zeros()) as usize,
        None => log2_binom(size).ceil() as usize,
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `(k log2(n/k), k log2(n e / k))`, which sandwich `log2 C(n, k)`.
pub fn binom_log_bounds(size: ProblemSize) -> Result<(f64, f64)> {
    size.require_defective()?;
    let (n, k) = (size.n as f64, size.k as f64);
    Ok((k * (n / k).log2(), k * (n * E / k).log2()))
}

/// Bits of defective-set identity learned per test when `t` tests are used.
pub fn rate(size: ProblemSize, t: usize) -> Result<f64> {
    rate_real(size, t as f64)
}

/// [`rate`] for a fractional test count such as a Monte Carlo mean.
pub fn rate_real(size: ProblemSize, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::invalid("t", "test count must be positive"));
    }
    Ok(log2_binom(size) / t)
}

/// Upper bound `min(1, 2^t / C(n, k))` on the success probability of any
/// algorithm, adaptive or not, that stops after `t` tests.
pub fn converse_success_bound(size: ProblemSize, t: usize) -> f64 {
    let exponent = t as f64 - log2_binom(size);
    if exponent >= 0.0 {
        1.0
    } else {
        exponent.exp2()
    }
}

/// The weaker bound `min(1, t / log2 C(n, k))`.
pub fn weak_converse_bound(size: ProblemSize, t: usize) -> Result<f64> {
    let bits = log2_binom(size);
    if bits <= 0.0 {
        return Err(Error::invalid("k", "weak converse needs 1 <= k < n"));
    }
    Ok((t as f64 / bits).min(1.0))
}

/// Lower bound `log2 C(n, k) - 2` on the mean test count of any algorithm
/// that always recovers the defective set. Not clamped at zero.
pub fn expected_tests_floor(size: ProblemSize) -> f64 {
    log2_binom(size) - 2.0
}

/// Worst-case test count of generalized binary splitting: `ceil(log2 C(n,k)) + k`.
pub fn hwang_guarantee(size: ProblemSize) -> usize {
    ceil_log2_binom(size) + size.k
}

/// Worst-case test count of repeated binary testing: `k ceil(log2 n)`.
pub fn rbt_guarantee(size: ProblemSize) -> usize {
    size.k * ceil_log2(size.n)
}

/// Deterministic part of the test-count bound for the round-based splitting
/// variant: `k log2 n + (1 + log2 ln 2) k - log2 k!` (the random remainder is
/// non-positive and dropped).
pub fn variant_guarantee(size: ProblemSize) -> f64 {
    let (n, k) = (size.n as f64, size.k as f64);
    k * n.log2() + (1.0 + LN_2.log2()) * k - ln_factorial(size.k) * LOG2_E
}

/// Tests COMP needs for error probability at most `n^-delta`:
/// `ceil((1 + delta) e k ln n)`.
pub fn comp_test_count(size: ProblemSize, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", "must be a positive finite number"));
    }
    let t = (1.0 + delta) * E * size.k as f64 * (size.n as f64).ln();
    Ok(t.ceil() as usize)
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Capacity of the test channel in bits per test: exact for the noiseless
/// and erasure channels, an upper bound for the symmetric and additive ones.
pub fn channel_capacity_bound(model: NoiseModel) -> f64 {
    match model {
        NoiseModel::Noiseless => 1.0,
        NoiseModel::Erasure(p) => 1.0 - p,
        NoiseModel::Symmetric(p) => 1.0 - binary_entropy(p),
        NoiseModel::Additive(p) => z_channel_capacity(p),
    }
}

fn z_channel_capacity(p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - p;
    (q * (p.ln() * p / q).exp()).ln_1p() * LOG2_E
}

/// Every closed-form quantity for one problem size, for reporting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub log2_binom: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binom_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binom_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_converse: Option<f64>,
    pub hwang_tests: usize,
    pub rbt_tests: usize,
    pub variant_tests: f64,
    pub expected_tests_floor: f64,
    pub noise: NoiseModel,
    pub channel_capacity: f64,
}

impl BoundReport {
    pub fn new(size: ProblemSize, t: Option<usize>, noise: NoiseModel) -> Self {
        let (binom_lower, binom_upper) = binom_log_bounds(size).ok().unzip();
        BoundReport {
            n: size.n,
            k: size.k,
            log2_binom: log2_binom(size),
            binom_lower,
            binom_upper,
            t,
            rate: t.and_then(|t| rate(size, t).ok()),
            converse: t.map(|t| converse_success_bound(size, t)),
            weak_converse: t.and_then(|t| weak_converse_bound(size, t).ok()),
            hwang_tests: hwang_guarantee(size),
            rbt_tests: rbt_guarantee(size),
            variant_tests: variant_guarantee(size),
            expected_tests_floor: expected_tests_floor(size),
            noise,
            channel_capacity: channel_capacity_bound(noise),
        }
    }
}
