//! The testing world: items, the hidden defective set, pooled-test truth,
//! noise channels and the metering oracle.

mod oracle;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use oracle::{parse_transcript_line, TestOracle, TestRecord, Tester};

use crate::bounds::NoiseModel;
use crate::error::{Error, Result};

/// Generator used for every random draw in a trial.
pub type TrialRng = ChaCha8Rng;

/// A non-empty set of item indices tested together. Items are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pool(Vec<usize>);

impl Pool {
    pub fn new(mut items: Vec<usize>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyPool);
        }
        items.sort_unstable();
        items.dedup();
        Ok(Pool(items))
    }

    pub fn from_slice(items: &[usize]) -> Result<Self> {
        Pool::new(items.to_vec())
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn max_item(&self) -> usize {
        *self.0.last().expect("pools are non-empty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Negative,
    Positive,
    Erased,
}

impl Outcome {
    pub fn symbol(self) -> char {
        match self {
            Outcome::Negative => 'N',
            Outcome::Positive => 'P',
            Outcome::Erased => 'E',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'N' => Some(Outcome::Negative),
            'P' => Some(Outcome::Positive),
            'E' => Some(Outcome::Erased),
            _ => None,
        }
    }

    /// Reads the outcome as a positive/negative bit; erasures are an error.
    pub fn is_positive(self) -> Result<bool> {
        match self {
            Outcome::Negative => Ok(false),
            Outcome::Positive => Ok(true),
            Outcome::Erased => Err(Error::UnexpectedErasure),
        }
    }

    fn flipped(self) -> Self {
        match self {
            Outcome::Negative => Outcome::Positive,
            Outcome::Positive => Outcome::Negative,
            Outcome::Erased => Outcome::Erased,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// The true defective items, sorted ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DefectiveSet(Vec<usize>);

impl DefectiveSet {
    pub fn new(mut items: Vec<usize>, n: usize) -> Result<Self> {
        items.sort_unstable();
        items.dedup();
        if let Some(&item) = items.iter().find(|&&i| i >= n) {
            return Err(Error::ItemOutOfRange { item, n });
        }
        Ok(DefectiveSet(items))
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_superset_of(&self, other: &DefectiveSet) -> bool {
        other.0.iter().all(|&i| self.contains(i))
    }
}

/// A (master seed, stream index) pair; fully determines a [`TrialRng`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub master: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(master: u64, stream: u64) -> Self {
        RngSeed { master, stream }
    }

    fn mixed(&self) -> u64 {
        mix64(mix64(self.master) ^ self.stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn rng(&self) -> TrialRng {
        TrialRng::seed_from_u64(self.mixed())
    }

    /// An independent child seed, e.g. one per role within a trial.
    pub fn substream(&self, tag: u64) -> RngSeed {
        RngSeed::new(self.mixed(), tag)
    }
}

// splitmix64 finalizer
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random `k`-subset of `0..n` by a partial Fisher-Yates shuffle.
pub fn sample_defective_set<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<DefectiveSet> {
    if k > n {
        return Err(Error::InvalidSize { n, k });
    }
    let mut items: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        items.swap(i, j);
    }
    items.truncate(k);
    items.sort_unstable();
    Ok(DefectiveSet(items))
}

/// Positive iff the pool contains a defective.
pub fn truth_outcome(pool: &Pool, truth: &DefectiveSet) -> Outcome {
    let hit = if truth.len() <= pool.len() {
        truth.items().iter().any(|&d| pool.contains(d))
    } else {
        pool.items().iter().any(|&i| truth.contains(i))
    };
    if hit {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

/// Passes a raw outcome through the noise channel. Exactly one uniform
/// variate is drawn per call whatever the model, so transcripts under a
/// shared seed stay aligned across models.
pub fn apply_noise<R: Rng + ?Sized>(out: Outcome, model: NoiseModel, rng: &mut R) -> Result<Outcome> {
    if out == Outcome::Erased {
        return Err(Error::ErasedInput);
    }
    let u: f64 = rng.random();
    Ok(match model {
        NoiseModel::Noiseless => out,
        NoiseModel::Erasure(p) if u < p => Outcome::Erased,
        NoiseModel::Symmetric(p) if u < p => out.flipped(),
        NoiseModel::Additive(p) if u < p && out == Outcome::Negative => Outcome::Positive,
        _ => out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_is_canonical() {
        let p = Pool::new(vec![3, 1, 3, 2]).unwrap();
        assert_eq!(p.items(), &[1, 2, 3]);
        assert!(matches!(Pool::new(vec![]), Err(Error::EmptyPool)));
    }

    #[test]
    fn defective_set_range_checked() {
        assert!(DefectiveSet::new(vec![4], 4).is_err());
        assert_eq!(DefectiveSet::new(vec![2, 0], 4).unwrap().items(), &[0, 2]);
    }

    #[test]
    fn degenerate_samples() {
        let mut rng = RngSeed::new(1, 2).rng();
        assert_eq!(sample_defective_set(5, 5, &mut rng).unwrap().items(), &[0, 1, 2, 3, 4]);
        assert!(sample_defective_set(5, 0, &mut rng).unwrap().is_empty());
        assert!(sample_defective_set(5, 6, &mut rng).is_err());
    }

    #[test]
    fn sampling_is_uniform_over_subsets() {
        // chi-square over the 6 two-subsets of 0..4
        let mut rng = RngSeed::new(42, 0).rng();
        let draws = 100_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            let s = sample_defective_set(4, 2, &mut rng).unwrap();
            *counts.entry(s.items().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let sigma = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        let mut chi2 = 0.0;
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() < 3.0 * sigma + 1.0, "{counts:?}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 5 degrees of freedom, 99.9th percentile
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn truth_outcome_examples() {
        let pool = Pool::new(vec![0, 1]).unwrap();
        assert_eq!(truth_outcome(&pool, &DefectiveSet::new(vec![2], 4).unwrap()), Outcome::Negative);
        assert_eq!(truth_outcome(&pool, &DefectiveSet::new(vec![1, 3], 4).unwrap()), Outcome::Positive);
    }

    #[test]
    fn truth_outcome_matches_intersection_exhaustively() {
        for d in 0..4 {
            let truth = DefectiveSet::new(vec![d], 4).unwrap();
            for mask in 1u32..16 {
                let items: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
                let expected = if items.contains(&d) { Outcome::Positive } else { Outcome::Negative };
                assert_eq!(truth_outcome(&Pool::new(items).unwrap(), &truth), expected);
            }
        }
        // the other branch: truth larger than pool
        let truth = DefectiveSet::new((0..10).filter(|i| i % 3 == 0).collect(), 10).unwrap();
        assert_eq!(truth_outcome(&Pool::new(vec![4]).unwrap(), &truth), Outcome::Negative);
        assert_eq!(truth_outcome(&Pool::new(vec![6]).unwrap(), &truth), Outcome::Positive);
    }

    #[test]
    fn noise_channels() {
        let mut rng = RngSeed::new(7, 7).rng();
        for _ in 0..1000 {
            assert_eq!(apply_noise(Outcome::Positive, NoiseModel::Additive(0.9), &mut rng).unwrap(), Outcome::Positive);
            assert_eq!(apply_noise(Outcome::Negative, NoiseModel::Noiseless, &mut rng).unwrap(), Outcome::Negative);
            assert_eq!(apply_noise(Outcome::Negative, NoiseModel::Erasure(1.0), &mut rng).unwrap(), Outcome::Erased);
        }
        assert!(matches!(
            apply_noise(Outcome::Erased, NoiseModel::Noiseless, &mut rng),
            Err(Error::ErasedInput)
        ));
    }

    #[test]
    fn symmetric_flip_rate() {
        let mut rng = RngSeed::new(3, 9).rng();
        let draws = 100_000;
        let flips = (0..draws)
            .filter(|_| apply_noise(Outcome::Negative, NoiseModel::Symmetric(0.3), &mut rng).unwrap() == Outcome::Positive)
            .count();
        let sigma = (0.3 * 0.7 / draws as f64).sqrt();
        assert!((flips as f64 / draws as f64 - 0.3).abs() < 3.0 * sigma);
    }

    #[test]
    fn one_variate_per_noise_call() {
        let models = [
            NoiseModel::Noiseless,
            NoiseModel::Erasure(0.5),
            NoiseModel::Symmetric(0.5),
            NoiseModel::Additive(0.5),
        ];
        let tails: Vec<u64> = models
            .iter()
            .map(|&m| {
                let mut rng = RngSeed::new(5, 5).rng();
                for _ in 0..10 {
                    apply_noise(Outcome::Negative, m, &mut rng).unwrap();
                }
                rng.random()
            })
            .collect();
        assert!(tails.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        let a: u64 = RngSeed::new(1, 2).rng().random();
        let b: u64 = RngSeed::new(1, 2).rng().random();
        let c: u64 = RngSeed::new(1, 3).rng().random();
        let d: u64 = RngSeed::new(2, 2).rng().random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(RngSeed::new(1, 2).substream(0), RngSeed::new(1, 2).substream(1));
    }
}
