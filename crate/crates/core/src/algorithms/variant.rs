//! Round-based splitting variant.
//!
//! Round `i` looks for one defective among the items still possibly
//! defective (never seen in a negative test), with `K - i + 1` defectives
//! left. Each test takes the lowest-indexed possible defectives, sized so a
//! negative outcome has probability just under one half. Negatives shrink
//! the pool; the first positive ends the round with a halving search.

use serde::Serialize;

use super::{binary_search, RunResult};
use crate::error::Result;
use crate::model::{Pool, Tester};

/// How the group size is derived from the number of possible defectives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupRule {
    /// `ceil(N (1 - 2^(-1/K)))`.
    #[default]
    Ceiling,
    /// `floor(N (1 - 2^(-1/K)) - (K - 1))`, the more conservative size.
    Shifted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VariantConfig {
    pub group_rule: GroupRule,
    pub record_trace: bool,
}

/// Bookkeeping for one finished round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantRoundState {
    /// 1-based.
    pub round_index: usize,
    /// `K - i + 1`.
    pub remaining_defectives: usize,
    /// Possible defectives when the round started.
    pub start_size: usize,
    /// Sizes of the negative tests, in order.
    pub negative_group_sizes: Vec<usize>,
    /// Possible defectives after the last negative test of the round.
    pub possible_defectives: Vec<usize>,
    /// Size of the positive test that ended the round; `None` when the
    /// round ended by declaring every remaining item defective.
    pub last_group_size: Option<usize>,
    /// Items cleared by the closing search, ahead of the defective it found.
    pub leftmost_offset: Option<usize>,
    /// Possible defectives carried into the next round. Both the found
    /// defective and the items cleared ahead of it are removed.
    pub next_start_size: usize,
}

impl VariantRoundState {
    pub fn negatives_in_round(&self) -> usize {
        self.negative_group_sizes.len()
    }

    /// Next-round size counting only the cleared items, leaving the found
    /// defective in the count. Differs from [`next_start_size`] by one.
    ///
    /// [`next_start_size`]: VariantRoundState::next_start_size
    pub fn cleared_only_next_start_size(&self) -> usize {
        self.possible_defectives.len() - self.leftmost_offset.unwrap_or(0)
    }
}

/// Group size for `m` possible defectives and `k` remaining defectives,
/// clamped to `[1, m - k]` so that a negative outcome stays possible.
pub fn variant_group_size(m: usize, k: usize, rule: GroupRule) -> usize {
    debug_assert!(m > k && k >= 1);
    // 1 - 2^(-1/k) without cancellation
    let fraction = -(-std::f64::consts::LN_2 / k as f64).exp_m1();
    let raw = m as f64 * fraction;
    let b = match rule {
        GroupRule::Ceiling => raw.ceil(),
        GroupRule::Shifted => (raw - (k - 1) as f64).floor(),
    };
    (b.max(1.0) as usize).min(m - k)
}

pub fn hwang_variant<T: Tester + ?Sized>(tester: &mut T, k: usize, config: VariantConfig) -> Result<RunResult> {
    let n = tester.universe();
    let items: Vec<usize> = (0..n).collect();
    let mut start = 0;
    let mut found = Vec::with_capacity(k);
    let mut trace = Vec::new();
    let outcome = (|| {
        for round_index in 1..=k {
            let remaining = k - round_index + 1;
            let start_size = n - start;
            let mut negatives = Vec::new();
            loop {
                let rest = &items[start..];
                if rest.len() <= remaining {
                    found.extend_from_slice(rest);
                    if config.record_trace {
                        trace.push(VariantRoundState {
                            round_index,
                            remaining_defectives: remaining,
                            start_size,
                            negative_group_sizes: negatives,
                            possible_defectives: rest.to_vec(),
                            last_group_size: None,
                            leftmost_offset: None,
                            next_start_size: 0,
                        });
                    }
                    start = n;
                    return Ok(());
                }
                let b = variant_group_size(rest.len(), remaining, config.group_rule);
                let group = &rest[..b];
                if tester.test(&Pool::from_slice(group)?)?.is_positive()? {
                    let hit = binary_search(tester, group)?;
                    found.push(hit.found);
                    if config.record_trace {
                        trace.push(VariantRoundState {
                            round_index,
                            remaining_defectives: remaining,
                            start_size,
                            negative_group_sizes: negatives,
                            possible_defectives: rest.to_vec(),
                            last_group_size: Some(b),
                            leftmost_offset: Some(hit.offset()),
                            next_start_size: rest.len() - hit.offset() - 1,
                        });
                    }
                    start += hit.offset() + 1;
                    break;
                }
                negatives.push(b);
                start += b;
            }
        }
        Ok(())
    })();
    let mut result = RunResult::conclude(tester, found, outcome)?;
    if config.record_trace {
        result.round_trace = Some(trace);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{variant_guarantee, NoiseModel, ProblemSize};
    use crate::model::{sample_defective_set, DefectiveSet, RngSeed, TestOracle};

    fn oracle(n: usize, defectives: Vec<usize>) -> TestOracle {
        let truth = DefectiveSet::new(defectives, n).unwrap();
        TestOracle::new(n, truth, NoiseModel::Noiseless, RngSeed::new(0, 0).rng()).unwrap()
    }

    fn traced() -> VariantConfig {
        VariantConfig {
            record_trace: true,
            ..Default::default()
        }
    }

    #[test]
    fn group_sizes() {
        assert_eq!(variant_group_size(500, 10, GroupRule::Ceiling), 34);
        // 33.48 - 9
        assert_eq!(variant_group_size(500, 10, GroupRule::Shifted), 24);
        assert_eq!(variant_group_size(3, 2, GroupRule::Ceiling), 1);
        assert_eq!(variant_group_size(12, 3, GroupRule::Shifted), 1);
        assert_eq!(variant_group_size(2, 1, GroupRule::Ceiling), 1);
        assert_eq!(variant_group_size(100, 1, GroupRule::Ceiling), 50);
    }

    #[test]
    fn all_defective_costs_nothing() {
        let mut o = oracle(5, (0..5).collect());
        let r = hwang_variant(&mut o, 5, traced()).unwrap();
        assert_eq!(r.estimate.len(), 5);
        assert_eq!(r.tests_used, 0);
        let trace = r.round_trace.unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].last_group_size, None);
    }

    #[test]
    fn exhaustive_twelve_choose_two() {
        let size = ProblemSize::new(12, 2).unwrap();
        let bound = variant_guarantee(size).ceil() as usize + 2;
        for a in 0..12 {
            for b in a + 1..12 {
                let mut o = oracle(12, vec![a, b]);
                let r = hwang_variant(&mut o, 2, VariantConfig::default()).unwrap();
                assert_eq!(r.estimate.items(), &[a, b]);
                assert!(r.tests_used <= bound);
            }
        }
    }

    #[test]
    fn shifted_rule_also_recovers() {
        for a in 0..12 {
            for b in a + 1..12 {
                let mut o = oracle(12, vec![a, b]);
                let config = VariantConfig { group_rule: GroupRule::Shifted, record_trace: false };
                let r = hwang_variant(&mut o, 2, config).unwrap();
                assert_eq!(r.estimate.items(), &[a, b]);
            }
        }
    }

    #[test]
    fn round_bookkeeping() {
        let (n, k) = (500, 10);
        for trial in 0..200 {
            let seed = RngSeed::new(17, trial);
            let truth = sample_defective_set(n, k, &mut seed.rng()).unwrap();
            let mut o = TestOracle::new(n, truth.clone(), NoiseModel::Noiseless, seed.rng()).unwrap();
            let r = hwang_variant(&mut o, k, traced()).unwrap();
            assert_eq!(r.estimate, truth);
            let trace = r.round_trace.unwrap();
            let mut expected_start = n;
            for (i, round) in trace.iter().enumerate() {
                assert_eq!(round.round_index, i + 1);
                assert_eq!(round.remaining_defectives, k - i);
                assert_eq!(round.start_size, expected_start);
                // each negative test removes exactly its group
                let removed: usize = round.negative_group_sizes.iter().sum();
                assert_eq!(round.possible_defectives.len(), round.start_size - removed);
                assert!(round.possible_defectives.len() >= round.remaining_defectives);
                // no defective is dropped by a negative test
                let alive = round.possible_defectives.iter().filter(|&&d| truth.contains(d)).count();
                assert_eq!(alive, round.remaining_defectives, "trial {trial} round {}", i + 1);
                if let Some(offset) = round.leftmost_offset {
                    assert_eq!(round.next_start_size + 1, round.cleared_only_next_start_size());
                    assert!(offset < round.last_group_size.unwrap());
                }
                expected_start = round.next_start_size;
            }
        }
    }
}
