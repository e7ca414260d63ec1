use std::fmt::Write as _;

use super::{apply_noise, truth_outcome, DefectiveSet, Outcome, Pool, TrialRng};
use crate::bounds::NoiseModel;
use crate::error::{Error, Result};

/// Anything an algorithm can submit pools to.
pub trait Tester {
    /// Number of items in the universe.
    fn universe(&self) -> usize;

    fn test(&mut self, pool: &Pool) -> Result<Outcome>;

    /// Tests charged so far, erased and repeated ones included.
    fn tests_used(&self) -> usize;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestRecord {
    pub pool: Pool,
    pub outcome: Outcome,
}

impl TestRecord {
    /// `<index>,<items joined by ;>,<N|P|E>`
    pub fn to_line(&self, index: usize) -> String {
        let mut line = format!("{index},");
        for (i, item) in self.pool.items().iter().enumerate() {
            if i > 0 {
                line.push(';');
            }
            let _ = write!(line, "{item}");
        }
        let _ = write!(line, ",{}", self.outcome.symbol());
        line
    }
}

/// Parses one transcript line back into `(index, record)`.
pub fn parse_transcript_line(line: &str) -> Result<(usize, TestRecord)> {
    let bad = || Error::invalid("transcript", format!("malformed line `{line}`"));
    let mut fields = line.trim_end().splitn(3, ',');
    let index = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
    let items = fields
        .next()
        .ok_or_else(bad)?
        .split(';')
        .map(|s| s.parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    let mut symbol = fields.next().ok_or_else(bad)?.chars();
    let outcome = match (symbol.next(), symbol.next()) {
        (Some(c), None) => Outcome::from_symbol(c).ok_or_else(bad)?,
        _ => return Err(bad()),
    };
    Ok((index, TestRecord { pool: Pool::new(items)?, outcome }))
}

/// Holds the hidden truth and answers pooled tests through a noise channel,
/// metering and recording every test.
#[derive(Clone, Debug)]
pub struct TestOracle {
    n: usize,
    truth: DefectiveSet,
    noise: NoiseModel,
    rng: TrialRng,
    transcript: Vec<TestRecord>,
    budget: Option<usize>,
}

impl TestOracle {
    pub fn new(n: usize, truth: DefectiveSet, noise: NoiseModel, rng: TrialRng) -> Result<Self> {
        if let Some(&item) = truth.items().last() {
            if item >= n {
                return Err(Error::ItemOutOfRange { item, n });
            }
        }
        Ok(TestOracle {
            n,
            truth,
            noise,
            rng,
            transcript: Vec::new(),
            budget: None,
        })
    }

    /// Caps the number of tests; the test after the cap fails with
    /// [`Error::BudgetExhausted`].
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn truth(&self) -> &DefectiveSet {
        &self.truth
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn transcript(&self) -> &[TestRecord] {
        &self.transcript
    }

    pub fn transcript_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.transcript.iter().enumerate().map(|(i, r)| r.to_line(i))
    }
}

impl Tester for TestOracle {
    fn universe(&self) -> usize {
        self.n
    }

    fn test(&mut self, pool: &Pool) -> Result<Outcome> {
        if pool.max_item() >= self.n {
            return Err(Error::ItemOutOfRange {
                item: pool.max_item(),
                n: self.n,
            });
        }
        if let Some(budget) = self.budget {
            if self.transcript.len() >= budget {
                return Err(Error::BudgetExhausted { budget });
            }
        }
        let outcome = apply_noise(truth_outcome(pool, &self.truth), self.noise, &mut self.rng)?;
        self.transcript.push(TestRecord {
            pool: pool.clone(),
            outcome,
        });
        Ok(outcome)
    }

    fn tests_used(&self) -> usize {
        self.transcript.len()
    }
}
