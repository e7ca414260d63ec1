use super::RunResult;
use crate::bounds::NoiseModel;
use crate::error::{Error, Result};
use crate::model::{Outcome, Pool, TestOracle, TestRecord, Tester};

/// Resubmits erased tests until a non-erased outcome arrives. Every
/// resubmission is charged to the wrapped tester.
#[derive(Debug)]
pub struct RetryTester<'a, T: Tester + ?Sized> {
    inner: &'a mut T,
}

impl<'a, T: Tester + ?Sized> RetryTester<'a, T> {
    pub fn new(inner: &'a mut T) -> Self {
        RetryTester { inner }
    }
}

impl<T: Tester + ?Sized> Tester for RetryTester<'_, T> {
    fn universe(&self) -> usize {
        self.inner.universe()
    }

    fn test(&mut self, pool: &Pool) -> Result<Outcome> {
        loop {
            match self.inner.test(pool)? {
                Outcome::Erased => continue,
                outcome => return Ok(outcome),
            }
        }
    }

    fn tests_used(&self) -> usize {
        self.inner.tests_used()
    }
}

/// Runs an adaptive algorithm behind a [`RetryTester`], so the algorithm
/// only ever sees what a noiseless oracle would have reported.
pub fn erasure_retry<F>(oracle: &mut TestOracle, inner: F) -> Result<RunResult>
where
    F: FnOnce(&mut RetryTester<'_, TestOracle>) -> Result<RunResult>,
{
    match oracle.noise() {
        NoiseModel::Erasure(p) if p >= 1.0 => {
            return Err(Error::Unsupported("erasure probability 1 never yields an outcome".into()))
        }
        NoiseModel::Noiseless | NoiseModel::Erasure(_) => {}
        other => {
            return Err(Error::Unsupported(format!(
                "erasure retry cannot undo {} noise",
                other.kind()
            )))
        }
    }
    let mut tester = RetryTester::new(oracle);
    inner(&mut tester)
}

/// The transcript with erased tests removed.
pub fn filter_erasures(transcript: &[TestRecord]) -> Vec<TestRecord> {
    transcript
        .iter()
        .filter(|r| r.outcome != Outcome::Erased)
        .cloned()
        .collect()
}
