//! Monte Carlo experiment engine.
//!
//! Trial `i` of an experiment draws all of its randomness from the stream
//! `(master_seed, i)`, so results do not depend on how trials are scheduled
//! across threads.

mod capacity;
mod curve;
mod figure1;
mod format;

use rayon::prelude::*;
use serde::Serialize;

pub use capacity::{capacity_scan, k_for_beta, write_capacity_csv, CapacityRow};
pub use curve::{success_curve, wilson_interval, write_curves_csv, CurveRow, SuccessCurve, CURVE_HEADER};
pub use figure1::{figure1_experiment, figure1_spec, FIGURE1_CONFIGS};
pub use format::format_sig6;

use crate::algorithms::{comp_run, erasure_retry, Algorithm, CompDesign, RunResult, VariantConfig};
use crate::bounds::{comp_test_count, NoiseModel, ProblemSize};
use crate::error::{Error, Result};
use crate::model::{sample_defective_set, RngSeed, TestOracle, Tester};

/// Inclusive grid `t_min, t_min + step, ..., <= t_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetRange {
    pub t_min: usize,
    pub t_max: usize,
    pub step: usize,
}

impl BudgetRange {
    pub fn new(t_min: usize, t_max: usize, step: usize) -> Result<Self> {
        if t_min > t_max {
            return Err(Error::invalid("t-min", "must not exceed t-max"));
        }
        if step == 0 {
            return Err(Error::invalid("step", "must be at least 1"));
        }
        Ok(BudgetRange { t_min, t_max, step })
    }

    pub fn budgets(&self) -> impl Iterator<Item = usize> {
        (self.t_min..=self.t_max).step_by(self.step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub size: ProblemSize,
    pub algorithm: Algorithm,
    pub noise: NoiseModel,
    pub trials: usize,
    pub master_seed: u64,
    pub budget_range: Option<BudgetRange>,
    /// COMP error exponent; the test count is derived from it unless
    /// `comp_tests` is given.
    pub delta: Option<f64>,
    pub comp_tests: Option<usize>,
    pub comp_design: CompDesign,
    /// Wrap adaptive algorithms in erasure retry under erasure noise.
    pub retry: bool,
    pub variant: VariantConfig,
}

impl ExperimentSpec {
    pub fn new(size: ProblemSize, algorithm: Algorithm) -> Self {
        ExperimentSpec {
            size,
            algorithm,
            noise: NoiseModel::Noiseless,
            trials: 1000,
            master_seed: 0,
            budget_range: None,
            delta: None,
            comp_tests: None,
            comp_design: CompDesign::default(),
            retry: true,
            variant: VariantConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if let Some(r) = self.budget_range {
            BudgetRange::new(r.t_min, r.t_max, r.step)?;
        }
        if self.algorithm == Algorithm::Comp {
            self.comp_tests()?;
        }
        if self.retries_erasures() && self.noise.p() >= 1.0 {
            return Err(Error::invalid("noise", "erasure retry needs p < 1"));
        }
        Ok(())
    }

    /// Number of COMP tests: explicit, or derived from `delta` (default 1).
    pub fn comp_tests(&self) -> Result<usize> {
        let t = match self.comp_tests {
            Some(t) => t,
            None => comp_test_count(self.size, self.delta.unwrap_or(1.0))?,
        };
        if t == 0 {
            return Err(Error::invalid("t", "COMP needs at least one test"));
        }
        Ok(t)
    }

    fn retries_erasures(&self) -> bool {
        self.retry && self.algorithm.is_adaptive() && matches!(self.noise, NoiseModel::Erasure(_))
    }

    /// Whether the algorithm's recovery guarantee covers this noise setting.
    /// Adaptive algorithms under symmetric or additive noise still run, but
    /// nothing is promised about them.
    pub fn guarantee_applies(&self) -> bool {
        match self.noise {
            NoiseModel::Noiseless => true,
            NoiseModel::Erasure(_) => self.retries_erasures(),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialResult {
    /// The estimate equals the true defective set.
    pub success: bool,
    pub tests_used: usize,
}

/// Runs trial `trial_index` of `spec`; a pure function of its arguments.
pub fn run_trial(spec: &ExperimentSpec, trial_index: u64) -> Result<TrialResult> {
    let seed = RngSeed::new(spec.master_seed, trial_index);
    let (n, k) = (spec.size.n(), spec.size.k());
    let truth = sample_defective_set(n, k, &mut seed.substream(0).rng())?;
    let mut oracle = TestOracle::new(n, truth.clone(), spec.noise, seed.substream(1).rng())?;
    let run = if spec.algorithm == Algorithm::Comp {
        let t = spec.comp_tests()?;
        comp_run(&mut oracle, k, t, spec.comp_design, &mut seed.substream(2).rng())
    } else if spec.retries_erasures() {
        erasure_retry(&mut oracle, |tester| spec.algorithm.run_adaptive(tester, k, spec.variant))
    } else {
        spec.algorithm.run_adaptive(&mut oracle, k, spec.variant)
    };
    match run {
        Ok(RunResult { estimate, tests_used, completed, .. }) => Ok(TrialResult {
            success: completed && estimate == truth,
            tests_used,
        }),
        // a bare adaptive algorithm cannot interpret an erasure; the trial fails
        Err(Error::UnexpectedErasure) => Ok(TrialResult {
            success: false,
            tests_used: oracle.tests_used(),
        }),
        Err(e) => Err(e),
    }
}

/// All trials of `spec`, in trial order, run on the current rayon pool.
pub fn run_trials(spec: &ExperimentSpec) -> Result<Vec<TrialResult>> {
    spec.validate()?;
    (0..spec.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(spec, i))
        .collect()
}

/// [`run_trials`] on the calling thread only.
pub fn run_trials_serial(spec: &ExperimentSpec) -> Result<Vec<TrialResult>> {
    spec.validate()?;
    (0..spec.trials as u64).map(|i| run_trial(spec, i)).collect()
}

/// Summary of the test counts over an experiment's trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestsDistribution {
    pub trials: usize,
    pub successes: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub min: usize,
    pub max: usize,
    pub p50: usize,
    pub p90: usize,
    pub p99: usize,
}

impl TestsDistribution {
    pub fn from_results(results: &[TrialResult]) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        let mut counts: Vec<usize> = results.iter().map(|r| r.tests_used).collect();
        counts.sort_unstable();
        let len = counts.len() as f64;
        let mean = counts.iter().sum::<usize>() as f64 / len;
        let var = if counts.len() > 1 {
            counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (len - 1.0)
        } else {
            0.0
        };
        let quantile = |q: f64| counts[((q * len).ceil() as usize).clamp(1, counts.len()) - 1];
        Ok(TestsDistribution {
            trials: counts.len(),
            successes: results.iter().filter(|r| r.success).count(),
            mean,
            std_dev: var.sqrt(),
            std_error: (var / len).sqrt(),
            min: counts[0],
            max: counts[counts.len() - 1],
            p50: quantile(0.5),
            p90: quantile(0.9),
            p99: quantile(0.99),
        })
    }
}

pub fn tests_distribution(spec: &ExperimentSpec) -> Result<TestsDistribution> {
    TestsDistribution::from_results(&run_trials(spec)?)
}
