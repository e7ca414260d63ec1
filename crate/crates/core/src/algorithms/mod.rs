//! Adaptive and non-adaptive group testing algorithms.
//!
//! Every algorithm talks to the world only through a [`Tester`], so the
//! same code runs against a bare oracle, an erasure-retrying wrapper, or a
//! budget-capped oracle.

mod binary_search;
mod comp;
mod hgbsa;
mod rbt;
mod retry;
mod variant;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use binary_search::{binary_search, SearchResult};
pub use comp::{comp_design, comp_run, CompDesign};
pub use hgbsa::{hgbsa, hgbsa_group_size};
pub use rbt::repeated_binary_testing;
pub use retry::{erasure_retry, filter_erasures, RetryTester};
pub use variant::{hwang_variant, variant_group_size, GroupRule, VariantConfig, VariantRoundState};

use crate::bounds::{self, ProblemSize};
use crate::error::{Error, Result};
use crate::model::{DefectiveSet, Tester};

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub estimate: DefectiveSet,
    pub tests_used: usize,
    /// False when a test budget cut the run short; `estimate` then holds
    /// only what had been identified.
    pub completed: bool,
    pub round_trace: Option<Vec<VariantRoundState>>,
}

impl RunResult {
    fn conclude<T: Tester + ?Sized>(tester: &T, found: Vec<usize>, outcome: Result<()>) -> Result<Self> {
        let completed = match outcome {
            Ok(()) => true,
            Err(Error::BudgetExhausted { .. }) => false,
            Err(e) => return Err(e),
        };
        Ok(RunResult {
            estimate: DefectiveSet::new(found, tester.universe())?,
            tests_used: tester.tests_used(),
            completed,
            round_trace: None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rbt,
    Hgbsa,
    Variant,
    Comp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Rbt, Algorithm::Hgbsa, Algorithm::Variant, Algorithm::Comp];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rbt => "rbt",
            Algorithm::Hgbsa => "hgbsa",
            Algorithm::Variant => "variant",
            Algorithm::Comp => "comp",
        }
    }

    pub fn is_adaptive(self) -> bool {
        self != Algorithm::Comp
    }

    /// Worst-case test count for the adaptive algorithms on a noiseless
    /// oracle. The variant's is the ceiling of its deterministic bound.
    pub fn guarantee(self, size: ProblemSize) -> Option<usize> {
        match self {
            Algorithm::Rbt => Some(bounds::rbt_guarantee(size)),
            Algorithm::Hgbsa => Some(bounds::hwang_guarantee(size)),
            Algorithm::Variant => Some(bounds::variant_guarantee(size).ceil().max(0.0) as usize),
            Algorithm::Comp => None,
        }
    }

    /// Runs an adaptive algorithm to completion (or until the tester's
    /// budget runs out).
    pub fn run_adaptive<T: Tester + ?Sized>(self, tester: &mut T, k: usize, variant: VariantConfig) -> Result<RunResult> {
        match self {
            Algorithm::Rbt => repeated_binary_testing(tester, k),
            Algorithm::Hgbsa => hgbsa(tester, k),
            Algorithm::Variant => hwang_variant(tester, k, variant),
            Algorithm::Comp => Err(Error::Unsupported("COMP is not adaptive".into())),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid("alg", format!("unknown algorithm `{s}` (rbt|hgbsa|variant|comp)")))
    }
}
