use std::io::Write;

use serde::Serialize;

use super::{format_sig6, run_trials, ExperimentSpec, TestsDistribution};
use crate::algorithms::Algorithm;
use crate::bounds::{log2_binom, rate, rate_real, ProblemSize};
use crate::error::{Error, Result};

/// `max(1, round(n^(1 - beta)))`, capped at `n`.
pub fn k_for_beta(n: usize, beta: f64) -> usize {
    let k = (n as f64).powf(1.0 - beta).round() as usize;
    k.clamp(1, n.max(1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityRow {
    pub n: usize,
    pub k: usize,
    pub log2_binom: f64,
    pub mean_tests: f64,
    pub max_tests: usize,
    pub success_rate: f64,
    /// `log2 C(n, k) / mean tests`.
    pub mean_rate: f64,
    /// Worst-case test count: the algorithm's guarantee, or the fixed test
    /// count for COMP.
    pub guarantee: usize,
    pub guarantee_rate: f64,
}

/// Achieved rates along `n_list` with `k = n^(1 - beta)`. Settings other
/// than size are taken from `template`.
pub fn capacity_scan(beta: f64, n_list: &[usize], template: &ExperimentSpec) -> Result<Vec<CapacityRow>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta", "must lie strictly between 0 and 1"));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n-list", "must be non-empty and strictly ascending"));
    }
    n_list
        .iter()
        .map(|&n| {
            let k = k_for_beta(n, beta);
            let size = ProblemSize::new(n, k)?;
            let spec = ExperimentSpec { size, ..template.clone() };
            let dist = TestsDistribution::from_results(&run_trials(&spec)?)?;
            let guarantee = match spec.algorithm {
                Algorithm::Comp => spec.comp_tests()?,
                alg => alg.guarantee(size).expect("adaptive algorithms have guarantees"),
            };
            let bits = log2_binom(size);
            Ok(CapacityRow {
                n,
                k,
                log2_binom: bits,
                mean_tests: dist.mean,
                max_tests: dist.max,
                success_rate: dist.successes as f64 / dist.trials as f64,
                mean_rate: rate_real(size, dist.mean).unwrap_or(f64::NAN),
                guarantee,
                guarantee_rate: rate(size, guarantee).unwrap_or(f64::NAN),
            })
        })
        .collect()
}

pub fn write_capacity_csv<W: Write>(out: W, rows: &[CapacityRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record([
        "n",
        "k",
        "log2_binom",
        "mean_tests",
        "max_tests",
        "success_rate",
        "mean_rate",
        "guarantee",
        "guarantee_rate",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            format_sig6(r.log2_binom),
            format_sig6(r.mean_tests),
            r.max_tests.to_string(),
            format_sig6(r.success_rate),
            format_sig6(r.mean_rate),
            r.guarantee.to_string(),
            format_sig6(r.guarantee_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}
