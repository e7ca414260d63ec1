use std::io::Write;

use serde::Serialize;

use super::{format_sig6, run_trials, BudgetRange, ExperimentSpec, TrialResult};
use crate::algorithms::Algorithm;
use crate::bounds::{converse_success_bound, hwang_guarantee, log2_binom, weak_converse_bound, ProblemSize};
use crate::error::{Error, Result};

pub const CURVE_HEADER: [&str; 7] = ["t", "success", "ci_lo", "ci_hi", "converse", "weak_converse", "algorithm"];

const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the endpoints are exactly 0 and 1 at the extremes; rounding says otherwise
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub t: usize,
    pub successes: usize,
    pub trials: usize,
    pub success: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub converse: f64,
    pub weak_converse: f64,
}

impl CurveRow {
    pub fn ci_half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

/// Empirical success probability against test budget, with bound overlays.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessCurve {
    pub algorithm: Algorithm,
    pub size: ProblemSize,
    pub rows: Vec<CurveRow>,
    /// Where the vertical marker goes: `log2 C(n, k)`.
    pub log2_binom: f64,
    pub hwang_guarantee: usize,
}

impl SuccessCurve {
    /// Success at budget `t` means the trial succeeded using at most `t`
    /// tests, so one run-to-completion pass serves the whole grid.
    pub fn from_results(algorithm: Algorithm, size: ProblemSize, results: &[TrialResult], range: BudgetRange) -> Self {
        let mut used: Vec<usize> = results.iter().filter(|r| r.success).map(|r| r.tests_used).collect();
        used.sort_unstable();
        let trials = results.len();
        let rows = range
            .budgets()
            .map(|t| {
                let successes = used.partition_point(|&u| u <= t);
                let (ci_lo, ci_hi) = wilson_interval(successes, trials);
                CurveRow {
                    t,
                    successes,
                    trials,
                    success: successes as f64 / trials as f64,
                    ci_lo,
                    ci_hi,
                    converse: converse_success_bound(size, t),
                    // undefined when C(n, k) = 1, where success is certain anyway
                    weak_converse: weak_converse_bound(size, t).unwrap_or(1.0),
                }
            })
            .collect();
        SuccessCurve {
            algorithm,
            size,
            rows,
            log2_binom: log2_binom(size),
            hwang_guarantee: hwang_guarantee(size),
        }
    }

    pub fn row(&self, t: usize) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.t == t)
    }
}

pub fn success_curve(spec: &ExperimentSpec) -> Result<SuccessCurve> {
    let range = spec
        .budget_range
        .ok_or_else(|| Error::invalid("t-min", "a success curve needs a budget range"))?;
    let results = run_trials(spec)?;
    Ok(SuccessCurve::from_results(spec.algorithm, spec.size, &results, range))
}

/// Writes curves in the shared CSV schema, one block of rows per curve.
/// With `marker`, every row also carries the `log2_binom` value.
pub fn write_curves_csv<W: Write>(out: W, curves: &[SuccessCurve], marker: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = CURVE_HEADER.to_vec();
    if marker {
        header.push("log2_binom");
    }
    w.write_record(&header)?;
    for curve in curves {
        for row in &curve.rows {
            let mut record = vec![
                row.t.to_string(),
                format_sig6(row.success),
                format_sig6(row.ci_lo),
                format_sig6(row.ci_hi),
                format_sig6(row.converse),
                format_sig6(row.weak_converse),
                curve.algorithm.to_string(),
            ];
            if marker {
                record.push(format_sig6(curve.log2_binom));
            }
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}
