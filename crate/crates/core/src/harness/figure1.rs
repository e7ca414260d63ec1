use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::{run_trials, BudgetRange, ExperimentSpec, SuccessCurve};
use crate::algorithms::Algorithm;
use crate::bounds::{hwang_guarantee, log2_binom, variant_guarantee, ProblemSize};
use crate::error::{Error, Result};

/// `(k, n, file name)` of the two reference configurations.
pub const FIGURE1_CONFIGS: [(usize, usize, &str); 2] =
    [(10, 500, "fig1_k10_n500.csv"), (30, 9699, "fig1_k30_n9699.csv")];

/// Experiment for one reference configuration. The budget grid starts `2k`
/// below `log2 C(n, k)` and ends at the larger of the two algorithms'
/// guarantee budgets, the variant's taken with `+k` slack.
pub fn figure1_spec(size: ProblemSize, algorithm: Algorithm, trials: usize, master_seed: u64) -> ExperimentSpec {
    let bits = log2_binom(size).floor() as usize;
    let t_min = bits.saturating_sub(2 * size.k()).max(1);
    let variant_top = variant_guarantee(size).ceil() as usize + size.k();
    let t_max = hwang_guarantee(size).max(variant_top).max(t_min);
    let mut spec = ExperimentSpec::new(size, algorithm);
    spec.trials = trials;
    spec.master_seed = master_seed;
    spec.budget_range = Some(BudgetRange { t_min, t_max, step: 1 });
    spec
}

/// Simulates generalized binary splitting and the round-based variant at both
/// reference sizes and writes one CSV per size. Both algorithms face the same
/// sequence of defective sets.
pub fn figure1_experiment(out_dir: &Path, trials: usize, master_seed: u64) -> Result<Vec<PathBuf>> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    for (k, n, name) in FIGURE1_CONFIGS {
        let size = ProblemSize::new(n, k)?;
        let curves = [Algorithm::Hgbsa, Algorithm::Variant]
            .into_iter()
            .map(|alg| {
                let spec = figure1_spec(size, alg, trials, master_seed);
                let results = run_trials(&spec)?;
                let range = spec.budget_range.expect("figure specs carry a range");
                Ok(SuccessCurve::from_results(alg, size, &results, range))
            })
            .collect::<Result<Vec<_>>>()?;
        let path = out_dir.join(name);
        let file = File::create(&path).map_err(io_err(&path))?;
        super::write_curves_csv(BufWriter::new(file), &curves, true).map_err(|e| Error::Io {
            path: path.clone(),
            source: e.into(),
        })?;
        written.push(path);
    }
    Ok(written)
}
