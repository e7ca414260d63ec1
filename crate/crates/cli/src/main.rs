//! `gtcap`: bounds, simulations, budget sweeps and capacity scans for
//! adaptive group testing.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gtcap::algorithms::{Algorithm, CompDesign, GroupRule, VariantConfig};
use gtcap::bounds::{BoundReport, NoiseModel, ProblemSize};
use gtcap::harness::{
    capacity_scan, figure1_experiment, run_trials, wilson_interval, write_capacity_csv, write_curves_csv,
    BudgetRange, ExperimentSpec, SuccessCurve, TestsDistribution,
};
use gtcap::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gtcap", version, about = "Adaptive group testing: bounds, simulation and success curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bounds for one problem size, as JSON.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Test budget for the rate and converse fields.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value = "noiseless")]
        noise: NoiseModel,
    },
    /// Run trials of one algorithm and summarise them as JSON.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// COMP test count; for adaptive algorithms, also report success within t tests.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Success probability against test budget, as CSV.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        t_min: usize,
        #[arg(long)]
        t_max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        /// COMP test count (default derived from --delta).
        #[arg(long)]
        t: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write the two reference success-curve files.
    Figure1 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Achieved rates for k = n^(1 - beta) along a list of n.
    Capacity {
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_parser = parse_algorithm, default_value = "hgbsa")]
        alg: Algorithm,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "noiseless")]
        noise: NoiseModel,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_algorithm)]
    alg: Algorithm,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `noiseless`, `erasure:p`, `symmetric:p` or `additive:p`.
    #[arg(long, default_value = "noiseless")]
    noise: NoiseModel,
    /// COMP error exponent.
    #[arg(long)]
    delta: Option<f64>,
    /// Do not wrap adaptive algorithms in erasure retry.
    #[arg(long)]
    no_retry: bool,
    #[arg(long, default_value = "constant-column")]
    comp_design: CompDesign,
    #[arg(long, value_enum, default_value_t = Rule::Ceiling)]
    group_rule: Rule,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Ceiling,
    Shifted,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Io(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSize { .. } => Failure::Usage(format!("--n/--k: {e}")),
            Error::InvalidArgument { name, .. } => Failure::Usage(format!("--{name}: {e}")),
            Error::Unsupported(_) => Failure::Usage(e.to_string()),
            Error::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn io_failure(path: Option<&Path>, e: impl std::fmt::Display) -> Failure {
    match path {
        Some(p) => Failure::Io(format!("{}: {e}", p.display())),
        None => Failure::Io(e.to_string()),
    }
}

impl RunArgs {
    fn spec(&self, comp_tests: Option<usize>) -> Result<ExperimentSpec, Failure> {
        let size = ProblemSize::new(self.n, self.k)?;
        let mut spec = ExperimentSpec::new(size, self.alg);
        spec.noise = self.noise;
        spec.trials = self.trials;
        spec.master_seed = self.seed;
        spec.delta = self.delta;
        spec.comp_tests = comp_tests.filter(|_| self.alg == Algorithm::Comp);
        spec.comp_design = self.comp_design;
        spec.retry = !self.no_retry;
        spec.variant = VariantConfig {
            group_rule: match self.group_rule {
                Rule::Ceiling => GroupRule::Ceiling,
                Rule::Shifted => GroupRule::Shifted,
            },
            record_trace: false,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn print_json(value: &Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out).map_err(|e| io_failure(None, e))
}

fn to_value(x: impl serde::Serialize) -> Result<Value, Failure> {
    // round-trip through Value so object keys come out sorted
    serde_json::to_value(x).map_err(|e| Failure::Internal(e.to_string()))
}

/// Opens the output destination, then hands a writer to `write`.
fn with_output<F>(path: Option<&Path>, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> Result<(), String>,
{
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).map_err(|e| io_failure(Some(p), e))?);
            write(&mut f).map_err(|e| io_failure(Some(p), e))?;
            f.flush().map_err(|e| io_failure(Some(p), e))
        }
        None => write(&mut io::stdout().lock()).map_err(|e| io_failure(None, e)),
    }
}

fn simulate(run: &RunArgs, t: Option<usize>) -> Result<(), Failure> {
    let spec = run.spec(t)?;
    let results = run_trials(&spec)?;
    let dist = TestsDistribution::from_results(&results)?;
    let (ci_lo, ci_hi) = wilson_interval(dist.successes, dist.trials);
    let success_rate = dist.successes as f64 / dist.trials as f64;
    let size = spec.size;
    let mut report = json!({
        "algorithm": spec.algorithm,
        "n": size.n(),
        "k": size.k(),
        "noise": spec.noise,
        "trials": dist.trials,
        "seed": spec.master_seed,
        "successes": dist.successes,
        "success_rate": success_rate,
        "error_rate": 1.0 - success_rate,
        "ci_lo": ci_lo,
        "ci_hi": ci_hi,
        "tests": to_value(&dist)?,
        "mean_tests": dist.mean,
        "max_tests": dist.max,
        "guarantee": spec.algorithm.guarantee(size),
        "guarantee_applies": spec.guarantee_applies(),
        "bounds": to_value(BoundReport::new(size, None, spec.noise))?,
    });
    let fields = report.as_object_mut().expect("report is an object");
    if spec.algorithm == Algorithm::Comp {
        fields.insert("comp_tests".into(), json!(spec.comp_tests()?));
        fields.insert("comp_design".into(), to_value(spec.comp_design)?);
    } else {
        fields.insert("retry".into(), json!(!run.no_retry));
        if let Some(t) = t {
            let within = results.iter().filter(|r| r.success && r.tests_used <= t).count();
            fields.insert("budget".into(), json!(t));
            fields.insert("success_within_budget".into(), json!(within as f64 / dist.trials as f64));
        }
    }
    print_json(&report)
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bounds { n, k, t, noise } => {
            let size = ProblemSize::new(n, k)?;
            print_json(&to_value(BoundReport::new(size, t, noise))?)
        }
        Command::Simulate { run, t } => simulate(&run, t),
        Command::Sweep { run, t_min, t_max, step, t, out, format } => {
            if format == Format::Json {
                return Err(Failure::Usage("--format: sweep writes csv only".into()));
            }
            let range = BudgetRange::new(t_min, t_max, step)?;
            let mut spec = run.spec(t)?;
            spec.budget_range = Some(range);
            let curve = SuccessCurve::from_results(spec.algorithm, spec.size, &run_trials(&spec)?, range);
            with_output(out.as_deref(), |w| write_curves_csv(w, &[curve], false).map_err(|e| e.to_string()))
        }
        Command::Figure1 { out_dir, trials, seed } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials: must be at least 1".into()));
            }
            for path in figure1_experiment(&out_dir, trials, seed)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Capacity { beta, n_list, alg, trials, seed, noise, out, format } => {
            let mut template = ExperimentSpec::new(ProblemSize::new(1, 1)?, alg);
            template.trials = trials;
            template.master_seed = seed;
            template.noise = noise;
            let rows = capacity_scan(beta, &n_list, &template)?;
            match format {
                Format::Csv => with_output(out.as_deref(), |w| write_capacity_csv(w, &rows).map_err(|e| e.to_string())),
                Format::Json => {
                    let value = to_value(&rows)?;
                    with_output(out.as_deref(), |w| {
                        serde_json::to_writer_pretty(&mut *w, &value).map_err(|e| e.to_string())?;
                        writeln!(w).map_err(|e| e.to_string())
                    })
                }
            }
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("GT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("GT_THREADS: expected a thread count, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
