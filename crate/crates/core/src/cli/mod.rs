//! The `msfbm` command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] from its flags, an optional
//! TOML file (`--config`) and built-in defaults, computes a report and
//! writes it as CSV or JSON to `--out` or standard output. Output is a pure
//! function of the resolved configuration.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Defaults, FileConfig, Format, Overrides, RunConfig};

use crate::error::Error;
use crate::sampler::Route;
use crate::verify::Suite;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MSFBM_THREADS";

const AFTER_HELP: &str = "\
Configuration precedence: command-line flags > config file (--config) > built-in defaults.
A config file is TOML with any of the keys coeffs, hurst, half_tol, grid_points, horizon,
times, reps, seed, format, out, suite, level, eps, lag_p, n_max and a [sampler] table
(route = \"auto\" | \"exact\" | \"via-fbm\", fbm_method, dense_limit).

Environment: MSFBM_THREADS caps the number of worker threads. Output does not depend on it.

Exit codes: 0 success, 1 verification failure, 2 input validation, 3 numerical failure.";

#[derive(Debug, Parser)]
#[command(name = "msfbm", version, about = "Covariance kernels, exact simulation, estimators and classifiers for mixed sub-fractional Brownian motion", after_help = AFTER_HELP)]
pub struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate covariance kernels at given points.
    Cov(CovArgs),
    /// Simulate independent sample paths on a grid.
    Simulate(SimulateArgs),
    /// Run property suites; exits with 1 if any check fails.
    Verify(VerifyArgs),
    /// Estimate graph, range and level-set dimensions of simulated paths.
    Dims(DimsArgs),
    /// Markov, semimartingale and increment-sign verdicts for a spec.
    Classify(ClassifyArgs),
    /// Short-range dependence: lag covariances, partial sums, tail slope.
    Srd(SrdArgs),
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Component weights a_i, comma-separated [default: 1 per component].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "A1,A2,..")]
    coeffs: Option<Vec<f64>>,
    /// Hurst indices H_i in (0, 1), comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "H1,H2,..")]
    hurst: Option<Vec<f64>>,
    /// Treat |H - 1/2| <= TOL as Brownian in the verdicts [default: 0].
    #[arg(long, value_name = "TOL")]
    half_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Number of equally spaced grid points on [0, horizon].
    #[arg(long, value_name = "N")]
    grid_points: Option<usize>,
    /// Right end T of the time interval [default: 1].
    #[arg(long, value_name = "T")]
    horizon: Option<f64>,
    /// Explicit grid times starting at 0, comma-separated (overrides --grid-points).
    #[arg(long, value_delimiter = ',', value_name = "T0,T1,..")]
    times: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct ReplicaArgs {
    /// Number of independent replicas.
    #[arg(long, value_name = "N")]
    reps: Option<usize>,
    /// Master seed; replica seeds are derived from it.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Which kernel `cov` evaluates and how `--points` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovKind {
    /// Cov(S_s, S_t); points are (s, t) pairs.
    Msfbm,
    /// Covariance of the mixed fractional Brownian motion; (s, t) pairs.
    Mfbm,
    /// E(S_t - S_s)^2 with its two-sided bounds; (s, t) pairs, s <= t.
    Moment,
    /// Cov(S_v - S_u, S_t - S_s); (u, v, s, t) quadruples.
    Increment,
    /// C(p, n), R(n) and their difference; points are lags n, p from --lag-p.
    Lag,
}

#[derive(Debug, Args)]
struct CovArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Evaluation points, comma-separated; grouping depends on --kind.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true, value_name = "X1,X2,..")]
    points: Vec<f64>,
    /// Kernel to evaluate.
    #[arg(long, value_enum, default_value_t = CovKind::Msfbm)]
    kind: CovKind,
    /// Position p of the first increment for --kind lag [default: 0].
    #[arg(long, value_name = "P")]
    lag_p: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Auto,
    Exact,
    ViaFbm,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => Route::Auto,
            RouteArg::Exact => Route::Exact,
            RouteArg::ViaFbm => Route::ViaFbm,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    replicas: ReplicaArgs,
    /// Sampler construction [default: auto].
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    /// Largest grid sampled by dense factorization under --route auto.
    #[arg(long, value_name = "N")]
    dense_limit: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suites to run [default: all].
    #[arg(value_enum, value_name = "SUITE")]
    suites: Vec<Suite>,
    /// Suites to run, comma-separated (alternative to the positional form).
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Option<Vec<Suite>>,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    replicas: ReplicaArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DimsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    replicas: ReplicaArgs,
    /// Level x of the level set [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    level: Option<f64>,
    /// Left cut-off of the level set [default: horizon / 100].
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SrdArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Position p of the first increment [default: 0].
    #[arg(long, value_name = "P")]
    lag_p: Option<u64>,
    /// Largest lag n [default: 100000].
    #[arg(long, value_name = "N")]
    n_max: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad input: exit code 2.
    Validation(String),
    /// Numerical breakdown: exit code 3.
    Numerical(String),
    /// A verification report was written but some check failed: exit code 1.
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::VerifyFailed => EXIT_VERIFY_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => f.write_str(m),
            CliError::VerifyFailed => f.write_str("verification failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::FactorizationFailure { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl SpecArgs {
    fn apply(self, o: &mut Overrides) {
        o.coeffs = self.coeffs;
        o.hurst = self.hurst;
        o.half_tol = self.half_tol;
    }
}

impl GridArgs {
    fn apply(self, o: &mut Overrides) {
        o.grid_points = self.grid_points;
        o.horizon = self.horizon;
        o.times = self.times;
    }
}

impl ReplicaArgs {
    fn apply(self, o: &mut Overrides) {
        o.reps = self.reps;
        o.seed = self.seed;
    }
}

impl OutputArgs {
    fn apply(self, o: &mut Overrides) {
        o.format = self.format;
        o.out = self.out;
    }
}

fn defaults(grid_points: usize, reps: usize, format: Format) -> Defaults {
    Defaults { grid_points, reps, format }
}

/// Caps the global thread pool at `MSFBM_THREADS` when it is set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // Fails only if the pool was already initialized, in which case the
    // existing pool is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs the command and returns its exit code. Diagnostics
/// go to standard error.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK });
        }
    };
    match configure_threads().and_then(|()| execute(cli)) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("msfbm: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Entry point of the `msfbm` binary.
pub fn main() -> ExitCode {
    run_from(std::env::args_os())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut o = Overrides::default();
    match cli.command {
        Command::Cov(a) => {
            a.spec.apply(&mut o);
            a.output.apply(&mut o);
            o.lag_p = a.lag_p;
            let cfg = RunConfig::resolve(o, file, defaults(2, 1, Format::Csv))?;
            commands::cov(&cfg, a.kind, &a.points)
        }
        Command::Simulate(a) => {
            a.spec.apply(&mut o);
            a.grid.apply(&mut o);
            a.replicas.apply(&mut o);
            a.output.apply(&mut o);
            o.route = a.route.map(Route::from);
            o.dense_limit = a.dense_limit;
            let cfg = RunConfig::resolve(o, file, defaults(16, 1, Format::Csv))?;
            commands::simulate(&cfg)
        }
        Command::Verify(a) => {
            a.spec.apply(&mut o);
            a.replicas.apply(&mut o);
            a.output.apply(&mut o);
            let mut suites = a.suites;
            suites.extend(a.suite.unwrap_or_default());
            o.suite = (!suites.is_empty()).then_some(suites);
            let cfg = RunConfig::resolve(o, file, defaults(16, 1, Format::Json))?;
            commands::verify(&cfg)
        }
        Command::Dims(a) => {
            a.spec.apply(&mut o);
            a.grid.apply(&mut o);
            a.replicas.apply(&mut o);
            a.output.apply(&mut o);
            o.level = a.level;
            o.eps = a.eps;
            let cfg = RunConfig::resolve(o, file, defaults(commands::DIMS_POINTS, commands::DIMS_REPS, Format::Json))?;
            commands::dims(&cfg)
        }
        Command::Classify(a) => {
            a.spec.apply(&mut o);
            a.output.apply(&mut o);
            let cfg = RunConfig::resolve(o, file, defaults(2, 1, Format::Json))?;
            commands::classify(&cfg)
        }
        Command::Srd(a) => {
            a.spec.apply(&mut o);
            a.output.apply(&mut o);
            o.lag_p = a.lag_p;
            o.n_max = a.n_max;
            let cfg = RunConfig::resolve(o, file, defaults(2, 1, Format::Csv))?;
            commands::srd(&cfg)
        }
    }
}

#[cfg(test)]
mod tests;
