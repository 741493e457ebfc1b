//! Run configuration: command-line flags layered over an optional TOML
//! file layered over built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::kernels::ProcessSpec;
use crate::sampler::{Route, SamplerConfig, TimeGrid};
use crate::verify::Suite;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Keys accepted in a config file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub coeffs: Option<Vec<f64>>,
    pub hurst: Option<Vec<f64>>,
    pub half_tol: Option<f64>,
    pub grid_points: Option<usize>,
    pub horizon: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub suite: Option<Vec<Suite>>,
    pub level: Option<f64>,
    pub eps: Option<f64>,
    pub lag_p: Option<u64>,
    pub n_max: Option<u64>,
    pub sampler: Option<SamplerConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config file {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config file {}: {e}", path.display())))
    }
}

/// Flags shared by the subcommands, all optional so that an unset flag
/// falls through to the config file and then to the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub coeffs: Option<Vec<f64>>,
    pub hurst: Option<Vec<f64>>,
    pub half_tol: Option<f64>,
    pub grid_points: Option<usize>,
    pub horizon: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub suite: Option<Vec<Suite>>,
    pub level: Option<f64>,
    pub eps: Option<f64>,
    pub lag_p: Option<u64>,
    pub n_max: Option<u64>,
    pub route: Option<Route>,
    pub dense_limit: Option<usize>,
}

/// Per-command defaults for the keys whose sensible value differs
/// between subcommands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub grid_points: usize,
    pub reps: usize,
    pub format: Format,
}

pub const DEFAULT_HORIZON: f64 = 1.0;
pub const DEFAULT_LEVEL: f64 = 0.0;
/// Fraction of the horizon cut off at the left of the level set.
pub const DEFAULT_EPS_FRACTION: f64 = 0.01;
pub const DEFAULT_N_MAX: u64 = 100_000;

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` when neither `hurst` nor `coeffs` was given anywhere.
    pub spec: Option<ProcessSpec>,
    pub half_tol: f64,
    pub grid_points: usize,
    pub horizon: f64,
    pub times: Option<Vec<f64>>,
    pub reps: usize,
    /// Whether `reps` came from a flag or the file rather than the default.
    pub reps_given: bool,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub suites: Vec<Suite>,
    pub level: f64,
    pub eps: Option<f64>,
    pub lag_p: u64,
    pub n_max: u64,
    pub sampler: SamplerConfig,
}

impl RunConfig {
    /// Applies `flags`, then `file`, then `defaults` for every key.
    pub fn resolve(flags: Overrides, file: FileConfig, defaults: Defaults) -> Result<Self, CliError> {
        let coeffs = flags.coeffs.or(file.coeffs);
        let hurst = flags.hurst.or(file.hurst);
        let spec = match (coeffs, hurst) {
            (None, None) => None,
            (Some(_), None) => {
                return Err(CliError::Validation("--coeffs given without --hurst".into()));
            }
            (coeffs, Some(hurst)) => {
                let coeffs = coeffs.unwrap_or_else(|| vec![1.0; hurst.len()]);
                Some(ProcessSpec::new(coeffs, hurst)?)
            }
        };
        let half_tol = flags.half_tol.or(file.half_tol).unwrap_or(0.0);
        if !(0.0..0.5).contains(&half_tol) {
            return Err(CliError::Validation(format!("half_tol must lie in [0, 0.5), got {half_tol}")));
        }
        let mut sampler = file.sampler.unwrap_or_default();
        if let Some(route) = flags.route {
            sampler.route = route;
        }
        if let Some(limit) = flags.dense_limit {
            sampler.dense_limit = limit;
        }
        let reps = flags.reps.or(file.reps);
        Ok(Self {
            spec,
            half_tol,
            grid_points: flags.grid_points.or(file.grid_points).unwrap_or(defaults.grid_points),
            horizon: flags.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            times: flags.times.or(file.times),
            reps_given: reps.is_some(),
            reps: reps.unwrap_or(defaults.reps),
            seed: flags.seed.or(file.seed).unwrap_or(crate::verify::DEFAULT_SEED),
            format: flags.format.or(file.format).unwrap_or(defaults.format),
            out: flags.out.or(file.out),
            suites: flags.suite.or(file.suite).unwrap_or_else(|| Suite::ALL.to_vec()),
            level: flags.level.or(file.level).unwrap_or(DEFAULT_LEVEL),
            eps: flags.eps.or(file.eps),
            lag_p: flags.lag_p.or(file.lag_p).unwrap_or(0),
            n_max: flags.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX),
            sampler,
        })
    }

    /// The spec, required by every command except `verify`.
    pub fn require_spec(&self) -> Result<&ProcessSpec, CliError> {
        self.spec
            .as_ref()
            .ok_or_else(|| CliError::Validation("a process spec is required: pass --hurst (and optionally --coeffs)".into()))
    }

    /// Explicit `times` if given, otherwise `grid_points` uniform points on
    /// `[0, horizon]`.
    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        Ok(match &self.times {
            Some(times) => TimeGrid::new(times.clone())?,
            None => TimeGrid::uniform(self.grid_points, self.horizon)?,
        })
    }
}
