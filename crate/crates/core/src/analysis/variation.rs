use rayon::prelude::*;
use serde::Serialize;

use super::fit::fit_log_log;
use super::moments::mean_and_stderr;
use crate::error::{Error, Result};
use crate::kernels::ProcessSpec;
use crate::sampler::{sample_ensemble_with, SamplePath, SamplerConfig, TimeGrid};

/// Grid indices of the uniform partition `j T / n`, `j = 0..=n`.
fn partition_indices(grid: &TimeGrid, n_sub: usize) -> Result<Vec<usize>> {
    if n_sub == 0 {
        return Err(Error::InvalidArgument("partition needs at least one interval".into()));
    }
    let intervals = grid.len() - 1;
    if grid.is_uniform() {
        return if intervals % n_sub == 0 {
            let stride = intervals / n_sub;
            Ok((0..=n_sub).map(|j| j * stride).collect())
        } else {
            Err(Error::GridMismatch(format!(
                "a uniform {}-interval grid does not contain the {n_sub}-interval partition",
                intervals
            )))
        };
    }
    let horizon = grid.horizon();
    (0..=n_sub)
        .map(|j| {
            let t = horizon * j as f64 / n_sub as f64;
            grid.index_of(t).ok_or_else(|| {
                Error::GridMismatch(format!("partition point {t} is not on the grid"))
            })
        })
        .collect()
}

/// `A_{n,p} = sum_{j=1}^{n} |S(jT/n) - S((j-1)T/n)|^p` over the uniform
/// `n`-interval partition of the path's horizon.
pub fn p_variation_stat(path: &SamplePath, p: f64, n_sub: usize) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("variation order must be positive, got {p}")));
    }
    let idx = partition_indices(path.grid(), n_sub)?;
    let v = path.values();
    Ok(sum_abs_pow(idx.windows(2).map(|w| v[w[1]] - v[w[0]]), p))
}

fn sum_abs_pow(increments: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p == 2.0 {
        increments.map(|d| d * d).sum()
    } else {
        increments.map(|d| d.abs().powf(p)).sum()
    }
}

/// Scaling of the mean `p`-variation sum over dyadic refinements of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub p: f64,
    /// Number of partition intervals `n = 2^m` per level.
    pub partition_sizes: Vec<u64>,
    /// Mean of `A_{n,p}` across replicas, per level.
    pub statistics: Vec<f64>,
    /// Standard error of each mean.
    pub statistic_stderrs: Vec<f64>,
    /// Least-squares slope of `ln(statistic)` against `ln(n)`.
    pub fitted_log_slope: f64,
    pub slope_stderr: f64,
}

/// [`variation_scaling`] for `p = 2`.
pub fn qv_scaling_exponent(
    spec: &ProcessSpec,
    levels: &[u32],
    n_reps: usize,
    master_seed: u64,
) -> Result<VariationReport> {
    variation_scaling(spec, 2.0, levels, n_reps, master_seed, &SamplerConfig::default())
}

/// Simulates `n_reps` paths on the uniform grid with `2^max(levels)`
/// intervals over `[0, 1]` and evaluates `A_{2^m, p}` for each level `m` by
/// subsampling the same paths.
///
/// For `p = 2` the expected slope is `1 - 2 h_min`: positive (divergent
/// quadratic variation) when `h_min < 1/2`, negative (vanishing) when every
/// active `H_i > 1/2`, and zero when `h_min = 1/2`, in which case the
/// statistics settle at the Brownian weight `sum_{H_i = 1/2} a_i^2`.
pub fn variation_scaling(
    spec: &ProcessSpec,
    p: f64,
    levels: &[u32],
    n_reps: usize,
    master_seed: u64,
    config: &SamplerConfig,
) -> Result<VariationReport> {
    if levels.len() < 2 {
        return Err(Error::InsufficientResolution("need at least two refinement levels".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("refinement levels must be strictly increasing".into()));
    }
    if n_reps < 2 {
        return Err(Error::InsufficientReplicas(n_reps));
    }
    let finest = *levels.last().expect("nonempty");
    let grid = TimeGrid::dyadic(finest, 1.0)?;
    let ens = sample_ensemble_with(spec, &grid, n_reps, master_seed, config)?;
    let per_path: Vec<Vec<f64>> = ens
        .paths()
        .par_iter()
        .map(|path| {
            levels
                .iter()
                .map(|&m| p_variation_stat(path, p, 1usize << m).expect("dyadic subgrid"))
                .collect()
        })
        .collect();
    let mut statistics = Vec::with_capacity(levels.len());
    let mut statistic_stderrs = Vec::with_capacity(levels.len());
    for l in 0..levels.len() {
        let column: Vec<f64> = per_path.iter().map(|row| row[l]).collect();
        let (mean, se) = mean_and_stderr(&column);
        statistics.push(mean);
        statistic_stderrs.push(se);
    }
    let partition_sizes: Vec<u64> = levels.iter().map(|&m| 1u64 << m).collect();
    let sizes: Vec<f64> = partition_sizes.iter().map(|&n| n as f64).collect();
    let fit = fit_log_log(&sizes, &statistics)?;
    Ok(VariationReport {
        p,
        partition_sizes,
        statistics,
        statistic_stderrs,
        fitted_log_slope: fit.slope,
        slope_stderr: fit.slope_stderr,
    })
}
