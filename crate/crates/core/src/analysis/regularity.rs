use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_log_log, LineFit};
use crate::error::{Error, Result};
use crate::sampler::Ensemble;

/// Lags (in grid steps) of the variogram regression: the smallest decade.
pub const VARIOGRAM_LAGS: std::ops::RangeInclusive<usize> = 1..=10;

/// Minimum number of lag scales for a variogram fit.
const MIN_LAGS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub h_hat: f64,
    pub stderr: f64,
    /// Lags (in grid steps) used in the regression.
    pub lags: Vec<usize>,
}

fn require_uniform(ens: &Ensemble) -> Result<f64> {
    ens.grid()
        .step()
        .ok_or_else(|| Error::GridMismatch("estimator needs a uniform grid".into()))
}

/// Variogram estimate of the pathwise Hölder exponent.
///
/// Regresses the log of the mean squared increment `|S(t + k dt) - S(t)|^2`
/// (averaged over all positions and replicas) on `log(k dt)` for
/// `k` in [`VARIOGRAM_LAGS`]; the exponent is half the slope. At small
/// scales the roughest active component dominates, so the estimate targets
/// `h_min`.
pub fn holder_exponent_estimate(ens: &Ensemble) -> Result<HolderEstimate> {
    let step = require_uniform(ens)?;
    let intervals = ens.grid().len() - 1;
    let lags: Vec<usize> = VARIOGRAM_LAGS.filter(|&k| k < intervals).collect();
    if lags.len() < MIN_LAGS {
        return Err(Error::InsufficientResolution(format!(
            "variogram needs {MIN_LAGS} lag scales, the grid offers {}",
            lags.len()
        )));
    }
    let per_path: Vec<Vec<f64>> = ens
        .paths()
        .par_iter()
        .map(|p| {
            let v = p.values();
            lags.iter()
                .map(|&k| v.windows(k + 1).map(|w| (w[k] - w[0]).powi(2)).sum::<f64>())
                .collect()
        })
        .collect();
    let variogram: Vec<f64> = lags
        .iter()
        .enumerate()
        .map(|(l, &k)| {
            let total: f64 = per_path.iter().map(|row| row[l]).sum();
            total / (per_path.len() * (intervals + 1 - k)) as f64
        })
        .collect();
    let scales: Vec<f64> = lags.iter().map(|&k| k as f64 * step).collect();
    let fit = fit_log_log(&scales, &variogram)?;
    Ok(HolderEstimate { h_hat: fit.slope / 2.0, stderr: fit.slope_stderr / 2.0, lags })
}

/// One row of the non-differentiability probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub eps: f64,
    pub mean_max_quotient: f64,
}

/// Points per side at which each probe window is evaluated.
const PROBE_POINTS: usize = 8;
/// Minimum number of nested windows.
const MIN_WINDOWS: usize = 4;

/// Difference-quotient probe around `t0`.
///
/// For nested windows `eps = 8 dt * 2^k` (as long as `[t0 - eps, t0 + eps]`
/// stays on the grid), evaluates `max |S(t) - S(t0)| / |t - t0|` at the
/// points `t = t0 ± j eps / 8`, `j = 1..=8`, so every window is seen at its
/// own resolution, and averages over replicas. Rows are ordered by
/// increasing `eps`. For a rough path the quotient grows like
/// `eps^(h_min - 1)` as the window shrinks; for a differentiable path it
/// stays bounded.
pub fn nondiff_probe(ens: &Ensemble, t0: f64) -> Result<Vec<ProbeRow>> {
    let step = require_uniform(ens)?;
    let grid = ens.grid();
    let i0 = grid
        .index_of(t0)
        .ok_or_else(|| Error::GridMismatch(format!("t0 = {t0} is not a grid point")))?;
    let room = i0.min(grid.len() - 1 - i0);
    let mut strides = Vec::new();
    let mut stride = 1usize;
    while PROBE_POINTS * stride <= room {
        strides.push(stride);
        stride *= 2;
    }
    if strides.len() < MIN_WINDOWS {
        return Err(Error::InsufficientResolution(format!(
            "t0 = {t0} leaves room for {} nested windows, need {MIN_WINDOWS}",
            strides.len()
        )));
    }
    let per_path: Vec<Vec<f64>> = ens
        .paths()
        .par_iter()
        .map(|p| {
            let v = p.values();
            strides
                .iter()
                .map(|&s| {
                    (1..=PROBE_POINTS)
                        .flat_map(|j| {
                            let d = (j * s) as f64 * step;
                            [(v[i0 + j * s] - v[i0]).abs() / d, (v[i0 - j * s] - v[i0]).abs() / d]
                        })
                        .fold(0.0, f64::max)
                })
                .collect()
        })
        .collect();
    let n = per_path.len() as f64;
    Ok(strides
        .iter()
        .enumerate()
        .map(|(l, &s)| ProbeRow {
            eps: (PROBE_POINTS * s) as f64 * step,
            mean_max_quotient: per_path.iter().map(|row| row[l]).sum::<f64>() / n,
        })
        .collect())
}

/// Log-log slope of the probe table; about `h_min - 1` for rough paths and
/// 0 for differentiable ones.
pub fn probe_slope(rows: &[ProbeRow]) -> Result<LineFit> {
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let q: Vec<f64> = rows.iter().map(|r| r.mean_max_quotient).collect();
    fit_log_log(&eps, &q)
}
