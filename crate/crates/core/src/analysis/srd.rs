use super::fit::{fit_log_log, LineFit};
use crate::error::{Error, Result};
use crate::kernels::{lag_cov_c_closed_form, ProcessSpec};

/// Partial sums `sum_{n=1}^{m} C(p, n)` for `m = 1..=n_max`.
///
/// The terms decay like `n^{2 h_max - 3}`, so the sums converge: the
/// increments of the process are short-range dependent.
pub fn srd_partial_sums(spec: &ProcessSpec, p: u64, n_max: u64) -> Result<Vec<f64>> {
    if n_max < 10 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 10, got {n_max}")));
    }
    let mut acc = 0.0;
    (1..=n_max)
        .map(|n| {
            acc += lag_cov_c_closed_form(spec, p, n)?;
            Ok(acc)
        })
        .collect()
}

/// Log-log slope of `|C(p, n)|` over `points` log-spaced integer lags in
/// `[n_lo, n_hi]`; about `2 h_max - 3` when the leading coefficient is
/// nonzero.
pub fn srd_tail_slope(spec: &ProcessSpec, p: u64, n_lo: u64, n_hi: u64, points: usize) -> Result<LineFit> {
    if !(1 <= n_lo && n_lo < n_hi) || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_lo < n_hi and at least 2 points, got [{n_lo}, {n_hi}] with {points}"
        )));
    }
    let ratio = (n_hi as f64 / n_lo as f64).ln();
    let mut lags: Vec<u64> = (0..points)
        .map(|i| (n_lo as f64 * (ratio * i as f64 / (points - 1) as f64).exp()).round() as u64)
        .collect();
    lags.dedup();
    let mut x = Vec::with_capacity(lags.len());
    let mut y = Vec::with_capacity(lags.len());
    for &n in &lags {
        let c = lag_cov_c_closed_form(spec, p, n)?;
        if c == 0.0 {
            return Err(Error::PreconditionViolated(format!(
                "C({p}, {n}) vanishes; the tail has no power law"
            )));
        }
        x.push(n as f64);
        y.push(c.abs());
    }
    fit_log_log(&x, &y)
}
