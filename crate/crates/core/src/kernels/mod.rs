//! Closed-form second-order structure of the mixed sub-fractional Brownian
//! motion `S_t = sum_i a_i xi^{H_i}(t)`.
//!
//! Every function here is pure and deterministic. Sums over components run
//! over all `N` components in index order; components with `a_i = 0`
//! contribute exactly zero, so they never change a value.
//!
//! Differences of nearly equal powers are never formed directly: see
//! [`power`] for the stable primitives. Values that the formulas define
//! as exact zeros (an empty increment, a Brownian component's increments on
//! disjoint intervals) come out as exact zeros.

mod power;
mod spec;

pub use spec::{is_half, IncrementWindow, ProcessSpec};

use serde::Serialize;

use crate::error::{Error, Result};
pub(crate) use power::second_difference;
use power::{pow, pow_diff, sym_second_diff};
use spec::check_hurst;

fn check_time(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(x))
    }
}

fn check_ordered(s: f64, t: f64) -> Result<()> {
    check_time(s)?;
    check_time(t)?;
    if s > t {
        return Err(Error::TimeOrder(format!("need s <= t, got s = {s}, t = {t}")));
    }
    Ok(())
}

/// Fractional Brownian motion covariance on the whole real line:
/// `(|t|^{2h} + |s|^{2h} - |t - s|^{2h}) / 2`.
pub fn fbm_cov(h: f64, s: f64, t: f64) -> Result<f64> {
    check_hurst(h)?;
    Ok(fbm_cov_unchecked(2.0 * h, s, t))
}

pub(crate) fn fbm_cov_unchecked(alpha: f64, s: f64, t: f64) -> f64 {
    0.5 * (pow(t.abs(), alpha) + pow(s.abs(), alpha) - pow((t - s).abs(), alpha))
}

/// Sub-fractional Brownian motion covariance for `s, t >= 0`:
/// `s^{2h} + t^{2h} - ((s + t)^{2h} + |t - s|^{2h}) / 2`.
pub fn sfbm_cov(h: f64, s: f64, t: f64) -> Result<f64> {
    check_hurst(h)?;
    check_time(s)?;
    check_time(t)?;
    Ok(sfbm_cov_unchecked(2.0 * h, s, t))
}

#[inline]
fn sfbm_cov_unchecked(alpha: f64, s: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        // Brownian component: the terms collapse to min(s, t); returning it
        // directly keeps Markov-type identities exact.
        return s.min(t);
    }
    pow(s, alpha) + pow(t, alpha) - 0.5 * (pow(s + t, alpha) + pow((t - s).abs(), alpha))
}

/// `Cov(S_s, S_t) = sum_i a_i^2 Cov(xi^{H_i}_s, xi^{H_i}_t)`.
pub fn msfbm_cov(spec: &ProcessSpec, s: f64, t: f64) -> Result<f64> {
    check_time(s)?;
    check_time(t)?;
    Ok(msfbm_cov_unchecked(spec, s, t))
}

pub(crate) fn msfbm_cov_unchecked(spec: &ProcessSpec, s: f64, t: f64) -> f64 {
    spec.components()
        .map(|(a, h)| a * a * sfbm_cov_unchecked(2.0 * h, s, t))
        .sum()
}

/// `E[S_t^2] = sum_i a_i^2 (2 - 2^{2H_i - 1}) t^{2H_i}`.
pub fn msfbm_var(spec: &ProcessSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(spec
        .components()
        .map(|(a, h)| a * a * (2.0 - (2.0 * h - 1.0).exp2()) * pow(t, 2.0 * h))
        .sum())
}

/// Covariance of the mixed *fractional* Brownian motion
/// `M_t = sum_i a_i B^{H_i}_t` built from the same parameters.
pub fn mfbm_cov(spec: &ProcessSpec, s: f64, t: f64) -> Result<f64> {
    check_time(s)?;
    check_time(t)?;
    Ok(spec
        .components()
        .map(|(a, h)| a * a * fbm_cov_unchecked(2.0 * h, s, t))
        .sum())
}

/// One component of `E[(xi_t - xi_s)^2]`, `0 <= s <= t`.
///
/// `-2^{a-1}(t^a + s^a) + (t+s)^a + (t-s)^a` regrouped around the midpoint
/// so the bracket that vanishes as `s -> t` is computed without cancellation.
fn component_increment_moment(alpha: f64, s: f64, t: f64) -> f64 {
    if s == t {
        return 0.0;
    }
    if s == 0.0 {
        return (2.0 - (alpha - 1.0).exp2()) * pow(t, alpha);
    }
    let d = t - s;
    let m = 0.5 * (t + s);
    pow(d, alpha) - (alpha - 1.0).exp2() * pow(m, alpha) * sym_second_diff(alpha, d / (t + s))
}

/// Second moment of the increment `S_t - S_s`, `0 <= s <= t`.
pub fn increment_second_moment(spec: &ProcessSpec, s: f64, t: f64) -> Result<f64> {
    check_ordered(s, t)?;
    Ok(spec
        .components()
        .map(|(a, h)| a * a * component_increment_moment(2.0 * h, s, t))
        .sum())
}

/// Per-component constants of the two-sided increment bound
/// `sum a_i^2 gamma_i (t-s)^{2H_i} <= E(S_t - S_s)^2 <= sum a_i^2 nu_i (t-s)^{2H_i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementBoundConstants {
    pub gamma: Vec<f64>,
    pub nu: Vec<f64>,
}

fn bound_constants(h: f64) -> (f64, f64) {
    let c = 2.0 - (2.0 * h - 1.0).exp2();
    if h > 0.5 {
        (c, 1.0)
    } else {
        (1.0, c)
    }
}

pub fn increment_bound_constants(spec: &ProcessSpec) -> IncrementBoundConstants {
    let (gamma, nu) = spec.hurst().iter().map(|&h| bound_constants(h)).unzip();
    IncrementBoundConstants { gamma, nu }
}

/// `(lower, upper)` bracketing [`increment_second_moment`].
pub fn increment_bounds(spec: &ProcessSpec, s: f64, t: f64) -> Result<(f64, f64)> {
    check_ordered(s, t)?;
    let d = t - s;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (a, h) in spec.components() {
        let (gamma, nu) = bound_constants(h);
        lower += a * a * (gamma * pow(d, 2.0 * h));
        upper += a * a * (nu * pow(d, 2.0 * h));
    }
    Ok((lower, upper))
}

/// Increment covariance `Cov(xi_v - xi_u, xi_t - xi_s)` of one unit-weight
/// sub-fractional component.
///
/// The eight powers are paired by shared base so each pair difference is
/// formed without cancellation.
pub fn component_increment_cov(h: f64, w: &IncrementWindow) -> f64 {
    if h == 0.5 {
        // Linear kernel: the eight terms cancel identically.
        return 0.0;
    }
    let alpha = 2.0 * h;
    let (u, v, s, t) = (w.u(), w.v(), w.s(), w.t());
    // (t+u)^a - (t+v)^a
    let p1 = pow_diff(t + v, u - v, alpha);
    // (t-u)^a - (t-v)^a
    let p2 = pow_diff(t - v, v - u, alpha);
    // (s+v)^a - (s+u)^a
    let p3 = pow_diff(s + u, v - u, alpha);
    // (s-v)^a - (s-u)^a
    let p4 = pow_diff(s - u, u - v, alpha);
    0.5 * ((p1 + p3) + (p2 + p4))
}

/// `C_{u,v,s,t} = Cov(S_v - S_u, S_t - S_s)` on non-overlapping intervals.
pub fn increment_cov(spec: &ProcessSpec, w: &IncrementWindow) -> f64 {
    spec.components()
        .map(|(a, h)| a * a * component_increment_cov(h, w))
        .sum()
}

/// Sum of the absolute values of the eight raw power terms of
/// [`increment_cov`], weighted by `a_i^2 / 2`.
///
/// This is the scale against which rounding in any evaluation of the
/// increment covariance (direct or through covariances) is measured.
pub fn increment_cov_magnitude(spec: &ProcessSpec, w: &IncrementWindow) -> f64 {
    let (u, v, s, t) = (w.u(), w.v(), w.s(), w.t());
    spec.components()
        .map(|(a, h)| {
            let alpha = 2.0 * h;
            let terms = [t + u, t - u, s + v, s - v, t + v, t - v, s + u, s - u];
            0.5 * a * a * terms.iter().map(|&x| pow(x, alpha)).sum::<f64>()
        })
        .sum()
}

/// Sum of the absolute values of the raw power terms of [`msfbm_cov`].
pub fn cov_magnitude(spec: &ProcessSpec, s: f64, t: f64) -> f64 {
    spec.components()
        .map(|(a, h)| {
            let alpha = 2.0 * h;
            a * a
                * (pow(s, alpha)
                    + pow(t, alpha)
                    + 0.5 * (pow(s + t, alpha) + pow((t - s).abs(), alpha)))
        })
        .sum()
}

fn check_lag(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroLag)
    } else {
        Ok(())
    }
}

/// Largest integer below which `x.fract() == 0` still means `x` is an
/// exactly represented integer lag.
const EXACT_INTEGER_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

/// Lag covariance `C(x, n) = Cov(S_{x+1} - S_x, S_{x+n+1} - S_{x+n})`.
///
/// Integer `x` goes through the closed form in second differences (and is
/// checked against the window form in debug builds); real `x` through
/// [`increment_cov`].
pub fn lag_cov_c(spec: &ProcessSpec, x: f64, n: u64) -> Result<f64> {
    check_lag(n)?;
    check_time(x)?;
    if x.fract() == 0.0 && x < EXACT_INTEGER_LIMIT {
        let closed = lag_cov_c_closed_form(spec, x as u64, n)?;
        debug_assert!({
            let w = lag_window(x, n)?;
            let window = increment_cov(spec, &w);
            (closed - window).abs() <= 1e-12 * increment_cov_magnitude(spec, &w)
        });
        Ok(closed)
    } else {
        lag_cov_c_window(spec, x, n)
    }
}

pub(crate) fn lag_window(x: f64, n: u64) -> Result<IncrementWindow> {
    let n = n as f64;
    IncrementWindow::new(x, x + 1.0, x + n, x + n + 1.0)
}

/// `C(x, n)` through the generic window form.
pub fn lag_cov_c_window(spec: &ProcessSpec, x: f64, n: u64) -> Result<f64> {
    check_lag(n)?;
    check_time(x)?;
    Ok(increment_cov(spec, &lag_window(x, n)?))
}

/// `C(p, n)` for integer `p` through the six-term closed form
/// `sum a_i^2/2 [D2(n) - D2(2p + n + 1)]`, `D2(m) = (m+1)^a - 2m^a + (m-1)^a`.
pub fn lag_cov_c_closed_form(spec: &ProcessSpec, p: u64, n: u64) -> Result<f64> {
    check_lag(n)?;
    let near = n as f64;
    let far = (2 * p + n + 1) as f64;
    Ok(spec
        .components()
        .map(|(a, h)| {
            let alpha = 2.0 * h;
            0.5 * a * a * (second_difference(alpha, near) - second_difference(alpha, far))
        })
        .sum())
}

/// Leading large-`n` term of `C(p, n)`:
/// `sum_i 2(1 - H_i) H_i (2H_i - 1)(2p + 1) a_i^2 n^{2H_i - 3}`.
pub fn lag_cov_c_asymptotic(spec: &ProcessSpec, p: u64, n: u64) -> Result<f64> {
    check_lag(n)?;
    let q = (2 * p + 1) as f64;
    let n = n as f64;
    Ok(spec
        .components()
        .map(|(a, h)| 2.0 * (1.0 - h) * h * (2.0 * h - 1.0) * q * a * a * n.powf(2.0 * h - 3.0))
        .sum())
}

/// Lag covariance of the mixed fractional Brownian motion increments,
/// `R(n) = sum a_i^2/2 [(n+1)^{2H_i} - 2n^{2H_i} + (n-1)^{2H_i}]`; it does not
/// depend on the position of the first increment.
pub fn mfbm_lag_cov_r(spec: &ProcessSpec, n: u64) -> Result<f64> {
    check_lag(n)?;
    let n = n as f64;
    Ok(spec
        .components()
        .map(|(a, h)| 0.5 * a * a * second_difference(2.0 * h, n))
        .sum())
}

/// `C(x, n) - R(n)`: how far the increment covariance at position `x` is
/// from the stationary-increment value. Tends to zero as `x` grows.
pub fn stationarity_gap(spec: &ProcessSpec, x: f64, n: u64) -> Result<f64> {
    check_lag(n)?;
    check_time(x)?;
    if x.fract() == 0.0 && x < EXACT_INTEGER_LIMIT {
        // The D2(n) terms of the closed form are exactly R(n).
        let far = 2.0 * x + n as f64 + 1.0;
        Ok(spec
            .components()
            .map(|(a, h)| -0.5 * a * a * second_difference(2.0 * h, far))
            .sum())
    } else {
        Ok(lag_cov_c_window(spec, x, n)? - mfbm_lag_cov_r(spec, n)?)
    }
}

/// `Cov(S_s, S_u) Var(S_t) - Cov(S_s, S_t) Cov(S_t, S_u)` for `0 < s < t < u`.
///
/// A centered Gaussian process with positive variance is Markov exactly
/// when this vanishes for every ordered triple.
pub fn markov_residual(spec: &ProcessSpec, s: f64, t: f64, u: f64) -> Result<f64> {
    for x in [s, t, u] {
        check_time(x)?;
    }
    if !(0.0 < s && s < t && t < u) {
        return Err(Error::TimeOrder(format!("need 0 < s < t < u, got ({s}, {t}, {u})")));
    }
    let cov = |x, y| msfbm_cov_unchecked(spec, x, y);
    Ok(cov(s, u) * cov(t, t) - cov(s, t) * cov(t, u))
}

/// `Var(S_t | S_s) = Var(S_t) - Cov(S_s, S_t)^2 / Var(S_s)`.
///
/// This is `min_b E(S_t - b S_s)^2`, attained at `b = Cov(S_s, S_t) / Var(S_s)`.
pub fn conditional_variance(spec: &ProcessSpec, t: f64, s: f64) -> Result<f64> {
    check_time(t)?;
    check_time(s)?;
    if s == 0.0 || t == 0.0 {
        return Err(Error::PreconditionViolated(
            "conditional variance needs s > 0 and t > 0".into(),
        ));
    }
    if s == t {
        return Ok(0.0);
    }
    let c = msfbm_cov_unchecked(spec, s, t);
    let value = msfbm_var(spec, t)? - c * c / msfbm_var(spec, s)?;
    Ok(value.max(0.0))
}

/// Coefficients `a_i h^{H_i}`: the spec whose process at time `t` has the
/// law of the original at time `h t`.
pub fn rescale_coeffs(spec: &ProcessSpec, h: f64) -> Result<ProcessSpec> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::NonPositiveScale(h));
    }
    let coeffs = spec.components().map(|(a, hurst)| a * h.powf(hurst)).collect();
    ProcessSpec::new(coeffs, spec.hurst().to_vec())
}

#[cfg(test)]
mod tests;
