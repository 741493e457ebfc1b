//! Accurate evaluation of powers and of differences of nearby powers.
//!
//! Most kernels are sums of `x^alpha` terms that nearly cancel once the
//! arguments are large compared to their spacing. The helpers here keep the
//! cancellation out of floating point: differences are formed with
//! `expm1`/`ln_1p`, and symmetric second differences with a binomial series.

/// `x^alpha` for `x >= 0`, with `0^alpha = 0`.
#[inline]
pub(crate) fn pow(x: f64, alpha: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(alpha)
    }
}

/// `(base + delta)^alpha - base^alpha` for `base > 0`, `base + delta >= 0`.
///
/// Relative accuracy is a few ulps as long as `delta` itself is exact.
#[inline]
pub(crate) fn pow_diff(base: f64, delta: f64, alpha: f64) -> f64 {
    debug_assert!(base > 0.0);
    if delta == 0.0 {
        return 0.0;
    }
    let ratio = delta / base;
    if ratio <= -1.0 {
        // (base + delta) is zero up to rounding.
        return -pow(base, alpha);
    }
    pow(base, alpha) * (alpha * ratio.ln_1p()).exp_m1()
}

/// `(1 + h)^alpha + (1 - h)^alpha - 2` for `0 <= h <= 1`.
///
/// For `h <= 1/2` this sums `2 * sum_k C(alpha, 2k) h^(2k)`, which has no
/// cancellation and is exactly zero when `alpha` is 1.
pub(crate) fn sym_second_diff(alpha: f64, h: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&h));
    if alpha == 1.0 {
        return 0.0;
    }
    if h > 0.5 {
        return pow(1.0 + h, alpha) + pow(1.0 - h, alpha) - 2.0;
    }
    let h2 = h * h;
    let mut binom = 1.0;
    let mut hp = 1.0;
    let mut sum = 0.0;
    for j in (2..400).step_by(2) {
        let jf = j as f64;
        binom *= (alpha - jf + 2.0) / (jf - 1.0);
        binom *= (alpha - jf + 1.0) / jf;
        hp *= h2;
        let term = 2.0 * binom * hp;
        sum += term;
        if term == 0.0 || term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Central second difference `(m+1)^alpha - 2 m^alpha + (m-1)^alpha`, `m >= 1`.
pub(crate) fn second_difference(alpha: f64, m: f64) -> f64 {
    debug_assert!(m >= 1.0);
    pow(m, alpha) * sym_second_diff(alpha, 1.0 / m)
}
