//! Exact qualitative verdicts derived from the active Hurst set: Markov
//! property, semimartingale property, the sign of increment correlations
//! and how the correlation responds to a component's weight.
//!
//! Only active components (`a_i != 0`) take part. Comparisons of `H_i`
//! with `1/2` are exact by default; `half_tol` widens them symmetrically.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{increment_cov, is_half, IncrementWindow, ProcessSpec};

/// Which clause of the semimartingale characterization decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SemimartingaleReason {
    /// Some active `H_k = 1/2` and every other active `H_i` is `1/2` or in
    /// `(3/4, 1)`: a semimartingale (equivalent in law to a scaled
    /// Brownian motion).
    HalfWitnessAndRest,
    /// Some active `H_i < 1/2`: infinite quadratic variation.
    LowHurstComponent,
    /// Every active `H_i > 1/2`: zero quadratic variation but infinite
    /// variation.
    AllAboveHalf,
    /// A Brownian component is present, but some active `H_i` lies in
    /// `(1/2, 3/4]`: not a quasimartingale.
    IntermediateHurst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemimartingaleVerdict {
    pub is_semimartingale: bool,
    /// Zero-based index of the Brownian component `k_0`, present exactly
    /// when the process is a semimartingale. The lowest such index is used.
    pub witness: Option<usize>,
    pub reason: SemimartingaleReason,
}

/// Lower end (excluded) of the admissible non-Brownian Hurst range.
const THREE_QUARTERS: f64 = 0.75;

/// Classifies `spec` with exact comparisons against `1/2`.
pub fn semimartingale_classify(spec: &ProcessSpec) -> SemimartingaleVerdict {
    semimartingale_classify_tol(spec, 0.0)
}

/// Classifies `spec`, treating `|H - 1/2| <= half_tol` as Brownian.
///
/// Clauses are tried in order: any rough component, then the
/// semimartingale condition, then "no Brownian component", otherwise an
/// intermediate index blocks it. `H = 3/4` is not admissible.
pub fn semimartingale_classify_tol(spec: &ProcessSpec, half_tol: f64) -> SemimartingaleVerdict {
    let half = |h: f64| is_half(h, half_tol);
    let active: Vec<(usize, f64)> = spec.active().map(|(i, _, h)| (i, h)).collect();
    let witness = active.iter().find(|&&(_, h)| half(h)).map(|&(i, _)| i);
    let (is_semimartingale, reason) = if active.iter().any(|&(_, h)| h < 0.5 && !half(h)) {
        (false, SemimartingaleReason::LowHurstComponent)
    } else if witness.is_some()
        && active.iter().all(|&(_, h)| half(h) || (h > THREE_QUARTERS && h < 1.0))
    {
        (true, SemimartingaleReason::HalfWitnessAndRest)
    } else if witness.is_none() {
        (false, SemimartingaleReason::AllAboveHalf)
    } else {
        (false, SemimartingaleReason::IntermediateHurst)
    };
    SemimartingaleVerdict {
        is_semimartingale,
        witness: if is_semimartingale { witness } else { None },
        reason,
    }
}

/// True iff every active component is Brownian (`H_i = 1/2`).
pub fn markov_verdict(spec: &ProcessSpec) -> bool {
    markov_verdict_tol(spec, 0.0)
}

pub fn markov_verdict_tol(spec: &ProcessSpec, half_tol: f64) -> bool {
    spec.active().all(|(_, _, h)| is_half(h, half_tol))
}

/// Sign of `Cov(S_v - S_u, S_t - S_s)` on non-overlapping intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Zero,
    Positive,
    Negative,
    /// Active indices on both sides of `1/2` (or Brownian mixed with
    /// either): the sign depends on the weights and the window.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignVerdict {
    pub sign: Sign,
}

pub fn increment_sign_predict(spec: &ProcessSpec) -> SignVerdict {
    increment_sign_predict_tol(spec, 0.0)
}

pub fn increment_sign_predict_tol(spec: &ProcessSpec, half_tol: f64) -> SignVerdict {
    let hs: Vec<f64> = spec.active().map(|(_, _, h)| h).collect();
    let sign = if hs.iter().all(|&h| is_half(h, half_tol)) {
        Sign::Zero
    } else if hs.iter().all(|&h| h > 0.5 && !is_half(h, half_tol)) {
        Sign::Positive
    } else if hs.iter().all(|&h| h < 0.5 && !is_half(h, half_tol)) {
        Sign::Negative
    } else {
        Sign::Indeterminate
    };
    SignVerdict { sign }
}

/// Serializable counterpart of [`Ordering`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
}

impl From<Ordering> for Comparison {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }
}

/// Outcome of changing coefficient `i` from `b` to `c` (`|b| <= |c|`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DependenceComparison {
    /// How the increment covariance with `c` compares to the one with `b`.
    pub observed: Comparison,
    /// The ordering implied by `H_i`: larger weight strengthens positive
    /// correlation (`H_i > 1/2`), strengthens negative correlation
    /// (`H_i < 1/2`), and changes nothing for a Brownian component.
    pub predicted: Comparison,
}

impl DependenceComparison {
    pub fn agrees(&self) -> bool {
        self.observed == self.predicted
    }
}

/// Compares the increment covariance on `w` with `a_i = c` against
/// `a_i = b`, evaluated through the kernels, alongside the predicted
/// ordering.
///
/// The covariance is `a_i^2 C_i + (rest)` with `C_i` of fixed sign, so
/// the two orderings agree whenever the per-component term is nonzero at
/// working precision.
pub fn dependence_compare(
    spec: &ProcessSpec,
    i: usize,
    b: f64,
    c: f64,
    w: &IncrementWindow,
) -> Result<DependenceComparison> {
    if i >= spec.n() {
        return Err(Error::InvalidArgument(format!(
            "component index {i} out of range for N = {}",
            spec.n()
        )));
    }
    if !(b.is_finite() && c.is_finite()) {
        return Err(Error::NonFiniteCoefficient(if b.is_finite() { c } else { b }));
    }
    if b.abs() > c.abs() {
        return Err(Error::PreconditionViolated(format!("need |b| <= |c|, got b = {b}, c = {c}")));
    }
    // Evaluate both weights with the rest of the spec held fixed. The
    // covariance is additive over components, so an all-zero spec (which
    // ProcessSpec rejects) contributes zero and is handled directly.
    let with = |v: f64| -> f64 {
        match spec.with_coeff(i, v) {
            Ok(s) => increment_cov(&s, w),
            Err(_) => 0.0,
        }
    };
    let (cov_b, cov_c) = (with(b), with(c));
    let observed = cov_c.partial_cmp(&cov_b).unwrap_or(Ordering::Equal).into();
    let h = spec.hurst()[i];
    let predicted = if b.abs() == c.abs() || h == 0.5 {
        Comparison::Equal
    } else if h > 0.5 {
        Comparison::Greater
    } else {
        Comparison::Less
    };
    Ok(DependenceComparison { observed, predicted })
}
