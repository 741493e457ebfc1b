use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(N, a, H)` of a mixed sub-fractional Brownian motion
/// `S_t = sum_i a_i xi^{H_i}(t)` with independent components.
///
/// Components with `a_i = 0` are kept (they are part of the user's input)
/// but are ignored by everything that depends on the *active set*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ProcessSpec {
    coeffs: Vec<f64>,
    hurst: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    coeffs: Vec<f64>,
    hurst: Vec<f64>,
}

impl TryFrom<RawSpec> for ProcessSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ProcessSpec::new(raw.coeffs, raw.hurst)
    }
}

impl From<ProcessSpec> for RawSpec {
    fn from(spec: ProcessSpec) -> Self {
        RawSpec { coeffs: spec.coeffs, hurst: spec.hurst }
    }
}

pub(crate) fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::HurstOutOfRange(h))
    }
}

impl ProcessSpec {
    pub fn new(coeffs: Vec<f64>, hurst: Vec<f64>) -> Result<Self> {
        if coeffs.len() != hurst.len() {
            return Err(Error::LengthMismatch { coeffs: coeffs.len(), hurst: hurst.len() });
        }
        if coeffs.is_empty() {
            return Err(Error::EmptySpec);
        }
        for &h in &hurst {
            check_hurst(h)?;
        }
        if let Some(&a) = coeffs.iter().find(|a| !a.is_finite()) {
            return Err(Error::NonFiniteCoefficient(a));
        }
        if coeffs.iter().all(|&a| a == 0.0) {
            return Err(Error::AllCoefficientsZero);
        }
        Ok(Self { coeffs, hurst })
    }

    /// One-component spec `a * xi^H`.
    pub fn single(coeff: f64, hurst: f64) -> Result<Self> {
        Self::new(vec![coeff], vec![hurst])
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn hurst(&self) -> &[f64] {
        &self.hurst
    }

    /// `(a_i, H_i)` for every component, active or not.
    pub fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coeffs.iter().copied().zip(self.hurst.iter().copied())
    }

    /// `(i, a_i, H_i)` for components with `a_i != 0`.
    pub fn active(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.components()
            .enumerate()
            .filter(|(_, (a, _))| *a != 0.0)
            .map(|(i, (a, h))| (i, a, h))
    }

    /// Zero-based indices of the active components; never empty.
    pub fn active_set(&self) -> Vec<usize> {
        self.active().map(|(i, _, _)| i).collect()
    }

    /// Smallest active Hurst index; governs small-scale roughness.
    pub fn h_min(&self) -> f64 {
        self.active().map(|(_, _, h)| h).fold(f64::INFINITY, f64::min)
    }

    /// Largest active Hurst index; governs large-lag behavior.
    pub fn h_max(&self) -> f64 {
        self.active().map(|(_, _, h)| h).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sum of squared coefficients over the components with `H_i = 1/2`
    /// (within `half_tol`): the quadratic variation per unit time.
    pub fn brownian_weight(&self, half_tol: f64) -> f64 {
        self.active()
            .filter(|&(_, _, h)| is_half(h, half_tol))
            .map(|(_, a, _)| a * a)
            .sum()
    }

    /// Copy with coefficient `i` replaced.
    pub fn with_coeff(&self, i: usize, value: f64) -> Result<Self> {
        if i >= self.n() {
            return Err(Error::InvalidArgument(format!(
                "component index {i} out of range for N = {}",
                self.n()
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs[i] = value;
        Self::new(coeffs, self.hurst.clone())
    }
}

/// `H == 1/2` test with an optional tolerance (0 means exact comparison).
#[inline]
pub fn is_half(h: f64, tol: f64) -> bool {
    (h - 0.5).abs() <= tol
}

/// Ordered quadruple `0 <= u < v <= s < t`: two non-overlapping intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementWindow {
    u: f64,
    v: f64,
    s: f64,
    t: f64,
}

impl IncrementWindow {
    pub fn new(u: f64, v: f64, s: f64, t: f64) -> Result<Self> {
        for x in [u, v, s, t] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::NegativeTime(x));
            }
        }
        if !(u < v && v <= s && s < t) {
            return Err(Error::TimeOrder(format!(
                "window needs 0 <= u < v <= s < t, got ({u}, {v}, {s}, {t})"
            )));
        }
        Ok(Self { u, v, s, t })
    }

    pub fn u(&self) -> f64 {
        self.u
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn t(&self) -> f64 {
        self.t
    }
}
