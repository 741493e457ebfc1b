//! Exact fractional Gaussian noise by circulant embedding (Davies–Harte).

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex64, Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernels::second_difference;

/// Eigenvalues more negative than this fraction of the largest one are
/// treated as a failed embedding; smaller negatives are rounding and are
/// clamped to zero.
const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// Samples `m` consecutive increments of an fBm with Hurst index `h` on a
/// uniform grid of spacing `step`.
pub(crate) struct FgnSampler {
    m: usize,
    /// `sqrt(lambda_k / M)` for the size-`M = 2m` circulant.
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnSampler {
    pub(crate) fn new(h: f64, step: f64, m: usize) -> Result<Self> {
        assert!(m >= 1);
        let alpha = 2.0 * h;
        let var = step.powf(alpha);
        let gamma = |k: usize| {
            if k == 0 {
                var
            } else {
                0.5 * var * second_difference(alpha, k as f64)
            }
        };
        let size = 2 * m;
        let mut row: Vec<Complex64> = (0..size)
            .map(|k| Complex64::new(gamma(k.min(size - k)), 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(0.0, f64::max);
        let mut scale = Vec::with_capacity(size);
        for c in &row {
            let lambda = c.re;
            if lambda < -NEGATIVE_EIGEN_TOL * max {
                return Err(Error::FactorizationFailure { max_diag: var });
            }
            scale.push((lambda.max(0.0) / size as f64).sqrt());
        }
        Ok(Self { m, scale, fft })
    }

    /// Cumulative sums `Y_0 = 0, Y_k = X_1 + ... + X_k` for `k = 0..=m`.
    pub(crate) fn sample_cumulative<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut w: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                Complex64::new(s * a, s * b)
            })
            .collect();
        self.fft.process(&mut w);
        let mut y = Vec::with_capacity(self.m + 1);
        let mut acc = 0.0;
        y.push(acc);
        for c in &w[..self.m] {
            acc += c.re;
            y.push(acc);
        }
        y
    }
}
