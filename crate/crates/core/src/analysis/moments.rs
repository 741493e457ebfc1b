use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::msfbm_cov;
use crate::sampler::Ensemble;

/// Sample covariance of the process at two grid points, with its Gaussian
/// standard error and the z-score against the exact covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub theory: f64,
    pub zscore_vs_theory: f64,
}

/// Unbiased sample covariance of `S_{t_j}` and `S_{t_k}` across replicas.
///
/// The standard error is `sqrt((G_jj G_kk + G_jk^2) / n)` with the exact
/// covariances `G` (the Gaussian fourth-moment formula); the z-score is
/// `(estimate - G_jk) / stderr`, or 0 when the standard error vanishes (for
/// example at the pinned point `t = 0`).
pub fn empirical_cov(ens: &Ensemble, j: usize, k: usize) -> Result<CovEstimate> {
    let n = ens.len();
    if n < 2 {
        return Err(Error::InsufficientReplicas(n));
    }
    let times = ens.grid().times();
    for idx in [j, k] {
        if idx >= times.len() {
            return Err(Error::InvalidArgument(format!(
                "grid index {idx} out of range for {} points",
                times.len()
            )));
        }
    }
    let nf = n as f64;
    let (mut mj, mut mk) = (0.0, 0.0);
    for p in ens.paths() {
        mj += p.values()[j];
        mk += p.values()[k];
    }
    mj /= nf;
    mk /= nf;
    let mut acc = 0.0;
    for p in ens.paths() {
        acc += (p.values()[j] - mj) * (p.values()[k] - mk);
    }
    let estimate = acc / (nf - 1.0);

    let spec = ens.spec();
    let (tj, tk) = (times[j], times[k]);
    let theory = msfbm_cov(spec, tj, tk)?;
    let var_j = msfbm_cov(spec, tj, tj)?;
    let var_k = msfbm_cov(spec, tk, tk)?;
    let stderr = ((var_j * var_k + theory * theory) / nf).sqrt();
    let zscore_vs_theory = if stderr == 0.0 { 0.0 } else { (estimate - theory) / stderr };
    Ok(CovEstimate { estimate, stderr, theory, zscore_vs_theory })
}

/// Mean and standard error of the mean.
pub(crate) fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Median (mean of the two middle values for even lengths).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
