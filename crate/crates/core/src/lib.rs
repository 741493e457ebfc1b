//! Covariance kernels, exact samplers, path estimators and classifiers for
//! mixed sub-fractional Brownian motion `S_t = sum_i a_i xi^{H_i}_t`.
//!
//! * [`kernels`]: covariances, increment moments and bounds, lag
//!   covariances;
//! * [`sampler`]: seeded exact simulation on finite grids;
//! * [`analysis`]: variation, regularity, dimension and dependence
//!   estimators;
//! * [`classify`]: semimartingale, Markov and increment-sign verdicts;
//! * [`verify`]: self-checking property suites;
//! * [`cli`]: the `msfbm` command-line front end.

pub mod analysis;
pub mod cli;
pub mod classify;
pub mod error;
pub mod kernels;
pub mod sampler;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
