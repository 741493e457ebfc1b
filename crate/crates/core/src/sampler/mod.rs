//! Exact Gaussian simulation of sample paths on finite grids.
//!
//! Two independent constructions are provided:
//!
//! * **exact**: factorize the Gram matrix of the process on the grid and
//!   multiply the factor with a standard normal vector;
//! * **via fBm**: simulate each component's underlying fractional Brownian
//!   motion on the symmetric grid `{-t_j} ∪ {t_j}` and form
//!   `xi(t) = (B(t) + B(-t)) / sqrt(2)`. On uniform grids the fBm is drawn
//!   by circulant embedding in `O(n log n)`, which is what makes paths with
//!   `2^16` points affordable.
//!
//! Every path is a pure function of `(spec, grid, seed)`: the seed drives a
//! ChaCha8 stream from which standard normals are drawn with the ziggurat
//! method of `rand_distr::StandardNormal`. Ensembles derive one seed per
//! replica from a master seed (see [`replica_seed`]), so they are
//! bit-identical regardless of how many threads produce them.

mod circulant;
mod grid;
mod linalg;

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use grid::{SamplePath, TimeGrid};
pub use linalg::{psd_factor, LowerFactor, PsdFactor, SymmetricMatrix, JITTER_LADDER};

use crate::error::{Error, Result};
use crate::kernels::{fbm_cov_unchecked, msfbm_cov_unchecked, ProcessSpec};
use circulant::FgnSampler;

/// `G[j][k] = Cov(S_{t_{j+1}}, S_{t_{k+1}})`: the covariance of the process
/// at the grid points other than `t_0 = 0` (where it is pinned to zero).
pub fn gram_matrix(spec: &ProcessSpec, grid: &TimeGrid) -> SymmetricMatrix {
    let t = &grid.times()[1..];
    SymmetricMatrix::from_fn(t.len(), |i, j| msfbm_cov_unchecked(spec, t[i], t[j]))
}

/// Which construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Exact factorization up to `dense_limit` grid points; beyond that the
    /// fBm construction with circulant embedding (uniform grids only).
    #[default]
    Auto,
    Exact,
    ViaFbm,
}

/// How the fBm construction draws each component's fBm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FbmMethod {
    /// Circulant embedding on uniform grids, dense factorization otherwise.
    #[default]
    Auto,
    Dense,
    Circulant,
}

/// The construction actually used for a set of paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolvedRoute {
    ExactDense,
    FbmDense,
    FbmCirculant,
}

impl ResolvedRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            ResolvedRoute::ExactDense => "exact-dense",
            ResolvedRoute::FbmDense => "fbm-dense",
            ResolvedRoute::FbmCirculant => "fbm-circulant",
        }
    }
}

/// Default largest grid (in points) sampled by dense factorization.
///
/// The packed Gram matrix of a 4096-point grid takes 64 MiB and factorizes
/// in a few seconds; larger grids go through circulant embedding.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub route: Route,
    pub fbm_method: FbmMethod,
    pub dense_limit: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { route: Route::Auto, fbm_method: FbmMethod::Auto, dense_limit: DEFAULT_DENSE_LIMIT }
    }
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Dense-factorization sampler with its factor computed once.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    grid: Arc<TimeGrid>,
    factor: Arc<PsdFactor>,
}

impl ExactSampler {
    pub fn new(spec: &ProcessSpec, grid: Arc<TimeGrid>) -> Result<Self> {
        let factor = psd_factor(&gram_matrix(spec, &grid))?;
        Ok(Self { grid, factor: Arc::new(factor) })
    }

    /// Diagonal jitter that was added to the Gram matrix.
    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn factor(&self) -> &PsdFactor {
        &self.factor
    }

    pub fn sample(&self, seed: u64) -> SamplePath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = normals(&mut rng, self.factor.factor.dim());
        let mut values = vec![0.0; self.grid.len()];
        self.factor.factor.mul_into(&z, &mut values[1..]);
        SamplePath::new(self.grid.clone(), values).expect("factor output is finite")
    }
}

enum FbmComponent {
    Dense(PsdFactor),
    Circulant(FgnSampler),
}

impl FbmComponent {
    /// `sqrt(2) * xi(t_j)` for `j = 0..n`.
    fn sample_scaled(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let np = n - 1;
        match self {
            FbmComponent::Dense(f) => {
                // Points ordered -t_{np}, ..., -t_1, t_1, ..., t_{np}.
                let z = normals(rng, 2 * np);
                let mut b = vec![0.0; 2 * np];
                f.factor.mul_into(&z, &mut b);
                let mut out = vec![0.0; n];
                for (j, o) in out.iter_mut().enumerate().skip(1) {
                    *o = b[np + j - 1] + b[np - j];
                }
                out
            }
            FbmComponent::Circulant(fgn) => {
                // B(s) for s in [-T, T] is W(s + T) - W(T) for an fBm W on [0, 2T].
                let y = fgn.sample_cumulative(rng);
                let c = np;
                let mut out = vec![0.0; n];
                for (j, o) in out.iter_mut().enumerate().skip(1) {
                    *o = (y[c + j] - y[c]) + (y[c - j] - y[c]);
                }
                out
            }
        }
    }
}

/// Sampler for the fBm construction, one prepared fBm per active component.
pub struct FbmSampler {
    grid: Arc<TimeGrid>,
    components: Vec<(f64, FbmComponent)>,
    route: ResolvedRoute,
    jitter: Option<f64>,
}

impl std::fmt::Debug for FbmSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmSampler")
            .field("grid_points", &self.grid.len())
            .field("components", &self.components.len())
            .field("route", &self.route)
            .finish()
    }
}

impl FbmSampler {
    pub fn new(spec: &ProcessSpec, grid: Arc<TimeGrid>, method: FbmMethod) -> Result<Self> {
        let circulant = match method {
            FbmMethod::Auto => grid.is_uniform(),
            FbmMethod::Dense => false,
            FbmMethod::Circulant => {
                if !grid.is_uniform() {
                    return Err(Error::InvalidGrid(
                        "circulant embedding needs a uniform grid".into(),
                    ));
                }
                true
            }
        };
        let np = grid.len() - 1;
        let mut jitter: Option<f64> = None;
        let mut components = Vec::new();
        for (_, a, h) in spec.active() {
            let c = if circulant {
                let step = grid.step().expect("uniform grid");
                FbmComponent::Circulant(FgnSampler::new(h, step, 2 * np)?)
            } else {
                let t = &grid.times()[1..];
                let point = |k: usize| if k < np { -t[np - 1 - k] } else { t[k - np] };
                let g = SymmetricMatrix::from_fn(2 * np, |i, j| {
                    fbm_cov_unchecked(2.0 * h, point(i), point(j))
                });
                let f = psd_factor(&g)?;
                jitter = Some(jitter.unwrap_or(0.0).max(f.jitter));
                FbmComponent::Dense(f)
            };
            components.push((a, c));
        }
        let route = if circulant { ResolvedRoute::FbmCirculant } else { ResolvedRoute::FbmDense };
        Ok(Self { grid, components, route, jitter })
    }

    pub fn route(&self) -> ResolvedRoute {
        self.route
    }

    /// Largest diagonal jitter used by any dense fBm factor.
    pub fn jitter(&self) -> Option<f64> {
        self.jitter
    }

    /// Draws the components' fBms in index order from one seeded stream.
    pub fn sample(&self, seed: u64) -> SamplePath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.grid.len();
        let mut values = vec![0.0; n];
        for (a, c) in &self.components {
            let xi = c.sample_scaled(&mut rng, n);
            for (v, x) in values.iter_mut().zip(xi) {
                *v += a * FRAC_1_SQRT_2 * x;
            }
        }
        SamplePath::new(self.grid.clone(), values).expect("finite sample")
    }
}

/// A prepared sampler of either kind; cheap to share across threads.
#[derive(Debug)]
pub enum PathSampler {
    Exact(ExactSampler),
    Fbm(FbmSampler),
}

impl PathSampler {
    /// Resolves `config.route` for this grid and prepares the sampler.
    pub fn new(spec: &ProcessSpec, grid: Arc<TimeGrid>, config: &SamplerConfig) -> Result<Self> {
        let exact = match config.route {
            Route::Exact => true,
            Route::ViaFbm => false,
            Route::Auto if grid.len() <= config.dense_limit => true,
            Route::Auto if grid.is_uniform() => false,
            Route::Auto => {
                return Err(Error::InvalidGrid(format!(
                    "{} points exceed the dense limit {} and the grid is not uniform",
                    grid.len(),
                    config.dense_limit
                )))
            }
        };
        if exact {
            Ok(PathSampler::Exact(ExactSampler::new(spec, grid)?))
        } else {
            let method = match config.route {
                Route::Auto => FbmMethod::Circulant,
                _ => config.fbm_method,
            };
            Ok(PathSampler::Fbm(FbmSampler::new(spec, grid, method)?))
        }
    }

    pub fn route(&self) -> ResolvedRoute {
        match self {
            PathSampler::Exact(_) => ResolvedRoute::ExactDense,
            PathSampler::Fbm(f) => f.route(),
        }
    }

    /// Diagonal jitter used by the dense factorization(s), if any.
    pub fn jitter(&self) -> Option<f64> {
        match self {
            PathSampler::Exact(e) => Some(e.jitter()),
            PathSampler::Fbm(f) => f.jitter(),
        }
    }

    pub fn sample(&self, seed: u64) -> SamplePath {
        match self {
            PathSampler::Exact(e) => e.sample(seed),
            PathSampler::Fbm(f) => f.sample(seed),
        }
    }
}

/// One exact path (dense factorization of the Gram matrix).
pub fn sample_exact(spec: &ProcessSpec, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(ExactSampler::new(spec, Arc::new(grid.clone()))?.sample(seed))
}

/// One path through the fBm construction (circulant embedding on uniform
/// grids, dense factorization otherwise).
pub fn sample_via_fbm(spec: &ProcessSpec, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(FbmSampler::new(spec, Arc::new(grid.clone()), FbmMethod::Auto)?.sample(seed))
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of replica `k` under master seed `master`.
///
/// This is the SplitMix64 output for state `master + (k + 1) * golden`:
/// the finalizer is a bijection of `u64`, so seeds are pairwise distinct
/// for distinct `k` and depend on nothing but `(master, k)`.
pub fn replica_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent replicas of the process on a common grid.
#[derive(Debug, Clone)]
pub struct Ensemble {
    spec: ProcessSpec,
    grid: Arc<TimeGrid>,
    paths: Vec<SamplePath>,
    master_seed: u64,
    replica_seeds: Vec<u64>,
    route: Option<ResolvedRoute>,
    jitter: Option<f64>,
}

impl Ensemble {
    /// Wraps externally produced paths (for example deterministic
    /// fixtures). All paths must share one grid.
    pub fn from_paths(spec: ProcessSpec, paths: Vec<SamplePath>) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::InvalidArgument("an ensemble needs at least one path".into()))?;
        let grid = first.grid_arc().clone();
        if paths.iter().any(|p| p.grid() != &*grid) {
            return Err(Error::GridMismatch("ensemble paths must share one grid".into()));
        }
        Ok(Self {
            spec,
            grid,
            paths,
            master_seed: 0,
            replica_seeds: Vec::new(),
            route: None,
            jitter: None,
        })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn paths(&self) -> &[SamplePath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Per-replica seeds; empty for ensembles built with [`Ensemble::from_paths`].
    pub fn replica_seeds(&self) -> &[u64] {
        &self.replica_seeds
    }

    /// Construction used, `None` for externally supplied paths.
    pub fn route(&self) -> Option<ResolvedRoute> {
        self.route
    }

    /// Diagonal jitter added by dense factorization, if any was used.
    pub fn jitter(&self) -> Option<f64> {
        self.jitter
    }
}

/// `n_reps` replicas with the default [`SamplerConfig`].
pub fn sample_ensemble(
    spec: &ProcessSpec,
    grid: &TimeGrid,
    n_reps: usize,
    master_seed: u64,
) -> Result<Ensemble> {
    sample_ensemble_with(spec, grid, n_reps, master_seed, &SamplerConfig::default())
}

/// `n_reps` replicas; replica `k` is `sampler.sample(replica_seed(master_seed, k))`.
///
/// Replicas are generated in parallel on the current rayon pool and
/// collected in index order.
pub fn sample_ensemble_with(
    spec: &ProcessSpec,
    grid: &TimeGrid,
    n_reps: usize,
    master_seed: u64,
    config: &SamplerConfig,
) -> Result<Ensemble> {
    if n_reps == 0 {
        return Err(Error::InvalidArgument("need at least one replica".into()));
    }
    let grid = Arc::new(grid.clone());
    let sampler = PathSampler::new(spec, grid.clone(), config)?;
    let replica_seeds: Vec<u64> = (0..n_reps as u64).map(|k| replica_seed(master_seed, k)).collect();
    let paths = replica_seeds.par_iter().map(|&s| sampler.sample(s)).collect();
    Ok(Ensemble {
        spec: spec.clone(),
        grid,
        paths,
        master_seed,
        replica_seeds,
        route: Some(sampler.route()),
        jitter: sampler.jitter(),
    })
}
