use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Discretization `0 = t_0 < t_1 < ... < t_{n-1} = T` of `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    times: Vec<f64>,
    #[serde(skip)]
    step: Option<f64>,
}

/// Relative tolerance for recognizing an explicit grid as uniform.
const UNIFORM_TOL: f64 = 1e-12;

impl TimeGrid {
    /// Explicit grid. Must start at 0, be strictly increasing and have at
    /// least two points.
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid(format!("first time must be 0, got {}", times[0])));
        }
        if let Some(&bad) = times.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite time {bad}")));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "times must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        let n = times.len() - 1;
        let horizon = times[n];
        let step = horizon / n as f64;
        let uniform = times
            .iter()
            .enumerate()
            .all(|(j, &t)| (t - uniform_point(j, n, horizon)).abs() <= UNIFORM_TOL * horizon);
        Ok(Self { times, step: uniform.then_some(step) })
    }

    /// `n_points` equally spaced times on `[0, horizon]`.
    pub fn uniform(n_points: usize, horizon: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        let n = n_points - 1;
        let times = (0..n_points).map(|j| uniform_point(j, n, horizon)).collect();
        Ok(Self { times, step: Some(horizon / n as f64) })
    }

    /// Uniform grid with `2^m` intervals on `[0, horizon]`.
    pub fn dyadic(m: u32, horizon: f64) -> Result<Self> {
        if m >= usize::BITS - 1 {
            return Err(Error::InvalidGrid(format!("dyadic level {m} too large")));
        }
        Self::uniform((1usize << m) + 1, horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false: a grid has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Spacing of a uniform grid, `None` otherwise.
    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn is_uniform(&self) -> bool {
        self.step.is_some()
    }

    /// Index of the grid point equal to `t` (within a relative `1e-9` of
    /// the horizon), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * self.horizon();
        let i = self.times.partition_point(|&x| x < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }
}

fn uniform_point(j: usize, n: usize, horizon: f64) -> f64 {
    if j == n {
        horizon
    } else {
        horizon * j as f64 / n as f64
    }
}

/// One realization of the process on a grid; `values[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: Arc<TimeGrid>,
    values: Vec<f64>,
}

impl SamplePath {
    /// Wraps values observed on `grid`. The first value must be exactly 0
    /// and all values finite.
    pub fn new(grid: Arc<TimeGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "a path starts at 0, got {}",
                values[0]
            )));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite path value {bad}")));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub(crate) fn grid_arc(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
