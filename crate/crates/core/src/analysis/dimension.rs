//! Box-counting estimates of fractal dimensions of a sample path.
//!
//! Hausdorff dimensions cannot be computed from finite data; the box-counting
//! dimension is used as the surrogate. All three estimators count occupied
//! boxes of dyadic sizes `delta = 2^-k` (relative to the rescaled set) for a
//! window of levels `k` and regress `ln N(delta)` on `ln(1/delta)`.

use serde::Serialize;

use super::fit::{fit_line, LineFit};
use crate::error::{Error, Result};
use crate::sampler::SamplePath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DimensionMethod {
    GraphBoxCount,
    LevelSetBoxCount,
    RangeBoxCount,
}

/// Inclusive range of dyadic levels `k` (box size `2^-k` of the rescaled set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoxWindow {
    pub coarsest: u32,
    pub finest: u32,
}

impl BoxWindow {
    fn validate(self) -> Result<Self> {
        if self.finest < self.coarsest + MIN_OCTAVES {
            return Err(Error::InsufficientResolution(format!(
                "box-count window {}..={} spans fewer than {MIN_OCTAVES} octaves",
                self.coarsest, self.finest
            )));
        }
        Ok(self)
    }
}

/// Minimum number of octaves a box-count regression must span.
pub const MIN_OCTAVES: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// Regression slope, clipped to `[0, 2]`.
    pub value: f64,
    pub stderr: f64,
    /// Boxes per unit length at the coarsest and the finest level used.
    pub scale_range: (u64, u64),
    pub method: DimensionMethod,
    /// `(box size, occupied boxes)` per level, coarsest first.
    #[serde(skip)]
    pub counts: Vec<(f64, f64)>,
    /// The underlying fit of `ln N` against `ln(1 / box size)`.
    #[serde(skip)]
    pub fit: Option<LineFit>,
}

fn estimate(
    method: DimensionMethod,
    window: BoxWindow,
    mut count: impl FnMut(u32) -> u64,
) -> Result<DimensionEstimate> {
    let window = window.validate()?;
    let levels: Vec<u32> = (window.coarsest..=window.finest).collect();
    let counts: Vec<(f64, f64)> =
        levels.iter().map(|&k| ((-(k as f64)).exp2(), count(k) as f64)).collect();
    let x: Vec<f64> = levels.iter().map(|&k| k as f64 * std::f64::consts::LN_2).collect();
    let y: Vec<f64> = counts.iter().map(|&(_, n)| n.ln()).collect();
    let fit = fit_line(&x, &y)?;
    Ok(DimensionEstimate {
        value: fit.slope.clamp(0.0, 2.0),
        stderr: fit.slope_stderr,
        scale_range: (1u64 << window.coarsest, 1u64 << window.finest),
        method,
        counts,
        fit: Some(fit),
    })
}

fn require_uniform(path: &SamplePath, min_points: usize, what: &str) -> Result<()> {
    if !path.grid().is_uniform() {
        return Err(Error::GridMismatch(format!("{what} needs a uniform grid")));
    }
    if path.grid().len() < min_points {
        return Err(Error::InsufficientResolution(format!(
            "{what} needs at least {min_points} grid points, got {}",
            path.grid().len()
        )));
    }
    Ok(())
}

fn log2_floor(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

/// Values mapped affinely onto `[0, 1]` (all zeros for a constant path).
fn unit_values(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
        (a.min(v), b.max(v))
    });
    let span = hi - lo;
    if span > 0.0 {
        values.iter().map(|v| (v - lo) / span).collect()
    } else {
        vec![0.0; values.len()]
    }
}

#[inline]
fn cell(x: f64, boxes: usize) -> usize {
    ((x * boxes as f64) as usize).min(boxes - 1)
}

/// Smallest grid accepted by [`graph_box_dimension`].
pub const GRAPH_MIN_POINTS: usize = 1 << 14;

/// Default graph window: from 16 columns down to 64 grid steps per column.
pub fn default_graph_window(points: usize) -> BoxWindow {
    let top = log2_floor(points.saturating_sub(1).max(1));
    BoxWindow { coarsest: 4, finest: top.saturating_sub(6) }
}

/// Box-counting dimension of the graph `{(t, S_t)}` rescaled to the unit
/// square; targets `2 - h_min`.
pub fn graph_box_dimension(path: &SamplePath) -> Result<DimensionEstimate> {
    require_uniform(path, GRAPH_MIN_POINTS, "graph box counting")?;
    graph_box_dimension_with(path, default_graph_window(path.grid().len()))
}

/// [`graph_box_dimension`] over an explicit window and without the
/// resolution floor.
///
/// The graph is treated as the polygon through the samples: each column of
/// width `2^-k` is covered by the vertical extent of the segments that
/// meet it.
pub fn graph_box_dimension_with(path: &SamplePath, window: BoxWindow) -> Result<DimensionEstimate> {
    let horizon = path.grid().horizon();
    let t: Vec<f64> = path.times().iter().map(|x| x / horizon).collect();
    let v = unit_values(path.values());
    estimate(DimensionMethod::GraphBoxCount, window, |k| {
        let cols = 1usize << k;
        let mut lo = vec![f64::INFINITY; cols];
        let mut hi = vec![f64::NEG_INFINITY; cols];
        for i in 0..t.len() - 1 {
            let (a, b) = if v[i] <= v[i + 1] { (v[i], v[i + 1]) } else { (v[i + 1], v[i]) };
            let first = cell(t[i], cols);
            let last = cell(t[i + 1], cols);
            for c in first..=last {
                lo[c] = lo[c].min(a);
                hi[c] = hi[c].max(b);
            }
        }
        lo.iter()
            .zip(&hi)
            .map(|(&l, &h)| (cell(h, cols) - cell(l, cols) + 1) as u64)
            .sum()
    })
}

/// Default level-set window: from 16 boxes down to 16 grid steps per box.
pub fn default_level_window(points: usize) -> BoxWindow {
    let top = log2_floor(points.saturating_sub(1).max(1));
    BoxWindow { coarsest: 4, finest: top.saturating_sub(4) }
}

/// Box-counting dimension of the level set `{t in [eps, T] : S_t = x}`;
/// targets `1 - h_min` (the set is nonempty only with positive probability).
///
/// A grid interval belongs to the set when `S - x` changes sign (or
/// vanishes) across it. Boxes are dyadic subdivisions of `[eps, T]`.
pub fn level_set_box_dimension(path: &SamplePath, x: f64, eps: f64) -> Result<DimensionEstimate> {
    require_uniform(path, 2, "level-set box counting")?;
    let start = path.times().partition_point(|&t| t < eps);
    let points = path.grid().len().saturating_sub(start);
    level_set_box_dimension_with(path, x, eps, default_level_window(points))
}

pub fn level_set_box_dimension_with(
    path: &SamplePath,
    x: f64,
    eps: f64,
    window: BoxWindow,
) -> Result<DimensionEstimate> {
    let times = path.times();
    let horizon = path.grid().horizon();
    if !(eps >= 0.0 && eps < horizon) {
        return Err(Error::InvalidArgument(format!("eps must lie in [0, {horizon}), got {eps}")));
    }
    let start = times.partition_point(|&t| t < eps);
    if times.len() - start < 2 {
        return Err(Error::InsufficientResolution("no grid intervals inside [eps, T]".into()));
    }
    let v = path.values();
    let crossings: Vec<f64> = (start..times.len() - 1)
        .filter(|&i| {
            let (a, b) = (v[i] - x, v[i + 1] - x);
            a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)
        })
        .map(|i| (times[i] - eps) / (horizon - eps))
        .collect();
    if crossings.is_empty() {
        return Err(Error::LevelNotCrossed(x));
    }
    estimate(DimensionMethod::LevelSetBoxCount, window, |k| {
        let boxes = 1usize << k;
        let mut last = usize::MAX;
        let mut count = 0;
        for &c in &crossings {
            let b = cell(c, boxes);
            if b != last {
                count += 1;
                last = b;
            }
        }
        count
    })
}

/// Smallest grid accepted by [`range_dimension`] for a fit; shorter paths
/// use a correspondingly shorter window.
pub const RANGE_MIN_POINTS: usize = 1 << 10;

/// Box-counting dimension of the range `{S_t : t in [0, T]}`, which is an
/// interval for a continuous path (dimension 1); a constant path has range
/// a single point (dimension 0).
pub fn range_dimension(path: &SamplePath) -> Result<DimensionEstimate> {
    let top = log2_floor(path.grid().len().max(2) - 1).min(12);
    range_dimension_with(path, BoxWindow { coarsest: 2, finest: top.max(2 + MIN_OCTAVES) })
}

pub fn range_dimension_with(path: &SamplePath, window: BoxWindow) -> Result<DimensionEstimate> {
    let v = path.values();
    if v.iter().all(|&x| x == v[0]) {
        let window = window.validate()?;
        return Ok(DimensionEstimate {
            value: 0.0,
            stderr: 0.0,
            scale_range: (1u64 << window.coarsest, 1u64 << window.finest),
            method: DimensionMethod::RangeBoxCount,
            counts: (window.coarsest..=window.finest).map(|k| ((-(k as f64)).exp2(), 1.0)).collect(),
            fit: None,
        });
    }
    let u = unit_values(v);
    estimate(DimensionMethod::RangeBoxCount, window, |k| {
        let boxes = 1usize << k;
        let mut hit = vec![false; boxes];
        for w in u.windows(2) {
            let (a, b) = if w[0] <= w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            for h in &mut hit[cell(a, boxes)..=cell(b, boxes)] {
                *h = true;
            }
        }
        hit.iter().filter(|&&h| h).count() as u64
    })
}
