//! Estimators that confront simulated paths with the sample-path theory:
//! covariance checks, variation scaling, Hölder regularity, a
//! non-differentiability probe, short-range dependence and fractal
//! dimensions.
//!
//! Every estimator is a deterministic function of its input. Per-replica
//! work may run in parallel, but reductions are always summed in replica
//! order, so reports are bit-stable across thread counts.

mod dimension;
mod fit;
mod moments;
mod regularity;
mod srd;
mod variation;

pub use dimension::{
    default_graph_window, default_level_window, graph_box_dimension, graph_box_dimension_with,
    level_set_box_dimension, level_set_box_dimension_with, range_dimension, range_dimension_with,
    BoxWindow, DimensionEstimate, DimensionMethod, GRAPH_MIN_POINTS, MIN_OCTAVES,
    RANGE_MIN_POINTS,
};
pub use fit::{fit_line, fit_log_log, LineFit};
pub use moments::{empirical_cov, median, CovEstimate};
pub use regularity::{
    holder_exponent_estimate, nondiff_probe, probe_slope, HolderEstimate, ProbeRow, VARIOGRAM_LAGS,
};
pub use srd::{srd_partial_sums, srd_tail_slope};
pub use variation::{p_variation_stat, qv_scaling_exponent, variation_scaling, VariationReport};
