//! The subcommands proper: each turns a resolved [`RunConfig`] into a
//! CSV or JSON document and emits it.

use clap::ValueEnum;
use serde::Serialize;

use super::config::{Format, RunConfig, DEFAULT_EPS_FRACTION};
use super::output::{emit, input, json, value, CsvDoc, SCHEMA_VERSION};
use super::{CliError, CovKind};
use crate::analysis::{
    graph_box_dimension, level_set_box_dimension, median, range_dimension, srd_partial_sums,
    srd_tail_slope, DimensionEstimate,
};
use crate::classify::{
    increment_sign_predict_tol, markov_verdict_tol, semimartingale_classify_tol, Sign,
    SemimartingaleVerdict,
};
use crate::error::Error;
use crate::kernels::{
    increment_bounds, increment_cov, increment_second_moment, lag_cov_c, lag_cov_c_closed_form,
    mfbm_cov,
    mfbm_lag_cov_r, msfbm_cov, stationarity_gap, IncrementWindow, ProcessSpec,
};
use crate::sampler::{sample_ensemble_with, TimeGrid};
use crate::verify::{self, VerifyOptions};

/// Default grid of `dims`: `2^16` intervals.
pub const DIMS_POINTS: usize = (1 << 16) + 1;
/// Default number of level-set replicas of `dims`.
pub const DIMS_REPS: usize = 20;

#[derive(Serialize)]
struct GridMeta {
    points: usize,
    horizon: f64,
    uniform: bool,
}

impl GridMeta {
    fn of(grid: &TimeGrid) -> Self {
        Self { points: grid.len(), horizon: grid.horizon(), uniform: grid.is_uniform() }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| input(x)).collect::<Vec<_>>().join(",")
}

fn spec_meta(doc: &mut CsvDoc, spec: &ProcessSpec) {
    doc.meta("coeffs", join(spec.coeffs()));
    doc.meta("hurst", join(spec.hurst()));
}

// --- cov ---------------------------------------------------------------------

#[derive(Serialize)]
struct CovDoc<'a> {
    version: &'static str,
    command: &'static str,
    kind: &'a str,
    spec: &'a ProcessSpec,
    columns: &'a [&'a str],
    rows: Vec<Vec<f64>>,
}

fn kind_name(kind: CovKind) -> String {
    kind.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn lag_from(x: f64) -> Result<u64, CliError> {
    if x >= 1.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(CliError::Validation(format!("lag must be a positive integer, got {x}")))
    }
}

/// Evaluates the kernel selected by `kind` on each group of `points`.
pub fn cov(cfg: &RunConfig, kind: CovKind, points: &[f64]) -> Result<(), CliError> {
    let spec = cfg.require_spec()?;
    let (arity, columns): (usize, &[&str]) = match kind {
        CovKind::Msfbm | CovKind::Mfbm => (2, &["s", "t", "cov"]),
        CovKind::Moment => (2, &["s", "t", "moment", "lower", "upper"]),
        CovKind::Increment => (4, &["u", "v", "s", "t", "cov"]),
        CovKind::Lag => (1, &["p", "n", "c", "r", "gap"]),
    };
    if points.is_empty() || points.len() % arity != 0 {
        return Err(CliError::Validation(format!(
            "--points for --kind {} must come in groups of {arity}, got {} values",
            kind_name(kind),
            points.len()
        )));
    }
    let p = cfg.lag_p;
    let mut rows = Vec::with_capacity(points.len() / arity);
    for g in points.chunks(arity) {
        let outputs: Vec<f64> = match kind {
            CovKind::Msfbm => vec![msfbm_cov(spec, g[0], g[1])?],
            CovKind::Mfbm => vec![mfbm_cov(spec, g[0], g[1])?],
            CovKind::Moment => {
                let (lo, hi) = increment_bounds(spec, g[0], g[1])?;
                vec![increment_second_moment(spec, g[0], g[1])?, lo, hi]
            }
            CovKind::Increment => vec![increment_cov(spec, &IncrementWindow::new(g[0], g[1], g[2], g[3])?)],
            CovKind::Lag => {
                let n = lag_from(g[0])?;
                let x = p as f64;
                vec![lag_cov_c(spec, x, n)?, mfbm_lag_cov_r(spec, n)?, stationarity_gap(spec, x, n)?]
            }
        };
        let inputs = if kind == CovKind::Lag { vec![p as f64, g[0]] } else { g.to_vec() };
        rows.push((inputs, outputs));
    }
    let body = match cfg.format {
        Format::Json => json(&CovDoc {
            version: SCHEMA_VERSION,
            command: "cov",
            kind: &kind_name(kind),
            spec,
            columns,
            rows: rows.into_iter().map(|(i, o)| [i, o].concat()).collect(),
        })?,
        Format::Csv => {
            let mut doc = CsvDoc::new(columns);
            for (i, o) in rows {
                doc.row(i.iter().map(|&x| input(x)).chain(o.iter().map(|&x| value(x))));
            }
            doc.finish()
        }
    };
    emit(cfg.out.as_deref(), &body)
}

// --- simulate ----------------------------------------------------------------

#[derive(Serialize)]
struct SimulateMeta<'a> {
    spec: &'a ProcessSpec,
    seed: u64,
    reps: usize,
    grid: GridMeta,
    route: &'static str,
    /// Diagonal jitter of the dense factorization; `None` when none was used.
    jitter: Option<f64>,
    dense_limit: usize,
}

#[derive(Serialize)]
struct SimulateDoc<'a> {
    version: &'static str,
    command: &'static str,
    metadata: SimulateMeta<'a>,
    times: &'a [f64],
    paths: Vec<&'a [f64]>,
}

/// Simulates `reps` replicas and writes them with their metadata.
pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.require_spec()?;
    let grid = cfg.grid()?;
    let ens = sample_ensemble_with(spec, &grid, cfg.reps, cfg.seed, &cfg.sampler)?;
    let route = ens.route().expect("sampled ensembles record their route").as_str();
    let meta = SimulateMeta {
        spec,
        seed: cfg.seed,
        reps: cfg.reps,
        grid: GridMeta::of(&grid),
        route,
        jitter: ens.jitter(),
        dense_limit: cfg.sampler.dense_limit,
    };
    let body = match cfg.format {
        Format::Json => json(&SimulateDoc {
            version: SCHEMA_VERSION,
            command: "simulate",
            metadata: meta,
            times: grid.times(),
            paths: ens.paths().iter().map(|p| p.values()).collect(),
        })?,
        Format::Csv => {
            let mut doc = CsvDoc::new(&["replica", "t", "value"]);
            doc.meta("version", SCHEMA_VERSION);
            doc.meta("command", "simulate");
            spec_meta(&mut doc, spec);
            doc.meta("seed", meta.seed.to_string());
            doc.meta("reps", meta.reps.to_string());
            doc.meta("grid_points", meta.grid.points.to_string());
            doc.meta("horizon", input(meta.grid.horizon));
            doc.meta("uniform", meta.grid.uniform.to_string());
            doc.meta("route", route);
            doc.meta("jitter", meta.jitter.map_or_else(|| "none".to_string(), value));
            doc.meta("dense_limit", meta.dense_limit.to_string());
            let times = grid.times();
            for (k, path) in ens.paths().iter().enumerate() {
                let k = k.to_string();
                for (&t, &v) in times.iter().zip(path.values()) {
                    doc.row([k.clone(), input(t), value(v)]);
                }
            }
            doc.finish()
        }
    };
    emit(cfg.out.as_deref(), &body)
}

// --- verify ------------------------------------------------------------------

/// Runs the configured suites; the report is written even when a check
/// fails, and the failure is then signalled through the exit code.
pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let opts = VerifyOptions {
        spec: cfg.spec.clone(),
        seed: cfg.seed,
        reps: cfg.reps_given.then_some(cfg.reps),
        half_tol: cfg.half_tol,
    };
    let report = verify::run(&cfg.suites, &opts);
    let body = match cfg.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut doc = CsvDoc::new(&["suite", "name", "passed", "measured", "target", "tolerance", "relation", "detail"]);
            doc.meta("version", SCHEMA_VERSION);
            doc.meta("command", "verify");
            doc.meta("seed", report.seed.to_string());
            if let Some(spec) = &report.spec {
                spec_meta(&mut doc, spec);
            }
            doc.meta("passed", report.passed.to_string());
            for suite in &report.suites {
                for c in &suite.checks {
                                        doc.row([
                        suite.suite.as_str().to_string(),
                        c.name.clone(),
                        c.passed.to_string(),
                        c.measured.map_or_else(String::new, value),
                        c.target.map_or_else(String::new, value),
                        value(c.tolerance),
                        variant_name(&c.relation),
                        c.detail.clone(),
                    ]);
                }
            }
            doc.finish()
        }
    };
    emit(cfg.out.as_deref(), &body)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

// --- dims --------------------------------------------------------------------

#[derive(Serialize)]
struct Targeted {
    #[serde(flatten)]
    estimate: DimensionEstimate,
    target: f64,
}

#[derive(Serialize)]
struct LevelSetReport {
    level: f64,
    eps: f64,
    replicas: usize,
    /// Replicas whose path crosses the level after `eps`.
    crossed: usize,
    /// Median over the replicas that cross.
    median: Option<f64>,
    /// Standard error of the mean over the replicas that cross.
    stderr: Option<f64>,
    target: f64,
    /// Per-replica estimate, `None` where the level is not crossed.
    values: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct DimsDoc<'a> {
    version: &'static str,
    command: &'static str,
    spec: &'a ProcessSpec,
    seed: u64,
    grid: GridMeta,
    route: &'static str,
    h_min: f64,
    graph: Targeted,
    range: Targeted,
    level_set: LevelSetReport,
}

fn stderr_of_mean(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((var / n).sqrt())
}

/// Graph and range dimension of the first replica, level-set dimension of
/// every replica.
pub fn dims(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.require_spec()?;
    let grid = cfg.grid()?;
    let ens = sample_ensemble_with(spec, &grid, cfg.reps, cfg.seed, &cfg.sampler)?;
    let first = &ens.paths()[0];
    let h_min = spec.h_min();
    let graph = Targeted { estimate: graph_box_dimension(first)?, target: 2.0 - h_min };
    let range = Targeted { estimate: range_dimension(first)?, target: 1.0 };
    let eps = cfg.eps.unwrap_or(DEFAULT_EPS_FRACTION * grid.horizon());
    let values = ens
        .paths()
        .iter()
        .map(|p| match level_set_box_dimension(p, cfg.level, eps) {
            Ok(d) => Ok(Some(d.value)),
            Err(Error::LevelNotCrossed(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let crossed: Vec<f64> = values.iter().flatten().copied().collect();
    let level_set = LevelSetReport {
        level: cfg.level,
        eps,
        replicas: values.len(),
        crossed: crossed.len(),
        median: (!crossed.is_empty()).then(|| median(&crossed)),
        stderr: stderr_of_mean(&crossed),
        target: 1.0 - h_min,
        values,
    };
    let doc = DimsDoc {
        version: SCHEMA_VERSION,
        command: "dims",
        spec,
        seed: cfg.seed,
        grid: GridMeta::of(&grid),
        route: ens.route().expect("sampled ensembles record their route").as_str(),
        h_min,
        graph,
        range,
        level_set,
    };
    let body = match cfg.format {
        Format::Json => json(&doc)?,
        Format::Csv => {
            let mut csv = CsvDoc::new(&["estimator", "value", "stderr", "target", "coarsest_boxes", "finest_boxes"]);
            csv.meta("version", SCHEMA_VERSION);
            csv.meta("command", "dims");
            spec_meta(&mut csv, spec);
            csv.meta("seed", doc.seed.to_string());
            csv.meta("grid_points", doc.grid.points.to_string());
            csv.meta("horizon", input(doc.grid.horizon));
            csv.meta("route", doc.route);
            csv.meta("level", input(doc.level_set.level));
            csv.meta("eps", input(doc.level_set.eps));
            csv.meta("crossed", format!("{} of {}", doc.level_set.crossed, doc.level_set.replicas));
            for (name, t) in [("graph", &doc.graph), ("range", &doc.range)] {
                let e = &t.estimate;
                csv.row([
                    name.to_string(),
                    value(e.value),
                    value(e.stderr),
                    value(t.target),
                    e.scale_range.0.to_string(),
                    e.scale_range.1.to_string(),
                ]);
            }
            let l = &doc.level_set;
            csv.row([
                "level_set".to_string(),
                l.median.map_or_else(String::new, value),
                l.stderr.map_or_else(String::new, value),
                value(l.target),
                String::new(),
                String::new(),
            ]);
            csv.finish()
        }
    };
    emit(cfg.out.as_deref(), &body)
}

// --- classify ----------------------------------------------------------------

#[derive(Serialize)]
struct ClassifyDoc<'a> {
    version: &'static str,
    command: &'static str,
    spec: &'a ProcessSpec,
    half_tol: f64,
    semimartingale: SemimartingaleVerdict,
    markov: bool,
    increment_sign: Sign,
}

pub fn classify(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.require_spec()?;
    let doc = ClassifyDoc {
        version: SCHEMA_VERSION,
        command: "classify",
        spec,
        half_tol: cfg.half_tol,
        semimartingale: semimartingale_classify_tol(spec, cfg.half_tol),
        markov: markov_verdict_tol(spec, cfg.half_tol),
        increment_sign: increment_sign_predict_tol(spec, cfg.half_tol).sign,
    };
    let body = match cfg.format {
        Format::Json => json(&doc)?,
        Format::Csv => {
            let mut csv = CsvDoc::new(&["is_semimartingale", "witness", "reason", "markov", "increment_sign"]);
            csv.row([
                doc.semimartingale.is_semimartingale.to_string(),
                doc.semimartingale.witness.map_or_else(String::new, |w| w.to_string()),
                variant_name(&doc.semimartingale.reason),
                doc.markov.to_string(),
                variant_name(&doc.increment_sign),
            ]);
            csv.finish()
        }
    };
    emit(cfg.out.as_deref(), &body)
}

/// Serialized name of a unit enum variant.
fn variant_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

// --- srd ---------------------------------------------------------------------

/// Points in the tail fit of `srd`.
const SRD_TAIL_POINTS: usize = 21;

#[derive(Serialize)]
struct TailFit {
    slope: f64,
    stderr: f64,
    target: f64,
    n_lo: u64,
    n_hi: u64,
}

#[derive(Serialize)]
struct SrdRow {
    n: u64,
    c: f64,
    partial_sum: f64,
}

#[derive(Serialize)]
struct SrdDoc<'a> {
    version: &'static str,
    command: &'static str,
    spec: &'a ProcessSpec,
    p: u64,
    n_max: u64,
    /// `None` when every lag covariance vanishes (all active indices 1/2).
    tail: Option<TailFit>,
    partial_sum: f64,
    rows: Vec<SrdRow>,
}

#[cfg(test)]
pub(super) fn report_lags_for_tests(n_max: u64) -> Vec<u64> {
    report_lags(n_max)
}

/// `1, 2, .., 9, 10, 20, .., 90, 100, ..` up to `n_max`, plus `n_max`.
fn report_lags(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in 1..10 {
            let Some(n) = decade.checked_mul(m) else { break 'outer };
            if n > n_max {
                break 'outer;
            }
            out.push(n);
        }
        match decade.checked_mul(10) {
            Some(d) => decade = d,
            None => break,
        }
    }
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// Lag covariances `C(p, n)`, their partial sums and the tail slope over
/// the last two decades below `n_max`.
pub fn srd(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.require_spec()?;
    let (p, n_max) = (cfg.lag_p, cfg.n_max);
    if n_max > 100_000_000 {
        return Err(CliError::Validation(format!("n_max must be at most 1e8, got {n_max}")));
    }
    let sums = srd_partial_sums(spec, p, n_max)?;
    let n_lo = (n_max / 100).max(1);
    let tail = match srd_tail_slope(spec, p, n_lo, n_max, SRD_TAIL_POINTS) {
        Ok(fit) => Some(TailFit {
            slope: fit.slope,
            stderr: fit.slope_stderr,
            target: 2.0 * spec.h_max() - 3.0,
            n_lo,
            n_hi: n_max,
        }),
        Err(Error::PreconditionViolated(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let rows = report_lags(n_max)
        .into_iter()
        .map(|n| {
            Ok(SrdRow { n, c: lag_cov_c_closed_form(spec, p, n)?, partial_sum: sums[n as usize - 1] })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let doc = SrdDoc {
        version: SCHEMA_VERSION,
        command: "srd",
        spec,
        p,
        n_max,
        tail,
        partial_sum: sums[n_max as usize - 1],
        rows,
    };
    let body = match cfg.format {
        Format::Json => json(&doc)?,
        Format::Csv => {
            let mut csv = CsvDoc::new(&["n", "c", "partial_sum"]);
            csv.meta("version", SCHEMA_VERSION);
            csv.meta("command", "srd");
            spec_meta(&mut csv, spec);
            csv.meta("p", p.to_string());
            if let Some(t) = &doc.tail {
                csv.meta("tail_slope", value(t.slope));
                csv.meta("tail_slope_stderr", value(t.stderr));
                csv.meta("tail_slope_target", value(t.target));
                csv.meta("tail_range", format!("{}..={}", t.n_lo, t.n_hi));
            }
            for r in &doc.rows {
                csv.row([r.n.to_string(), value(r.c), value(r.partial_sum)]);
            }
            csv.finish()
        }
    };
    emit(cfg.out.as_deref(), &body)
}
