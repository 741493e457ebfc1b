//! Machine-checkable property suites.
//!
//! Each suite evaluates a family of identities, inequalities or Monte Carlo
//! gates and reports every check with the measured value, its target and
//! the tolerance applied. Reports are pure functions of the options: random
//! draws come from a ChaCha8 stream seeded by the master seed, simulations
//! use the sampler's per-replica seeding, and every reduction runs in a
//! fixed order, so a report is byte-identical under any thread count.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{empirical_cov, srd_partial_sums, srd_tail_slope, CovEstimate};
use crate::classify::{increment_sign_predict_tol, markov_verdict_tol, Sign};
use crate::error::{Error, Result};
use crate::kernels::{
    component_increment_cov, cov_magnitude, increment_bounds, increment_cov,
    increment_cov_magnitude, increment_second_moment, lag_cov_c_closed_form, lag_cov_c_window,
    lag_window, markov_residual, msfbm_cov, msfbm_var, rescale_coeffs, sfbm_cov,
    stationarity_gap, IncrementWindow, ProcessSpec,
};
use crate::sampler::{sample_ensemble_with, Ensemble, Route, SamplerConfig, TimeGrid};

/// Version of the report layout; bumped with the JSON schema.
pub const REPORT_VERSION: &str = "1";

/// Relative tolerance of the exact identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Monte Carlo gates, in standard errors.
pub const MC_SIGMAS: f64 = 5.0;

/// Default master seed of the Monte Carlo and randomized suites.
pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Kernel identities, increment bounds, sign laws, reference values.
    Kernels,
    /// Empirical Gram matrices of both samplers against the kernel.
    Sampler,
    /// Lag-covariance tails, summability and the stationarity gap.
    Srd,
    /// The Markov residual at random or designated time triples.
    Markov,
    /// Mixed self-similarity, exactly and in law.
    Selfsim,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Kernels, Suite::Sampler, Suite::Srd, Suite::Markov, Suite::Selfsim];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Kernels => "kernels",
            Suite::Sampler => "sampler",
            Suite::Srd => "srd",
            Suite::Markov => "markov",
            Suite::Selfsim => "selfsim",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown verify suite {s:?}")))
    }
}

/// Inputs shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Run the suites on this spec instead of their default spec sets.
    pub spec: Option<ProcessSpec>,
    pub seed: u64,
    /// Replica count of the Monte Carlo suites (per-suite default if unset).
    pub reps: Option<usize>,
    /// Width of the band around `1/2` treated as Brownian.
    pub half_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { spec: None, seed: DEFAULT_SEED, reps: None, half_tol: 0.0 }
    }
}

/// How `measured` is compared with `target` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `measured <= tolerance`.
    AtMost,
    /// `measured >= tolerance`.
    AtLeast,
    /// `|measured - target| <= tolerance`.
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// `None` when the quantity could not be computed.
    pub measured: Option<f64>,
    pub target: Option<f64>,
    pub tolerance: f64,
    pub relation: Relation,
    pub detail: String,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured: Some(measured),
            target: None,
            tolerance,
            relation: Relation::AtMost,
            detail: detail.into(),
        }
    }

    fn at_least(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured >= tolerance,
            measured: Some(measured),
            target: None,
            tolerance,
            relation: Relation::AtLeast,
            detail: detail.into(),
        }
    }

    fn within(
        name: impl Into<String>,
        measured: f64,
        target: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: (measured - target).abs() <= tolerance,
            measured: Some(measured),
            target: Some(target),
            tolerance,
            relation: Relation::Within,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, relation: Relation, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            measured: None,
            target: None,
            tolerance,
            relation,
            detail: err.to_string(),
        }
    }

    /// Counts are reported as floats so every check shares one shape.
    fn none_of(name: impl Into<String>, violations: usize, total: usize, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        let sep = if detail.is_empty() { "" } else { "; " };
        Self::at_most(name, violations as f64, 0.0, format!("{violations} of {total} violated{sep}{detail}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        Self { suite, passed: checks.iter().all(|c| c.passed), checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: &'static str,
    pub seed: u64,
    pub spec: Option<ProcessSpec>,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs `suites` in the given order.
pub fn run(suites: &[Suite], opts: &VerifyOptions) -> VerifyReport {
    let suites: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, opts)).collect();
    VerifyReport {
        version: REPORT_VERSION,
        seed: opts.seed,
        spec: opts.spec.clone(),
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let checks = match suite {
        Suite::Kernels => kernels_suite(opts),
        Suite::Sampler => sampler_suite(opts),
        Suite::Srd => srd_suite(opts),
        Suite::Markov => markov_suite(opts),
        Suite::Selfsim => selfsim_suite(opts),
    };
    SuiteReport::new(suite, checks)
}

/// Compact label such as `a=(1,1) H=(0.4,0.8)`.
pub fn spec_label(spec: &ProcessSpec) -> String {
    let join = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    format!("a=({}) H=({})", join(spec.coeffs()), join(spec.hurst()))
}

fn spec(a: &[f64], h: &[f64]) -> ProcessSpec {
    ProcessSpec::new(a.to_vec(), h.to_vec()).expect("built-in spec is valid")
}

fn specs_or(opts: &VerifyOptions, defaults: Vec<ProcessSpec>) -> Vec<ProcessSpec> {
    match &opts.spec {
        Some(s) => vec![s.clone()],
        None => defaults,
    }
}

/// `|got - want| / scale`, with a vanishing scale meaning both must agree
/// exactly.
fn rel_err(got: f64, want: f64, scale: f64) -> f64 {
    let diff = (got - want).abs();
    if diff == 0.0 {
        0.0
    } else if scale > 0.0 {
        diff / scale
    } else {
        f64::INFINITY
    }
}

// --- random draws ------------------------------------------------------------

/// Randomized draw ranges of the kernel suite.
const MAX_COMPONENTS: usize = 4;
const HURST_RANGE: (f64, f64) = (0.05, 0.95);
const MAX_COEFF: f64 = 10.0;
const MAX_TIME: f64 = 10.0;
const KERNEL_DRAWS: usize = 10_000;
const SIGN_DRAWS: usize = 1_000;

fn draw_spec(rng: &mut ChaCha8Rng, hurst: (f64, f64)) -> ProcessSpec {
    loop {
        let n = rng.gen_range(1..=MAX_COMPONENTS);
        let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-MAX_COEFF..=MAX_COEFF)).collect();
        let hs: Vec<f64> = (0..n).map(|_| rng.gen_range(hurst.0..hurst.1)).collect();
        if let Ok(s) = ProcessSpec::new(coeffs, hs) {
            return s;
        }
    }
}

fn draw_ordered<const K: usize>(rng: &mut ChaCha8Rng, lo: f64) -> [f64; K] {
    loop {
        let mut x = [0.0; K];
        for v in &mut x {
            *v = rng.gen_range(lo..MAX_TIME);
        }
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[0] < w[1]) {
            return x;
        }
    }
}

fn draw_window(rng: &mut ChaCha8Rng) -> IncrementWindow {
    let [u, v, s, t] = draw_ordered::<4>(rng, 0.0);
    IncrementWindow::new(u, v, s, t).expect("strictly ordered")
}

// --- kernels -----------------------------------------------------------------

/// Reference values computed in 60-digit arithmetic, rounded to 17 digits.
#[allow(clippy::excessive_precision)]
const REFERENCE_VALUES: [(&str, f64); 5] = [
    ("sfbm_cov(0.75, 1, 2)", 0.730_350_913_392_874_16),
    ("sfbm_cov(0.75, 1, 1)", 0.585_786_437_626_904_95),
    ("increment_cov(0.75; 0,1,1,2)", 0.144_564_475_765_969_21),
    ("increment_second_moment(0.75; 1, 2)", 0.781_938_860_333_536_83),
    ("msfbm_var(0.75, 2)", 1.656_854_249_492_380_2),
];

fn reference_computed(i: usize) -> Result<f64> {
    let s = spec(&[1.0], &[0.75]);
    match i {
        0 => sfbm_cov(0.75, 1.0, 2.0),
        1 => sfbm_cov(0.75, 1.0, 1.0),
        2 => Ok(increment_cov(&s, &IncrementWindow::new(0.0, 1.0, 1.0, 2.0)?)),
        3 => increment_second_moment(&s, 1.0, 2.0),
        _ => msfbm_var(&s, 2.0),
    }
}

fn kernels_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut bilinear = 0.0f64;
    let mut moment = 0.0f64;
    let mut diagonal = 0.0f64;
    let mut rescaling = 0.0f64;
    let mut bound_violations = 0;
    let mut decomposition_violations = 0;
    for _ in 0..KERNEL_DRAWS {
        let sp = match &opts.spec {
            Some(s) => s.clone(),
            None => draw_spec(&mut rng, HURST_RANGE),
        };
        let [s, t] = draw_ordered::<2>(&mut rng, 0.0);
        let w = draw_window(&mut rng);
        let h = rng.gen_range(0.01..MAX_TIME);

        let cov = |x, y| msfbm_cov(&sp, x, y).expect("valid times");
        let var = |x| msfbm_var(&sp, x).expect("valid time");

        let direct = increment_cov(&sp, &w);
        let expanded = cov(w.v(), w.t()) - cov(w.v(), w.s()) - cov(w.u(), w.t()) + cov(w.u(), w.s());
        let scale = cov_magnitude(&sp, w.v(), w.t())
            + cov_magnitude(&sp, w.v(), w.s())
            + cov_magnitude(&sp, w.u(), w.t())
            + cov_magnitude(&sp, w.u(), w.s());
        bilinear = bilinear.max(rel_err(direct, expanded, scale));

        let m = increment_second_moment(&sp, s, t).expect("ordered");
        let e = var(t) + var(s) - 2.0 * cov(s, t);
        let scale = cov_magnitude(&sp, t, t) + cov_magnitude(&sp, s, s) + 2.0 * cov_magnitude(&sp, s, t);
        moment = moment.max(rel_err(m, e, scale));

        diagonal = diagonal.max(rel_err(cov(t, t), var(t), cov_magnitude(&sp, t, t)));

        let scaled = rescale_coeffs(&sp, h).expect("positive scale");
        let lhs = cov(h * s, h * t);
        let rhs = msfbm_cov(&scaled, s, t).expect("valid times");
        rescaling = rescaling.max(rel_err(lhs, rhs, cov_magnitude(&sp, h * s, h * t)));

        let (lo, hi) = increment_bounds(&sp, s, t).expect("ordered");
        if !(lo <= m && m <= hi) {
            bound_violations += 1;
        }

        if !decomposes(&sp, &w, direct) {
            decomposition_violations += 1;
        }
    }

    let draws = format!("{KERNEL_DRAWS} draws");
    let mut checks = vec![
        Check::at_most("increment-cov-vs-bilinear-expansion", bilinear, IDENTITY_TOL, format!("max relative error over {draws}")),
        Check::at_most("increment-moment-vs-variance-expansion", moment, IDENTITY_TOL, format!("max relative error over {draws}")),
        Check::at_most("diagonal-consistency", diagonal, IDENTITY_TOL, format!("max relative error over {draws}")),
        Check::at_most("rescaling-identity", rescaling, IDENTITY_TOL, format!("max relative error over {draws}")),
        Check::none_of("increment-bounds", bound_violations, KERNEL_DRAWS, "exact inequality"),
        Check::none_of("monotone-decomposition", decomposition_violations, KERNEL_DRAWS, ""),
    ];
    checks.extend(sign_law_checks(&mut rng, opts));

    let mut reference = 0.0f64;
    for (i, &(_, want)) in REFERENCE_VALUES.iter().enumerate() {
        match reference_computed(i) {
            Ok(got) => reference = reference.max(rel_err(got, want, want.abs())),
            Err(e) => return [checks, vec![Check::failed("reference-values", Relation::AtMost, 1e-14, &e)]].concat(),
        }
    }
    let names: Vec<&str> = REFERENCE_VALUES.iter().map(|(n, _)| *n).collect();
    checks.push(Check::at_most("reference-values", reference, 1e-14, names.join("; ")));
    checks
}

/// The increment covariance is the weighted sum of the component
/// covariances, each component's covariance has the sign of `H_i - 1/2`,
/// and growing one weight never moves the total against that sign.
fn decomposes(sp: &ProcessSpec, w: &IncrementWindow, total: f64) -> bool {
    let parts: f64 = sp.components().map(|(a, h)| a * a * component_increment_cov(h, w)).sum();
    if parts != total {
        return false;
    }
    sp.components().enumerate().all(|(i, (a, h))| {
        let c = component_increment_cov(h, w);
        let bigger = sp.with_coeff(i, a.abs() + 1.0).expect("nonzero coefficient");
        let diff = increment_cov(&bigger, w) - total;
        let sign_ok = if h == 0.5 { c == 0.0 && diff == 0.0 } else { (c > 0.0) == (h > 0.5) && c != 0.0 };
        sign_ok && diff * c >= 0.0
    })
}

fn sign_law_checks(rng: &mut ChaCha8Rng, opts: &VerifyOptions) -> Vec<Check> {
    let holds = |sign: Sign, c: f64| match sign {
        Sign::Positive => c > 0.0,
        Sign::Negative => c < 0.0,
        Sign::Zero => c == 0.0,
        Sign::Indeterminate => true,
    };
    if let Some(sp) = &opts.spec {
        let sign = increment_sign_predict_tol(sp, opts.half_tol).sign;
        if sign == Sign::Indeterminate {
            return Vec::new();
        }
        let bad = (0..SIGN_DRAWS).filter(|_| !holds(sign, increment_cov(sp, &draw_window(rng)))).count();
        return vec![Check::none_of(format!("sign-law[{}]", spec_label(sp)), bad, SIGN_DRAWS, format!("predicted {sign:?}"))];
    }
    let regimes: [(&str, (f64, f64), Sign); 3] = [
        ("sign-law-above-half", (0.51, HURST_RANGE.1), Sign::Positive),
        ("sign-law-below-half", (HURST_RANGE.0, 0.49), Sign::Negative),
        ("sign-law-brownian", (0.5, 0.5), Sign::Zero),
    ];
    regimes
        .iter()
        .map(|&(name, range, sign)| {
            let bad = (0..SIGN_DRAWS)
                .filter(|_| {
                    let sp = if range.0 == range.1 {
                        let n = rng.gen_range(1..=MAX_COMPONENTS);
                        let a = (0..n).map(|_| rng.gen_range(0.1..MAX_COEFF)).collect();
                        ProcessSpec::new(a, vec![0.5; n]).expect("valid")
                    } else {
                        draw_spec(rng, range)
                    };
                    let predicted = increment_sign_predict_tol(&sp, 0.0).sign;
                    predicted != sign || !holds(sign, increment_cov(&sp, &draw_window(rng)))
                })
                .count();
            Check::none_of(name, bad, SIGN_DRAWS, format!("predicted {sign:?}"))
        })
        .collect()
}

// --- sampler -----------------------------------------------------------------

const SAMPLER_POINTS: usize = 16;
const SAMPLER_REPS: usize = 10_000;

fn default_sampler_specs() -> Vec<ProcessSpec> {
    vec![spec(&[1.0], &[0.5]), spec(&[1.0], &[0.75]), spec(&[1.0, 1.0], &[0.4, 0.8])]
}

/// Covariance estimates of all pairs of grid points after `t_0 = 0`.
fn gram_estimates(ens: &Ensemble) -> Result<Vec<CovEstimate>> {
    let n = ens.grid().len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 1..n {
        for k in j..n {
            out.push(empirical_cov(ens, j, k)?);
        }
    }
    Ok(out)
}

fn max_abs_z(est: &[CovEstimate]) -> f64 {
    est.iter().map(|e| e.zscore_vs_theory.abs()).fold(0.0, f64::max)
}

/// Largest `|e1 - e2| / sqrt(se1^2 + se2^2)` over matching entries.
fn max_pooled_z(a: &[CovEstimate], b: &[CovEstimate]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let se = x.stderr.hypot(y.stderr);
            if se == 0.0 {
                0.0
            } else {
                (x.estimate - y.estimate).abs() / se
            }
        })
        .fold(0.0, f64::max)
}

fn sampler_suite(opts: &VerifyOptions) -> Vec<Check> {
    let reps = opts.reps.unwrap_or(SAMPLER_REPS);
    let grid = TimeGrid::uniform(SAMPLER_POINTS, 1.0).expect("valid grid");
    let mut checks = Vec::new();
    for sp in specs_or(opts, default_sampler_specs()) {
        let label = spec_label(&sp);
        let run = |route: Route, seed: u64| -> Result<(Vec<CovEstimate>, String)> {
            let config = SamplerConfig { route, ..SamplerConfig::default() };
            let ens = sample_ensemble_with(&sp, &grid, reps, seed, &config)?;
            let route = ens.route().map_or("external", |r| r.as_str());
            let jitter = ens.jitter().map_or(String::new(), |j| format!(", jitter {j:e}"));
            Ok((gram_estimates(&ens)?, format!("{reps} replicas, {SAMPLER_POINTS}-point grid, route {route}{jitter}")))
        };
        let exact = run(Route::Exact, opts.seed);
        let fbm = run(Route::ViaFbm, opts.seed.wrapping_add(1));
        for (name, res) in [("gram-exact", &exact), ("gram-via-fbm", &fbm)] {
            let name = format!("{name}[{label}]");
            checks.push(match res {
                Ok((est, detail)) => Check::at_most(name, max_abs_z(est), MC_SIGMAS, format!("max |z| vs kernel; {detail}")),
                Err(e) => Check::failed(name, Relation::AtMost, MC_SIGMAS, e),
            });
        }
        let name = format!("samplers-agree[{label}]");
        checks.push(match (&exact, &fbm) {
            (Ok((a, _)), Ok((b, _))) => {
                Check::at_most(name, max_pooled_z(a, b), MC_SIGMAS, "max pooled |z| between the two constructions")
            }
            (Err(e), _) | (_, Err(e)) => Check::failed(name, Relation::AtMost, MC_SIGMAS, e),
        });
    }
    checks
}

// --- srd ---------------------------------------------------------------------

const TAIL_RANGE: (u64, u64) = (1_000, 100_000);
const TAIL_POINTS: usize = 21;
const SLOPE_TOL: f64 = 0.1;
const SUMS_MAX: u64 = 100_000;
const CLOSED_FORM_P: u64 = 10;
const CLOSED_FORM_N: u64 = 1_000;

fn default_srd_specs() -> Vec<ProcessSpec> {
    [0.6, 0.75, 0.9].iter().map(|&h| spec(&[1.0], &[h])).collect()
}

fn srd_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for sp in specs_or(opts, default_srd_specs()) {
        let label = spec_label(&sp);
        checks.push(closed_form_check(&sp, &label));
        if markov_verdict_tol(&sp, 0.0) {
            // Brownian increments are uncorrelated: every lag covariance is 0.
            let worst = (1..=CLOSED_FORM_N)
                .map(|n| lag_cov_c_closed_form(&sp, 0, n).map(f64::abs))
                .try_fold(0.0, |m, c| c.map(|c| f64::max(m, c)));
            checks.push(match worst {
                Ok(w) => Check::at_most(format!("lag-covariance-vanishes[{label}]"), w, 0.0, "max |C(0, n)|, n <= 1000"),
                Err(e) => Check::failed(format!("lag-covariance-vanishes[{label}]"), Relation::AtMost, 0.0, &e),
            });
            continue;
        }
        let h_max = sp.h_max();
        checks.push(tail_slope_check(&sp, &label, h_max));
        checks.push(summability_check(&sp, &label, h_max));
        checks.extend(gap_checks(&sp, &label, h_max));
    }
    checks
}

fn closed_form_check(sp: &ProcessSpec, label: &str) -> Check {
    let name = format!("closed-form-vs-window[{label}]");
    let mut worst = 0.0f64;
    for p in 0..=CLOSED_FORM_P {
        for n in 1..=CLOSED_FORM_N {
            let pair = lag_cov_c_closed_form(sp, p, n)
                .and_then(|c| Ok((c, lag_cov_c_window(sp, p as f64, n)?, lag_window(p as f64, n)?)));
            match pair {
                Ok((closed, window, w)) => {
                    worst = worst.max(rel_err(closed, window, increment_cov_magnitude(sp, &w)))
                }
                Err(e) => return Check::failed(name, Relation::AtMost, IDENTITY_TOL, &e),
            }
        }
    }
    Check::at_most(name, worst, IDENTITY_TOL, format!("max relative error, p <= {CLOSED_FORM_P}, n <= {CLOSED_FORM_N}"))
}

fn tail_slope_check(sp: &ProcessSpec, label: &str, h_max: f64) -> Check {
    let name = format!("lag-covariance-tail-slope[{label}]");
    let target = 2.0 * h_max - 3.0;
    match srd_tail_slope(sp, 0, TAIL_RANGE.0, TAIL_RANGE.1, TAIL_POINTS) {
        Ok(fit) => Check::within(
            name,
            fit.slope,
            target,
            SLOPE_TOL,
            format!("log-log slope of |C(0, n)| over n in [{}, {}]", TAIL_RANGE.0, TAIL_RANGE.1),
        ),
        Err(e) => Check::failed(name, Relation::Within, SLOPE_TOL, &e),
    }
}

/// Partial sums of `C(0, n)` converge: the change over each decade shrinks
/// by about `10^(2 h_max - 2)` per decade. The gate sits halfway between
/// that factor and 1 (no convergence).
fn summability_check(sp: &ProcessSpec, label: &str, h_max: f64) -> Check {
    let name = format!("partial-sums-converge[{label}]");
    let predicted = 10f64.powf(2.0 * h_max - 2.0);
    let gate = 0.5 * (1.0 + predicted);
    let sums = match srd_partial_sums(sp, 0, SUMS_MAX) {
        Ok(s) => s,
        Err(e) => return Check::failed(name, Relation::AtMost, gate, &e),
    };
    let at = |n: u64| sums[n as usize - 1];
    let decades: Vec<f64> = [100u64, 1_000, 10_000]
        .iter()
        .map(|&n| (at(10 * n) - at(n)).abs())
        .collect();
    let ratio = decades.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    Check::at_most(
        name,
        ratio,
        gate,
        format!(
            "largest ratio of successive decade increments up to n = {SUMS_MAX}; predicted {predicted:.6}; sum {:.17e}",
            at(SUMS_MAX)
        ),
    )
}

const GAP_RANGE: (f64, f64) = (1e3, 1e5);
const GAP_POINTS: usize = 21;

fn gap_checks(sp: &ProcessSpec, label: &str, h_max: f64) -> Vec<Check> {
    let xs: Vec<f64> = (0..GAP_POINTS)
        .map(|i| {
            let f = i as f64 / (GAP_POINTS - 1) as f64;
            (GAP_RANGE.0 * (GAP_RANGE.1 / GAP_RANGE.0).powf(f)).round()
        })
        .collect();
    let gaps: Result<Vec<f64>> = xs.iter().map(|&x| stationarity_gap(sp, x, 1).map(f64::abs)).collect();
    let slope_name = format!("stationarity-gap-slope[{label}]");
    let mono_name = format!("stationarity-gap-decreasing[{label}]");
    let gaps = match gaps {
        Ok(g) => g,
        Err(e) => {
            return vec![
                Check::failed(slope_name, Relation::Within, SLOPE_TOL, &e),
                Check::failed(mono_name, Relation::AtMost, 0.0, &e),
            ]
        }
    };
    let target = 2.0 * h_max - 2.0;
    let slope = match crate::analysis::fit_log_log(&xs, &gaps) {
        Ok(fit) => Check::within(slope_name, fit.slope, target, SLOPE_TOL, "log-log slope of |C(x, 1) - R(1)| over x in [1e3, 1e5]"),
        Err(e) => Check::failed(slope_name, Relation::Within, SLOPE_TOL, &e),
    };
    let rises = gaps.windows(2).filter(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less)).count();
    vec![slope, Check::none_of(mono_name, rises, GAP_POINTS - 1, "successive log-spaced positions")]
}

// --- markov ------------------------------------------------------------------

const MARKOV_TRIPLES: usize = 1_000;
const BROWNIAN_RESIDUAL_TOL: f64 = 1e-12;
/// Gate on the residual relative to the magnitude of its two products.
const RELATIVE_RESIDUAL_GATE: f64 = 1e-6;

fn default_markov_specs() -> Vec<ProcessSpec> {
    vec![
        spec(&[1.0], &[0.5]),
        spec(&[1.0, 2.0], &[0.5, 0.5]),
        spec(&[1.0], &[0.6]),
        spec(&[1.0], &[0.75]),
        spec(&[1.0], &[0.9]),
        spec(&[1.0], &[0.2]),
        spec(&[1.0], &[0.1]),
        spec(&[1.0, 1.0], &[0.5, 0.8]),
        spec(&[1.0, 1.0], &[0.25, 0.5]),
        spec(&[1.0, 1.0], &[0.3, 0.8]),
    ]
}

/// The triple `(s, t, u)` at which the residual is shown to be nonzero:
/// `(sqrt t, t, t^2)` with `t = 10^3` when no active index is below `1/2`,
/// `(t^2, t, sqrt t)` with `t = 10^-3` otherwise.
pub fn designated_triple(spec: &ProcessSpec) -> (f64, f64, f64) {
    if spec.h_min() < 0.5 {
        let t: f64 = 1e-3;
        (t * t, t, t.sqrt())
    } else {
        let t: f64 = 1e3;
        (t.sqrt(), t, t * t)
    }
}

fn markov_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    for sp in specs_or(opts, default_markov_specs()) {
        let label = spec_label(&sp);
        if markov_verdict_tol(&sp, opts.half_tol) {
            let name = format!("residual-vanishes[{label}]");
            let mut worst = 0.0f64;
            for _ in 0..MARKOV_TRIPLES {
                let [s, t, u] = draw_ordered::<3>(&mut rng, 0.01);
                match markov_residual(&sp, s, t, u) {
                    Ok(r) => worst = worst.max(r.abs()),
                    Err(e) => {
                        checks.push(Check::failed(name.clone(), Relation::AtMost, BROWNIAN_RESIDUAL_TOL, &e));
                        break;
                    }
                }
            }
            checks.push(Check::at_most(
                name,
                worst,
                BROWNIAN_RESIDUAL_TOL,
                format!("verdict Markov; max |residual| over {MARKOV_TRIPLES} random triples"),
            ));
        } else {
            let name = format!("residual-nonzero[{label}]");
            let (s, t, u) = designated_triple(&sp);
            let cov = |x, y| msfbm_cov(&sp, x, y);
            let parts = (|| Ok::<_, Error>((markov_residual(&sp, s, t, u)?, cov(s, u)? * cov(t, t)?, cov(s, t)? * cov(t, u)?)))();
            checks.push(match parts {
                Ok((r, p1, p2)) => {
                    let scale = p1.abs() + p2.abs();
                    let relative = if scale > 0.0 { r.abs() / scale } else { 0.0 };
                    Check::at_least(
                        name,
                        relative,
                        RELATIVE_RESIDUAL_GATE,
                        format!("verdict non-Markov; |residual| relative to its products at (s, t, u) = ({s:e}, {t:e}, {u:e}); residual {r:.17e}"),
                    )
                }
                Err(e) => Check::failed(name, Relation::AtLeast, RELATIVE_RESIDUAL_GATE, &e),
            });
        }
    }
    checks
}

// --- selfsim -----------------------------------------------------------------

const SELFSIM_POINTS: usize = 16;
const SELFSIM_REPS: usize = 4_000;
const SELFSIM_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];
/// Scale factor of the in-law comparison.
const SELFSIM_LAW_FACTOR: f64 = 2.0;

fn default_selfsim_specs() -> Vec<ProcessSpec> {
    vec![spec(&[1.0, 2.0], &[0.3, 0.8]), spec(&[1.0], &[0.75]), spec(&[1.0, 1.0], &[0.5, 0.7])]
}

fn selfsim_suite(opts: &VerifyOptions) -> Vec<Check> {
    let reps = opts.reps.unwrap_or(SELFSIM_REPS);
    let unit = TimeGrid::uniform(SELFSIM_POINTS, 1.0).expect("valid grid");
    let stretched = TimeGrid::uniform(SELFSIM_POINTS, SELFSIM_LAW_FACTOR).expect("valid grid");
    let mut checks = Vec::new();
    for sp in specs_or(opts, default_selfsim_specs()) {
        let label = spec_label(&sp);

        let name = format!("rescaled-covariance[{label}]");
        let mut worst = 0.0f64;
        let mut failure = None;
        'outer: for &h in &SELFSIM_FACTORS {
            let scaled = match rescale_coeffs(&sp, h) {
                Ok(s) => s,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            };
            for &s in unit.times() {
                for &t in unit.times() {
                    match (msfbm_cov(&sp, h * s, h * t), msfbm_cov(&scaled, s, t)) {
                        (Ok(l), Ok(r)) => worst = worst.max(rel_err(l, r, cov_magnitude(&sp, h * s, h * t))),
                        (Err(e), _) | (_, Err(e)) => {
                            failure = Some(e);
                            break 'outer;
                        }
                    }
                }
            }
        }
        checks.push(match failure {
            None => Check::at_most(name, worst, IDENTITY_TOL, "max relative error of Cov(S_hs, S_ht) vs the rescaled spec at (s, t), h in {0.5, 2, 10}"),
            Some(e) => Check::failed(name, Relation::AtMost, IDENTITY_TOL, &e),
        });

        let name = format!("rescaled-law[{label}]");
        let law = (|| -> Result<f64> {
            let scaled = rescale_coeffs(&sp, SELFSIM_LAW_FACTOR)?;
            let a = sample_ensemble_with(&sp, &stretched, reps, opts.seed, &SamplerConfig::default())?;
            let b = sample_ensemble_with(&scaled, &unit, reps, opts.seed.wrapping_add(1), &SamplerConfig::default())?;
            Ok(max_pooled_z(&gram_estimates(&a)?, &gram_estimates(&b)?))
        })();
        checks.push(match law {
            Ok(z) => Check::at_most(
                name,
                z,
                MC_SIGMAS,
                format!("max pooled |z| between S on [0, 2] and the rescaled spec on [0, 1]; {reps} replicas each"),
            ),
            Err(e) => Check::failed(name, Relation::AtMost, MC_SIGMAS, &e),
        });
    }
    checks
}
