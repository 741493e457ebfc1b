//! Acceptance run: twelve criteria, each printed as one PASS/FAIL line.
//!
//! Run all of them with `cargo test --test acceptance`, or a subset by
//! number, e.g. `cargo test --test acceptance -- 4 9`. Every criterion is
//! self-contained and seeded, so the output is reproducible.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use msfbm::analysis::{
    fit_log_log, graph_box_dimension, holder_exponent_estimate, level_set_box_dimension, median,
    range_dimension, variation_scaling,
};
use msfbm::classify::{semimartingale_classify, SemimartingaleReason};
use msfbm::kernels::{markov_residual, stationarity_gap, ProcessSpec};
use msfbm::sampler::{sample_ensemble, SamplerConfig, TimeGrid};
use msfbm::verify::{self, designated_triple, Suite, SuiteReport, VerifyOptions};
use msfbm::Error;

const SEED: u64 = verify::DEFAULT_SEED;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

struct Criterion {
    number: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn spec(coeffs: &[f64], hurst: &[f64]) -> ProcessSpec {
    ProcessSpec::new(coeffs.to_vec(), hurst.to_vec()).expect("valid spec")
}

fn suite(s: Suite) -> SuiteReport {
    verify::run_suite(s, &VerifyOptions::default())
}

/// Passes when every check of `report` whose name starts with one of
/// `prefixes` passed (and there is at least one).
fn checks_pass(report: &SuiteReport, prefixes: &[&str]) -> Outcome {
    let selected: Vec<_> = report
        .checks
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.name.starts_with(p)))
        .collect();
    let failed: Vec<&str> = selected.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let worst = selected
        .iter()
        .filter_map(|c| c.measured.map(|m| format!("{}={m:.3e}", c.name)))
        .collect::<Vec<_>>()
        .join(", ");
    if selected.is_empty() {
        Outcome::new(false, "no matching checks")
    } else if failed.is_empty() {
        Outcome::new(true, format!("{} checks: {worst}", selected.len()))
    } else {
        Outcome::new(false, format!("failed: {}", failed.join(", ")))
    }
}

fn kernel_identities() -> Outcome {
    checks_pass(
        &suite(Suite::Kernels),
        &[
            "increment-cov-vs-bilinear-expansion",
            "increment-moment-vs-variance-expansion",
            "diagonal-consistency",
            "rescaling-identity",
        ],
    )
}

fn increment_bounds() -> Outcome {
    checks_pass(&suite(Suite::Kernels), &["increment-bounds"])
}

fn sign_laws() -> Outcome {
    checks_pass(&suite(Suite::Kernels), &["sign-law", "monotone-decomposition"])
}

/// The suite gates the residual at the designated triple relative to the
/// size of its two products; here the absolute residual is also required
/// to exceed `1e-6` for specs whose roughest index is far enough from the
/// scale where the absolute residual collapses.
fn markov_test() -> Outcome {
    let report = checks_pass(&suite(Suite::Markov), &["residual-"]);
    if !report.passed {
        return report;
    }
    let specs = [
        spec(&[1.0], &[0.6]),
        spec(&[1.0], &[0.75]),
        spec(&[1.0], &[0.9]),
        spec(&[1.0], &[0.2]),
        spec(&[1.0], &[0.1]),
        spec(&[1.0, 1.0], &[0.5, 0.8]),
        spec(&[1.0, 1.0], &[0.25, 0.5]),
    ];
    let mut smallest = f64::INFINITY;
    for sp in &specs {
        let (s, t, u) = designated_triple(sp);
        let r = markov_residual(sp, s, t, u).expect("ordered triple").abs();
        if r.partial_cmp(&1e-6) != Some(std::cmp::Ordering::Greater) {
            return Outcome::new(false, format!("{}: |residual| {r:.3e} <= 1e-6", verify::spec_label(sp)));
        }
        smallest = smallest.min(r);
    }
    Outcome::new(true, format!("{}; smallest absolute residual {smallest:.3e}", report.detail))
}

fn short_range_dependence() -> Outcome {
    checks_pass(&suite(Suite::Srd), &["closed-form-vs-window", "lag-covariance-tail-slope"])
}

fn stationarity_gap_decay() -> Outcome {
    let sp = spec(&[1.0], &[0.75]);
    let xs: Vec<f64> = (0..=20).map(|i| (1e3 * 100f64.powf(i as f64 / 20.0)).round()).collect();
    let gaps: Vec<f64> = xs.iter().map(|&x| stationarity_gap(&sp, x, 1).expect("gap").abs()).collect();
    let slope = fit_log_log(&xs, &gaps).expect("fit").slope;
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    Outcome::new(
        (slope + 0.5).abs() <= 0.1 && decreasing,
        format!("slope {slope:.4} (target -0.5 +/- 0.1), monotone decrease: {decreasing}"),
    )
}

fn sampler_correctness() -> Outcome {
    checks_pass(&suite(Suite::Sampler), &["gram-exact", "gram-via-fbm", "samplers-agree"])
}

fn quadratic_variation() -> Outcome {
    let levels: Vec<u32> = (8..=13).collect();
    let reps = 200;
    let cfg = SamplerConfig::default();
    let mut parts = Vec::new();
    for h in [0.3, 0.8] {
        let sp = spec(&[1.0], &[h]);
        let r = variation_scaling(&sp, 2.0, &levels, reps, SEED, &cfg).expect("variation");
        let target = 1.0 - 2.0 * h;
        let ok = (r.fitted_log_slope - target).abs() <= 0.1;
        parts.push((ok, format!("H={h}: slope {:.4} (target {target:.1})", r.fitted_log_slope)));
    }
    for (a, h) in [(vec![1.0], vec![0.5]), (vec![1.0, 2.0], vec![0.5, 0.5])] {
        let sp = spec(&a, &h);
        let weight: f64 = a.iter().map(|x| x * x).sum();
        let r = variation_scaling(&sp, 2.0, &levels, reps, SEED, &cfg).expect("variation");
        let worst = r
            .statistics
            .iter()
            .zip(&r.statistic_stderrs)
            .map(|(m, se)| (m - weight).abs() / se)
            .fold(0.0, f64::max);
        parts.push((worst <= 4.0, format!("{}: level {weight} within {worst:.2} stderr", verify::spec_label(&sp))));
    }
    Outcome::new(parts.iter().all(|p| p.0), parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; "))
}

fn dimensions() -> Outcome {
    let grid = TimeGrid::uniform((1 << 16) + 1, 1.0).expect("grid");
    let bm = sample_ensemble(&spec(&[1.0], &[0.5]), &grid, 20, SEED).expect("sample");
    let mixed = sample_ensemble(&spec(&[1.0, 1.0], &[0.3, 0.8]), &grid, 1, SEED).expect("sample");
    let graph_bm = graph_box_dimension(&bm.paths()[0]).expect("graph").value;
    let graph_mixed = graph_box_dimension(&mixed.paths()[0]).expect("graph").value;
    let range_bm = range_dimension(&bm.paths()[0]).expect("range").value;
    let range_mixed = range_dimension(&mixed.paths()[0]).expect("range").value;
    let crossed: Vec<f64> = bm
        .paths()
        .iter()
        .filter_map(|p| match level_set_box_dimension(p, 0.0, 0.01) {
            Ok(d) => Some(d.value),
            Err(Error::LevelNotCrossed(_)) => None,
            Err(e) => panic!("level set: {e}"),
        })
        .collect();
    let level = median(&crossed);
    let ok = (graph_bm - 1.5).abs() <= 0.15
        && (graph_mixed - 1.7).abs() <= 0.15
        && (range_bm - 1.0).abs() <= 0.1
        && (range_mixed - 1.0).abs() <= 0.1
        && (level - 0.5).abs() <= 0.15;
    Outcome::new(
        ok,
        format!(
            "graph {graph_bm:.3} (1.5), {graph_mixed:.3} (1.7); range {range_bm:.3}, {range_mixed:.3} (1); \
             level-set median {level:.3} (0.5) over {}/20 crossing replicas",
            crossed.len()
        ),
    )
}

fn holder_estimate() -> Outcome {
    let grid = TimeGrid::uniform(1 << 12, 1.0).expect("grid");
    let specs = [spec(&[1.0], &[0.5]), spec(&[1.0], &[0.75]), spec(&[1.0, 1.0], &[0.4, 0.8])];
    let mut ok = true;
    let mut parts = Vec::new();
    for sp in &specs {
        let ens = sample_ensemble(sp, &grid, 100, SEED).expect("sample");
        let h = holder_exponent_estimate(&ens).expect("estimate").h_hat;
        ok &= (h - sp.h_min()).abs() <= 0.05;
        parts.push(format!("{}: {h:.4}", verify::spec_label(sp)));
    }
    Outcome::new(ok, parts.join("; "))
}

/// Independent statement of the characterization: a semimartingale iff some
/// weighted component is Brownian and every weighted component is Brownian
/// or has index strictly above 3/4.
fn semimartingale_predicate(coeffs: &[f64], hurst: &[f64]) -> bool {
    let weighted: Vec<f64> = coeffs.iter().zip(hurst).filter(|(a, _)| **a != 0.0).map(|(_, h)| *h).collect();
    weighted.contains(&0.5) && weighted.iter().all(|&h| h == 0.5 || h > 0.75)
}

/// `(coeffs, hurst, is_semimartingale, witness, reason)`.
type Example = (&'static [f64], &'static [f64], bool, Option<usize>, SemimartingaleReason);

fn classifier_truth_table() -> Outcome {
    use SemimartingaleReason::*;
    let examples: [Example; 7] = [
        (&[1.0], &[0.5], true, Some(0), HalfWitnessAndRest),
        (&[1.0, 1.0], &[0.5, 0.8], true, Some(0), HalfWitnessAndRest),
        (&[1.0, 1.0], &[0.5, 0.7], false, None, IntermediateHurst),
        (&[1.0, 1.0], &[0.5, 0.75], false, None, IntermediateHurst),
        (&[1.0, 1.0], &[0.3, 0.9], false, None, LowHurstComponent),
        (&[1.0, 1.0], &[0.8, 0.9], false, None, AllAboveHalf),
        (&[1.0, 0.0], &[0.5, 0.3], true, Some(0), HalfWitnessAndRest),
    ];
    for (a, h, semi, witness, reason) in examples {
        let v = semimartingale_classify(&spec(a, h));
        if (v.is_semimartingale, v.witness, v.reason) != (semi, witness, reason) {
            return Outcome::new(false, format!("example a={a:?} H={h:?} classified as {v:?}"));
        }
    }
    let grid = [0.3, 0.5, 0.6, 0.75, 0.8];
    let weights: [[f64; 2]; 4] = [[1.0, 1.0], [2.0, -0.5], [1.0, 0.0], [0.0, 3.0]];
    let mut cases = 0;
    for &h1 in &grid {
        for &h2 in &grid {
            for a in &weights {
                let h = [h1, h2];
                let v = semimartingale_classify(&spec(a, &h));
                let expected = semimartingale_predicate(a, &h);
                cases += 1;
                if v.is_semimartingale != expected || v.witness.is_some() != expected {
                    return Outcome::new(false, format!("sweep a={a:?} H={h:?}: {v:?}, expected {expected}"));
                }
            }
        }
    }
    Outcome::new(true, format!("7 examples and {cases} sweep cases agree"))
}

fn determinism() -> Outcome {
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        let report = pool.install(|| verify::run(&Suite::ALL, &VerifyOptions::default()));
        serde_json::to_vec_pretty(&report).expect("report encodes")
    };
    let reference = render(1);
    let mut ok = reference == render(1);
    for threads in [4, 8] {
        ok &= reference == render(threads);
    }
    Outcome::new(ok, format!("{}-byte report identical under 1, 1, 4 and 8 threads", reference.len()))
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { number: 1, title: "kernel identities", budget: secs(5), run: kernel_identities },
        Criterion { number: 2, title: "increment bounds", budget: secs(1), run: increment_bounds },
        Criterion { number: 3, title: "sign laws and monotone decomposition", budget: secs(1), run: sign_laws },
        Criterion { number: 4, title: "Markov residual", budget: secs(1), run: markov_test },
        Criterion { number: 5, title: "short-range dependence", budget: secs(10), run: short_range_dependence },
        Criterion { number: 6, title: "stationarity gap", budget: secs(5), run: stationarity_gap_decay },
        Criterion { number: 7, title: "sampler correctness", budget: secs(60), run: sampler_correctness },
        Criterion { number: 8, title: "quadratic-variation scaling", budget: secs(120), run: quadratic_variation },
        Criterion { number: 9, title: "fractal dimensions", budget: secs(600), run: dimensions },
        Criterion { number: 10, title: "Hölder exponent", budget: secs(60), run: holder_estimate },
        Criterion { number: 11, title: "classifier truth table", budget: secs(1), run: classifier_truth_table },
        Criterion { number: 12, title: "thread-count determinism", budget: secs(600), run: determinism },
    ]
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut all_passed = true;
    for c in criteria() {
        if !selected.is_empty() && !selected.contains(&c.number) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let passed = outcome.passed && in_budget;
        all_passed &= passed;
        println!(
            "criterion {:>2} {} {} ({:.2}s of {}s): {}",
            c.number,
            if passed { "PASS" } else { "FAIL" },
            c.title,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            outcome.detail
        );
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
