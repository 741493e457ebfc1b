//! Reference values below were produced by `tools/oracle.py` (mpmath, 60
//! digits) and rounded to 17 significant digits.
#![allow(clippy::excessive_precision)]

use super::*;
use proptest::prelude::*;

fn spec(a: &[f64], h: &[f64]) -> ProcessSpec {
    ProcessSpec::new(a.to_vec(), h.to_vec()).unwrap()
}

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(f64::MIN_POSITIVE)
}

macro_rules! assert_rel {
    ($got:expr, $want:expr, $rel:expr) => {{
        let (g, w) = ($got, $want);
        assert!(close(g, w, $rel), "got {g:e}, want {w:e}");
    }};
}

fn window(u: f64, v: f64, s: f64, t: f64) -> IncrementWindow {
    IncrementWindow::new(u, v, s, t).unwrap()
}

/// Increment covariance through four process covariances.
fn bilinear(spec: &ProcessSpec, w: &IncrementWindow) -> f64 {
    let c = |x, y| msfbm_cov(spec, x, y).unwrap();
    c(w.v(), w.t()) - c(w.v(), w.s()) - c(w.u(), w.t()) + c(w.u(), w.s())
}

fn bilinear_scale(spec: &ProcessSpec, w: &IncrementWindow) -> f64 {
    cov_magnitude(spec, w.v(), w.t())
        + cov_magnitude(spec, w.v(), w.s())
        + cov_magnitude(spec, w.u(), w.t())
        + cov_magnitude(spec, w.u(), w.s())
}

#[test]
fn fbm_cov_examples() {
    assert_eq!(fbm_cov(0.5, 1.0, 2.0).unwrap(), 1.0);
    assert_rel!(fbm_cov(0.7, 3.0, 3.0).unwrap(), 4.655_536_721_746_079, 1e-14);
    assert_rel!(fbm_cov(0.75, -1.0, 1.0).unwrap(), -0.414_213_562_373_095_05, 1e-14);
    assert!(fbm_cov(1.0, 1.0, 2.0).is_err());
    assert!(fbm_cov(0.0, 1.0, 2.0).is_err());
}

#[test]
fn sfbm_cov_examples() {
    assert_eq!(sfbm_cov(0.5, 1.0, 2.0).unwrap(), 1.0);
    assert_rel!(sfbm_cov(0.75, 1.0, 1.0).unwrap(), 0.585_786_437_626_904_95, 1e-14);
    assert_rel!(sfbm_cov(0.75, 1.0, 2.0).unwrap(), 0.730_350_913_392_874_16, 1e-14);
    assert_eq!(sfbm_cov(0.5, -1.0, 2.0), Err(Error::NegativeTime(-1.0)));
    assert!(sfbm_cov(1.2, 1.0, 2.0).is_err());
}

#[test]
fn msfbm_cov_examples() {
    assert_eq!(msfbm_cov(&spec(&[1.0], &[0.5]), 1.0, 2.0).unwrap(), 1.0);
    let mixed = spec(&[1.0, 1.0], &[0.5, 0.75]);
    assert_rel!(msfbm_cov(&mixed, 1.0, 2.0).unwrap(), 1.730_350_913_392_874_2, 1e-14);
    assert_eq!(msfbm_cov(&mixed, 0.0, 3.0).unwrap(), 0.0);
    assert_eq!(msfbm_cov(&spec(&[2.0, -1.0], &[0.2, 0.9]), 3.0, 0.0).unwrap(), 0.0);
}

#[test]
fn msfbm_var_examples() {
    assert_eq!(msfbm_var(&spec(&[1.0], &[0.5]), 5.0).unwrap(), 5.0);
    assert_rel!(msfbm_var(&spec(&[1.0], &[0.75]), 1.0).unwrap(), 0.585_786_437_626_904_95, 1e-14);
    assert_eq!(msfbm_var(&spec(&[2.0, 0.0], &[0.5, 0.3]), 1.0).unwrap(), 4.0);
    assert_rel!(msfbm_var(&spec(&[1.0], &[0.75]), 2.0).unwrap(), 1.656_854_249_492_380_2, 1e-14);
    assert!(msfbm_var(&spec(&[1.0], &[0.75]), -1.0).is_err());
}

#[test]
fn mfbm_cov_examples() {
    assert_eq!(mfbm_cov(&spec(&[1.0], &[0.5]), 1.0, 2.0).unwrap(), 1.0);
    assert_eq!(mfbm_cov(&spec(&[1.0], &[0.75]), 1.0, 1.0).unwrap(), 1.0);
    assert_rel!(
        mfbm_cov(&spec(&[1.0, 1.0], &[0.5, 0.75]), 1.0, 2.0).unwrap(),
        2.414_213_562_373_095,
        1e-14
    );
}

#[test]
fn increment_second_moment_examples() {
    assert_eq!(increment_second_moment(&spec(&[1.0], &[0.5]), 1.0, 2.0).unwrap(), 1.0);
    let s = spec(&[1.0, 3.0], &[0.3, 0.8]);
    assert_eq!(increment_second_moment(&s, 2.5, 2.5).unwrap(), 0.0);
    assert_rel!(
        increment_second_moment(&spec(&[1.0], &[0.75]), 1.0, 2.0).unwrap(),
        0.781_938_860_333_536_83,
        1e-14
    );
    assert!(increment_second_moment(&s, 2.0, 1.0).is_err());
    assert!(increment_second_moment(&s, -1.0, 1.0).is_err());
}

#[test]
fn increment_bounds_examples() {
    assert_eq!(increment_bounds(&spec(&[1.0], &[0.5]), 0.0, 1.0).unwrap(), (1.0, 1.0));
    let (lo, hi) = increment_bounds(&spec(&[1.0], &[0.75]), 0.0, 1.0).unwrap();
    assert_rel!(lo, 0.585_786_437_626_904_95, 1e-15);
    assert_eq!(hi, 1.0);
    let (lo, hi) = increment_bounds(&spec(&[1.0], &[0.25]), 0.0, 1.0).unwrap();
    assert_eq!(lo, 1.0);
    assert_rel!(hi, 1.292_893_218_813_452_5, 1e-15);
    assert!(increment_bounds(&spec(&[1.0], &[0.25]), 1.0, 0.5).is_err());
}

#[test]
fn bound_constants_invariants() {
    let c = increment_bound_constants(&spec(&[1.0, 1.0, 1.0], &[0.2, 0.5, 0.9]));
    assert_eq!(c.gamma[1], 1.0);
    assert_eq!(c.nu[1], 1.0);
    for i in 0..3 {
        assert!(c.gamma[i] <= c.nu[i]);
        assert!(c.gamma[i] > 0.0 && c.nu[i] < 2.0);
    }
}

#[test]
fn increment_cov_examples() {
    let w = window(0.0, 1.0, 1.0, 2.0);
    assert_eq!(increment_cov(&spec(&[1.0], &[0.5]), &w), 0.0);
    assert_rel!(increment_cov(&spec(&[1.0], &[0.75]), &w), 0.144_564_475_765_969_21, 1e-14);
    let neg = increment_cov(&spec(&[1.0], &[0.25]), &w);
    assert!(neg < 0.0);
    assert_rel!(neg, -0.244_705_060_224_796_07, 1e-14);
}

#[test]
fn lag_cov_examples() {
    assert_eq!(lag_cov_c(&spec(&[1.0], &[0.5]), 3.0, 7).unwrap(), 0.0);
    assert_rel!(lag_cov_c(&spec(&[1.0], &[0.75]), 0.0, 1).unwrap(), 0.144_564_475_765_969_21, 1e-14);
    assert!(lag_cov_c(&spec(&[1.0], &[0.25]), 0.0, 1).unwrap() < 0.0);
    assert_eq!(lag_cov_c(&spec(&[1.0], &[0.25]), 0.0, 0), Err(Error::ZeroLag));
}

#[test]
fn lag_cov_closed_form_against_extended_precision() {
    let cases = [
        (0.75, 0, 1000, 5.924_829_212_070_902_2e-6),
        (0.75, 3, 1000, 4.128_826_975_845_437_8e-5),
        (0.6, 10, 1000, 7.877_070_363_697_719_5e-6),
        (0.9, 0, 100_000, 1.439_991_360_095_039e-7),
        (0.3, 2, 50, -6.271_127_367_765_360_9e-5),
    ];
    for (h, p, n, want) in cases {
        let got = lag_cov_c_closed_form(&spec(&[1.0], &[h]), p, n).unwrap();
        assert_rel!(got, want, 1e-9);
    }
}

#[test]
fn lag_cov_asymptotic_examples() {
    assert_eq!(lag_cov_c_asymptotic(&spec(&[1.0], &[0.5]), 0, 100).unwrap(), 0.0);
    let one = lag_cov_c_asymptotic(&spec(&[1.0], &[0.75]), 0, 10).unwrap();
    assert_rel!(one, 0.005_929_270_612_815_711_2, 1e-14);
    let three = lag_cov_c_asymptotic(&spec(&[1.0], &[0.75]), 1, 10).unwrap();
    assert_rel!(three, 3.0 * one, 1e-15);
}

#[test]
fn mfbm_lag_cov_examples() {
    assert_eq!(mfbm_lag_cov_r(&spec(&[1.0], &[0.5]), 4).unwrap(), 0.0);
    assert_rel!(mfbm_lag_cov_r(&spec(&[1.0], &[0.75]), 1).unwrap(), 0.414_213_562_373_095_05, 1e-14);
    assert_rel!(
        mfbm_lag_cov_r(&spec(&[1.0, 1.0], &[0.5, 0.75]), 1).unwrap(),
        0.414_213_562_373_095_05,
        1e-14
    );
    assert_eq!(mfbm_lag_cov_r(&spec(&[1.0], &[0.5]), 0), Err(Error::ZeroLag));
}

#[test]
fn stationarity_gap_examples() {
    assert_eq!(stationarity_gap(&spec(&[1.0], &[0.5]), 10.0, 2).unwrap(), 0.0);
    let s = spec(&[1.0], &[0.75]);
    assert_rel!(stationarity_gap(&s, 0.0, 1).unwrap(), -0.269_649_086_607_125_84, 1e-14);
    assert_rel!(stationarity_gap(&s, 1000.0, 1).unwrap(), -8.381_065_560_711_532_1e-3, 1e-12);
    assert_rel!(stationarity_gap(&s, 100_000.0, 1).unwrap(), -8.385_212_989_677_179_3e-4, 1e-12);
    // Real (non-integer) position goes through the window form.
    assert_rel!(stationarity_gap(&s, 31_622.776_6, 1).unwrap(), -1.491_109_040_183_567_2e-3, 1e-9);
}

#[test]
fn markov_residual_examples() {
    assert_eq!(markov_residual(&spec(&[1.0], &[0.5]), 1.0, 2.0, 3.0).unwrap(), 0.0);
    let r = markov_residual(&spec(&[1.0], &[0.75]), 1.0, 2.0, 4.0).unwrap();
    assert_rel!(r, -0.163_760_453_730_541_55, 1e-12);
    assert_eq!(markov_residual(&spec(&[3.0, 0.0], &[0.5, 0.9]), 1.0, 2.0, 3.0).unwrap(), 0.0);
    assert!(markov_residual(&spec(&[1.0], &[0.5]), 0.0, 2.0, 3.0).is_err());
    assert!(markov_residual(&spec(&[1.0], &[0.5]), 2.0, 1.0, 3.0).is_err());
}

#[test]
fn markov_residual_at_designated_triples() {
    let t: f64 = 1000.0;
    let r = markov_residual(&spec(&[1.0], &[0.75]), t.sqrt(), t, t * t).unwrap();
    assert_rel!(r, -1_898_978.913_257_424_7, 1e-9);
    let t: f64 = 1e-3;
    let r = markov_residual(&spec(&[1.0], &[0.2]), t * t, t, t.sqrt()).unwrap();
    assert_rel!(r, 8.534_542_525_288_236_7e-5, 1e-8);
}

#[test]
fn conditional_variance_examples() {
    assert_eq!(conditional_variance(&spec(&[1.0], &[0.5]), 3.0, 1.0).unwrap(), 2.0);
    assert_eq!(conditional_variance(&spec(&[1.0, 2.0], &[0.3, 0.7]), 1.5, 1.5).unwrap(), 0.0);
    assert_rel!(
        conditional_variance(&spec(&[1.0], &[0.75]), 2.0, 1.0).unwrap(),
        0.746_262_227_501_009_1,
        1e-13
    );
    assert!(conditional_variance(&spec(&[1.0], &[0.75]), 2.0, 0.0).is_err());
}

#[test]
fn rescale_examples() {
    let bm = spec(&[1.0], &[0.5]);
    let r = rescale_coeffs(&bm, 4.0).unwrap();
    assert_eq!(r.coeffs(), &[2.0]);
    assert_eq!(msfbm_cov(&bm, 4.0, 8.0).unwrap(), 4.0 * msfbm_cov(&bm, 1.0, 2.0).unwrap());
    assert_eq!(rescale_coeffs(&bm, 1.0).unwrap(), bm);
    assert!(rescale_coeffs(&bm, 0.0).is_err());
    assert!(rescale_coeffs(&bm, -2.0).is_err());

    let mixed = spec(&[1.0, 2.0], &[0.3, 0.8]);
    let r = rescale_coeffs(&mixed, 2.0).unwrap();
    assert_rel!(r.coeffs()[0], 2f64.powf(0.3), 1e-15);
    assert_rel!(r.coeffs()[1], 2.0 * 2f64.powf(0.8), 1e-15);
    let cases = [
        (0.37, 1.9, 2.698_239_139_431_240_4),
        (2.5, 7.25, 38.666_067_401_015_969),
        (0.01, 9.99, 0.103_054_989_961_604_8),
    ];
    for (s, t, want) in cases {
        assert_rel!(msfbm_cov(&mixed, 2.0 * s, 2.0 * t).unwrap(), want, 1e-12);
        assert_rel!(msfbm_cov(&r, s, t).unwrap(), want, 1e-12);
    }
}

#[test]
fn lag_closed_form_matches_window_for_integer_positions() {
    let s = spec(&[1.3, -0.7, 2.0], &[0.3, 0.6, 0.85]);
    for p in 0..=10u64 {
        for n in [1u64, 2, 3, 7, 50, 999, 1000] {
            let closed = lag_cov_c_closed_form(&s, p, n).unwrap();
            let w = lag_window(p as f64, n).unwrap();
            let open = increment_cov(&s, &w);
            assert!(
                (closed - open).abs() <= 1e-12 * increment_cov_magnitude(&s, &w),
                "p={p} n={n}: {closed:e} vs {open:e}"
            );
        }
    }
}

#[test]
fn asymptotic_ratio_approaches_one() {
    for h in [0.3, 0.6, 0.75, 0.9] {
        let s = spec(&[1.0], &[h]);
        for n in [1_000u64, 10_000] {
            let ratio = lag_cov_c(&s, 2.0, n).unwrap() / lag_cov_c_asymptotic(&s, 2, n).unwrap();
            assert!((ratio - 1.0).abs() <= 10.0 / (n as f64).sqrt(), "h={h} n={n} ratio={ratio}");
        }
    }
}

fn arb_spec() -> impl Strategy<Value = ProcessSpec> {
    prop::collection::vec((-10.0f64..10.0, 0.05f64..0.95), 1..=4)
        .prop_filter("needs an active component", |c| c.iter().any(|(a, _)| *a != 0.0))
        .prop_map(|c| {
            let (a, h) = c.into_iter().unzip();
            ProcessSpec::new(a, h).unwrap()
        })
}

fn arb_window() -> impl Strategy<Value = IncrementWindow> {
    prop::array::uniform4(0.0f64..10.0).prop_filter_map("strict window", |mut x| {
        x.sort_by(f64::total_cmp);
        IncrementWindow::new(x[0], x[1], x[2], x[3]).ok()
    })
}

proptest! {
    #[test]
    fn kernels_are_symmetric(spec in arb_spec(), s in 0.0f64..10.0, t in 0.0f64..10.0) {
        prop_assert_eq!(msfbm_cov(&spec, s, t).unwrap(), msfbm_cov(&spec, t, s).unwrap());
        prop_assert_eq!(mfbm_cov(&spec, s, t).unwrap(), mfbm_cov(&spec, t, s).unwrap());
        let h = spec.hurst()[0];
        prop_assert_eq!(fbm_cov(h, -s, t).unwrap(), fbm_cov(h, t, -s).unwrap());
    }

    #[test]
    fn diagonal_is_variance(spec in arb_spec(), t in 0.0f64..10.0) {
        let c = msfbm_cov(&spec, t, t).unwrap();
        let v = msfbm_var(&spec, t).unwrap();
        prop_assert!((c - v).abs() <= 1e-12 * cov_magnitude(&spec, t, t));
    }

    #[test]
    fn window_form_matches_bilinear(spec in arb_spec(), w in arb_window()) {
        let direct = increment_cov(&spec, &w);
        let expanded = bilinear(&spec, &w);
        prop_assert!((direct - expanded).abs() <= 1e-12 * bilinear_scale(&spec, &w));
    }

    #[test]
    fn increment_moment_matches_expansion(spec in arb_spec(), a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        let m = increment_second_moment(&spec, s, t).unwrap();
        let e = msfbm_var(&spec, t).unwrap() + msfbm_var(&spec, s).unwrap()
            - 2.0 * msfbm_cov(&spec, s, t).unwrap();
        let scale = cov_magnitude(&spec, t, t) + cov_magnitude(&spec, s, s) + 2.0 * cov_magnitude(&spec, s, t);
        prop_assert!((m - e).abs() <= 1e-12 * scale);
        prop_assert!(m >= 0.0);
        let (lo, hi) = increment_bounds(&spec, s, t).unwrap();
        prop_assert!(lo <= m && m <= hi, "{} <= {} <= {}", lo, m, hi);
    }

    #[test]
    fn rescaling_identity(spec in arb_spec(), h in 0.01f64..10.0, s in 0.0f64..10.0, t in 0.0f64..10.0) {
        let scaled = rescale_coeffs(&spec, h).unwrap();
        let lhs = msfbm_cov(&spec, h * s, h * t).unwrap();
        let rhs = msfbm_cov(&scaled, s, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * cov_magnitude(&spec, h * s, h * t));
    }

    #[test]
    fn conditional_variance_nonnegative(spec in arb_spec(), s in 0.01f64..10.0, t in 0.01f64..10.0) {
        prop_assert!(conditional_variance(&spec, t, s).unwrap() >= 0.0);
    }
}

fn log_slope(f: impl Fn(f64) -> f64, x0: f64, x1: f64) -> f64 {
    (f(x1).abs().ln() - f(x0).abs().ln()) / (x1.ln() - x0.ln())
}

#[test]
fn lag_covariance_tail_slope() {
    for h in [0.6, 0.75, 0.9] {
        let s = spec(&[1.0], &[h]);
        let slope = log_slope(|n| lag_cov_c(&s, 0.0, n as u64).unwrap(), 1e3, 1e5);
        assert!((slope - (2.0 * h - 3.0)).abs() <= 0.1, "h={h} slope={slope}");
    }
}

#[test]
fn stationarity_gap_slope_and_monotone_decay() {
    let s = spec(&[1.0], &[0.75]);
    let slope = log_slope(|x| stationarity_gap(&s, x, 1).unwrap(), 1e3, 1e5);
    assert!((slope + 0.5).abs() <= 0.1, "slope={slope}");
    let mut prev = f64::INFINITY;
    for k in 0..=20 {
        let x = (1e3f64 * 10f64.powf(k as f64 / 10.0)).round();
        let g = stationarity_gap(&s, x, 1).unwrap().abs();
        assert!(g < prev);
        prev = g;
    }
}

fn uniform_spec(range: std::ops::Range<f64>) -> impl Strategy<Value = ProcessSpec> {
    prop::collection::vec((0.1f64..10.0, range), 1..=4).prop_map(|c| {
        let (a, h) = c.into_iter().unzip();
        ProcessSpec::new(a, h).unwrap()
    })
}

proptest! {
    #[test]
    fn sign_law_above_half(spec in uniform_spec(0.51..0.95), w in arb_window()) {
        prop_assert!(increment_cov(&spec, &w) > 0.0);
    }

    #[test]
    fn sign_law_below_half(spec in uniform_spec(0.05..0.49), w in arb_window()) {
        prop_assert!(increment_cov(&spec, &w) < 0.0);
    }

    #[test]
    fn sign_law_brownian(a in prop::collection::vec(0.1f64..10.0, 1..=4), w in arb_window()) {
        let h = vec![0.5; a.len()];
        prop_assert_eq!(increment_cov(&ProcessSpec::new(a, h).unwrap(), &w), 0.0);
    }

    #[test]
    fn increment_cov_decomposes_by_component(spec in arb_spec(), w in arb_window()) {
        let total = increment_cov(&spec, &w);
        let parts: f64 = spec.components().map(|(a, h)| a * a * component_increment_cov(h, &w)).sum();
        prop_assert_eq!(total, parts);
        // Growing one coefficient moves the covariance in the direction of
        // that component's sign.
        let i = 0;
        let h = spec.hurst()[i];
        let a = spec.coeffs()[i];
        let bigger = spec.with_coeff(i, a.abs() + 1.0).unwrap();
        let diff = increment_cov(&bigger, &w) - total;
        let c = component_increment_cov(h, &w);
        if h == 0.5 {
            prop_assert_eq!(diff, 0.0);
        } else {
            prop_assert_eq!(c > 0.0, h > 0.5);
            prop_assert_eq!(diff > 0.0, h > 0.5);
        }
    }

    #[test]
    fn brownian_mixtures_are_markov(
        a in prop::collection::vec(-10.0f64..10.0, 1..=4),
        x in prop::array::uniform3(0.01f64..10.0),
    ) {
        prop_assume!(a.iter().any(|&v| v != 0.0));
        let mut x = x;
        x.sort_by(f64::total_cmp);
        prop_assume!(x[0] < x[1] && x[1] < x[2]);
        let h = vec![0.5; a.len()];
        let r = markov_residual(&ProcessSpec::new(a, h).unwrap(), x[0], x[1], x[2]).unwrap();
        prop_assert!(r.abs() <= 1e-12, "{}", r);
    }
}

#[test]
fn non_brownian_specs_have_nonzero_residual_at_proof_triples() {
    let big = 1e3f64;
    let small = 1e-3f64;
    for h in [0.6, 0.75, 0.9] {
        let r = markov_residual(&spec(&[1.0], &[h]), big.sqrt(), big, big * big).unwrap();
        assert!(r.abs() > 1e-6, "h={h}");
    }
    for h in [0.1, 0.2] {
        let r = markov_residual(&spec(&[1.0], &[h]), small * small, small, small.sqrt()).unwrap();
        assert!(r.abs() > 1e-6, "h={h}");
    }
    let mixed = spec(&[1.0, 1.0], &[0.5, 0.8]);
    assert!(markov_residual(&mixed, big.sqrt(), big, big * big).unwrap().abs() > 1e-6);
}
