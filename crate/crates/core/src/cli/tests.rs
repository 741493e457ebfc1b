use super::config::*;
use super::*;

const DEFAULTS: Defaults = Defaults { grid_points: 16, reps: 1, format: Format::Csv };

fn file(toml_text: &str) -> FileConfig {
    toml::from_str(toml_text).unwrap()
}

#[test]
fn flags_override_file_override_defaults() {
    let f = file("hurst = [0.3]\nseed = 5\nreps = 10\ngrid_points = 32\nformat = \"json\"\n[sampler]\nroute = \"exact\"\n");
    let flags = Overrides { seed: Some(9), hurst: Some(vec![0.7, 0.8]), ..Overrides::default() };
    let cfg = RunConfig::resolve(flags, f, DEFAULTS).unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.spec.as_ref().unwrap().hurst(), &[0.7, 0.8]);
    assert_eq!(cfg.spec.as_ref().unwrap().coeffs(), &[1.0, 1.0]);
    assert_eq!(cfg.reps, 10);
    assert!(cfg.reps_given);
    assert_eq!(cfg.grid_points, 32);
    assert_eq!(cfg.format, Format::Json);
    assert_eq!(cfg.sampler.route, crate::sampler::Route::Exact);
    assert_eq!(cfg.horizon, DEFAULT_HORIZON);

    let cfg = RunConfig::resolve(Overrides::default(), FileConfig::default(), DEFAULTS).unwrap();
    assert!(cfg.spec.is_none());
    assert_eq!(cfg.seed, crate::verify::DEFAULT_SEED);
    assert_eq!((cfg.grid_points, cfg.reps, cfg.reps_given), (16, 1, false));
    assert_eq!(cfg.suites, crate::verify::Suite::ALL.to_vec());
}

#[test]
fn route_flag_overrides_file_sampler_table() {
    let f = file("[sampler]\nroute = \"exact\"\ndense_limit = 10\n");
    let flags = Overrides { route: Some(Route::ViaFbm), ..Overrides::default() };
    let cfg = RunConfig::resolve(flags, f, DEFAULTS).unwrap();
    assert_eq!(cfg.sampler.route, Route::ViaFbm);
    assert_eq!(cfg.sampler.dense_limit, 10);
}

#[test]
fn config_file_rejects_unknown_keys() {
    assert!(toml::from_str::<FileConfig>("hurts = [0.5]").is_err());
    assert!(toml::from_str::<FileConfig>("[sampler]\nroot = \"exact\"").is_err());
    assert!(toml::from_str::<FileConfig>("format = \"xml\"").is_err());
}

#[test]
fn invalid_specs_are_validation_errors() {
    let bad = |o: Overrides| RunConfig::resolve(o, FileConfig::default(), DEFAULTS).unwrap_err();
    let e = bad(Overrides { hurst: Some(vec![1.0]), ..Overrides::default() });
    assert_eq!(e.exit_code(), EXIT_VALIDATION);
    assert!(e.to_string().contains("hurst out of open interval (0,1)"));
    let e = bad(Overrides { coeffs: Some(vec![1.0]), ..Overrides::default() });
    assert!(e.to_string().contains("--coeffs given without --hurst"));
    let e = bad(Overrides { hurst: Some(vec![0.5]), coeffs: Some(vec![1.0, 2.0]), ..Overrides::default() });
    assert_eq!(e.exit_code(), EXIT_VALIDATION);
    let e = bad(Overrides { hurst: Some(vec![0.5]), half_tol: Some(-1.0), ..Overrides::default() });
    assert_eq!(e.exit_code(), EXIT_VALIDATION);
}

#[test]
fn error_exit_codes() {
    assert_eq!(CliError::from(Error::FactorizationFailure { max_diag: 1.0 }).exit_code(), EXIT_NUMERICAL);
    assert_eq!(CliError::from(Error::InsufficientResolution("x".into())).exit_code(), EXIT_VALIDATION);
    assert_eq!(CliError::from(Error::HurstOutOfRange(2.0)).exit_code(), EXIT_VALIDATION);
    assert_eq!(CliError::VerifyFailed.exit_code(), EXIT_VERIFY_FAILED);
}

#[test]
fn grid_prefers_explicit_times() {
    let flags = Overrides { times: Some(vec![0.0, 0.5, 2.0]), grid_points: Some(8), ..Overrides::default() };
    let cfg = RunConfig::resolve(flags, FileConfig::default(), DEFAULTS).unwrap();
    let grid = cfg.grid().unwrap();
    assert_eq!(grid.times(), &[0.0, 0.5, 2.0]);
    let flags = Overrides { times: Some(vec![0.0, 2.0, 1.0]), ..Overrides::default() };
    let cfg = RunConfig::resolve(flags, FileConfig::default(), DEFAULTS).unwrap();
    assert_eq!(cfg.grid().unwrap_err().exit_code(), EXIT_VALIDATION);
}

#[test]
fn number_formatting_round_trips() {
    for x in [1.0, 0.1 + 0.2, 1e-300, -2.5e17, 0.730_350_913_392_874_3, f64::MIN_POSITIVE] {
        let s = output::value(x);
        assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
    }
    assert_eq!(output::value(1.0), "1.0");
    assert_eq!(output::input(2.0), "2");
}

#[test]
fn csv_document_layout() {
    let mut doc = output::CsvDoc::new(&["a", "b"]);
    doc.meta("seed", "7");
    doc.row(["1", "x, \"quoted\""]);
    assert_eq!(doc.finish(), "# seed: 7\na,b\n1,\"x, \"\"quoted\"\"\"\n");
}

#[test]
fn srd_report_lags() {
    assert_eq!(commands::report_lags_for_tests(25), vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 25]);
    assert_eq!(commands::report_lags_for_tests(100).last(), Some(&100));
    assert_eq!(commands::report_lags_for_tests(100).len(), 19);
}

#[test]
fn help_documents_precedence_and_exit_codes() {
    use clap::CommandFactory;
    let help = Cli::command().render_long_help().to_string();
    assert!(help.contains("flags > config file"));
    assert!(help.contains(THREADS_ENV));
    assert!(help.contains("3 numerical failure"));
}

#[test]
fn parses_subcommands() {
    let cli = Cli::try_parse_from(["msfbm", "verify", "kernels", "--suite", "srd,markov"]).unwrap();
    let Command::Verify(v) = cli.command else { panic!("expected verify") };
    assert_eq!(v.suites, vec![Suite::Kernels]);
    assert_eq!(v.suite, Some(vec![Suite::Srd, Suite::Markov]));
    let cli = Cli::try_parse_from(["msfbm", "cov", "--coeffs", "-1,2", "--hurst", "0.3,0.7", "--points", "1,2"]).unwrap();
    let Command::Cov(c) = cli.command else { panic!("expected cov") };
    assert_eq!(c.spec.coeffs, Some(vec![-1.0, 2.0]));
    assert!(Cli::try_parse_from(["msfbm", "verify", "everything"]).is_err());
    assert!(Cli::try_parse_from(["msfbm", "cov", "--hurst", "0.5"]).is_err());
}
