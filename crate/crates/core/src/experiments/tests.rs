use super::*;
use crate::datagen::DataFamily;
use crate::error::Error;
use crate::limits::Pairing;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn minimal_config_fills_defaults() {
    let cfg = parse_config_str("study = \"rate-kg-vs-sw\"", &[]).unwrap();
    assert_eq!(cfg.dim, 1);
    assert_eq!(cfg.lambda.kg, 1.0);
    assert_eq!(cfg.lambda.profile, Some(3.0));
    assert_eq!(cfg.step.h0, 0.05);
    let echo = echo_config(&cfg);
    assert!(echo.contains("profile = 3.0"), "{echo}");
    assert!(echo.contains("h0 = 0.05"), "{echo}");
}

#[test]
fn profile_lambda_follows_pairing() {
    let cfg = parse_config_str("study = \"rate-sw-vs-nls\"", &[]).unwrap();
    assert_eq!(cfg.lambda.profile, Some(1.0));
    let cfg = parse_config_str("study = \"growth-in-time\"", &[]).unwrap();
    assert_eq!(cfg.growth.pairing, Pairing::SwVsNls);
    assert_eq!(cfg.lambda.profile, Some(1.0));
    let cfg = parse_config_str("study = \"growth-in-time\"", &["growth.pairing=\"kg-vs-nls\"".into()]).unwrap();
    assert_eq!(cfg.lambda.profile, Some(3.0));
}

#[test]
fn unknown_keys_are_rejected() {
    let e = parse_config_str("study = \"rate-kg-vs-sw\"\nepsilon = 0.1", &[]).unwrap_err();
    assert!(matches!(e, Error::Config(ref m) if m.contains("epsilon")), "{e}");
    let e = parse_config_str("study = \"rate-kg-vs-sw\"\n[grid]\nsize = 3", &[]).unwrap_err();
    assert!(matches!(e, Error::Config(ref m) if m.contains("size")), "{e}");
}

#[test]
fn missing_study_is_named() {
    let e = parse_config_str("dim = 1", &[]).unwrap_err();
    assert!(e.to_string().contains("study"), "{e}");
}

#[test]
fn epsilons_must_decrease() {
    let e = parse_config_str("study = \"rate-kg-vs-sw\"\nepsilons = [0.1, 0.2, 0.05]", &[]).unwrap_err();
    assert!(e.to_string().contains("decreasing"), "{e}");
    let e = parse_config_str("study = \"rate-kg-vs-sw\"\nepsilons = [0.2, 0.1]", &[]).unwrap_err();
    assert!(e.to_string().contains("at least 3"), "{e}");
    assert!(parse_config_str("study = \"wave-diagnostics\"\nepsilons = [0.2, 0.1]", &[]).is_ok());
}

#[test]
fn overrides_apply_and_echo() {
    let cfg = parse_config_str(
        "study = \"rate-kg-vs-sw\"",
        &["epsilons=[0.5, 0.25, 0.125]".into(), "grid.points=128".into(), "data.family=rough-sobolev".into()],
    )
    .unwrap();
    assert_eq!(cfg.epsilons, vec![0.5, 0.25, 0.125]);
    assert_eq!(cfg.grid.points, 128);
    assert_eq!(cfg.data.family, DataFamily::RoughSobolev);
    assert!(echo_config(&cfg).contains("epsilons = [0.5, 0.25, 0.125]"));
    let e = parse_config_str("study = \"rate-kg-vs-sw\"", &["grid.points".into()]).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
}

#[test]
fn sharpness_studies_check_data_family() {
    assert!(parse_config_str("study = \"sharpness-chirped\"", &[]).is_err());
    assert!(parse_config_str("study = \"sharpness-chirped\"\n[data]\nfamily = \"chirped-annulus\"", &[]).is_ok());
    assert!(parse_config_str("study = \"sharpness-rough\"", &[]).is_err());
}

#[test]
fn oracle_scheme_rejected_for_sweeps() {
    assert!(parse_config_str("study = \"rate-kg-vs-sw\"\n[step]\nscheme = \"rk4-oracle\"", &[]).is_err());
}

#[test]
fn fit_recovers_power_law() {
    let pts: Vec<(f64, f64)> = [0.25, 0.125, 0.0625, 0.03125].iter().map(|&e: &f64| (e, 3.0 * e * e)).collect();
    let f = fit_rate(&pts).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-12);
    assert!((f.intercept - 3.0f64.ln()).abs() < 1e-12);
    assert!(f.residual < 1e-12);
}

#[test]
fn fit_with_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts: Vec<(f64, f64)> = (0..6)
        .map(|k| {
            let e = 0.5f64.powi(k + 1);
            (e, e * e * (1.0 + 0.05 * rng.random_range(-1.0..1.0)))
        })
        .collect();
    let f = fit_rate(&pts).unwrap();
    assert!((f.slope - 2.0).abs() < 0.05, "{}", f.slope);
    assert!(f.residual < 0.1);
}

#[test]
fn fit_rejects_bad_input() {
    assert!(fit_rate(&[(0.1, 1.0), (0.2, 2.0)]).is_err());
    assert!(fit_rate(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_err());
    assert!(fit_rate(&[(0.1, 1.0), (0.1, 2.0), (0.1, 1.0)]).is_err());
}

#[test]
fn synthetic_sweep_fits_injected_rate() {
    let cfg = parse_config_str(
        "study = \"rate-kg-vs-sw\"\nseed = 3\n[synthetic]\ncoefficient = 2.0\nexponent = 2.0\nnoise = 0.05",
        &[],
    )
    .unwrap();
    let r = run_study(&cfg).unwrap();
    let f = r.fit.unwrap();
    assert!((f.slope - 2.0).abs() < 0.1, "{}", f.slope);
    assert_eq!(r.rows.len(), 4);
}

#[test]
fn synthetic_growth_window() {
    let cfg = parse_config_str("study = \"growth-in-time\"\n[synthetic]\nexponent = 1.0", &[]).unwrap();
    let r = run_study(&cfg).unwrap();
    assert!((r.fit.unwrap().slope - 1.0).abs() < 1e-12);
    assert!((r.summary["window_start"] - 3.0).abs() < 1e-12);
}

#[test]
fn csv_round_trip_is_exact() {
    let cfg = parse_config_str("study = \"rate-kg-vs-sw\"\n[synthetic]\nexponent = 2.0\nnoise = 0.3", &[]).unwrap();
    let mut rows = run_study(&cfg).unwrap().rows;
    rows[0].energy_drift = Some(1.0 / 3.0);
    rows[1].err_sobolev_gamma = Some(std::f64::consts::PI * 1e-17);
    let text = rows_to_csv(&rows);
    let back = rows_from_csv(&text).unwrap();
    assert_eq!(back, rows);
    assert!(text.starts_with(CSV_HEADER));
    assert!(text.lines().nth(1).unwrap().contains(",,"));
}

#[test]
fn emit_writes_files_and_reports_paths() {
    let cfg = parse_config_str("study = \"rate-kg-vs-sw\"\n[synthetic]\nexponent = 2.0", &[]).unwrap();
    let r = run_study(&cfg).unwrap();
    let man = RunManifest::new(&cfg, &r, 0.0);
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_results(&r, &man, dir.path(), true).unwrap();
    let svg = std::fs::read_to_string(paths.plot.unwrap()).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    let m: toml::Table = toml::from_str(&std::fs::read_to_string(paths.manifest).unwrap()).unwrap();
    assert!(m.contains_key("config") && m.contains_key("code_version"));

    let file = dir.path().join("blocker");
    std::fs::write(&file, "x").unwrap();
    let e = emit_results(&r, &man, &file.join("sub"), false).unwrap_err();
    assert!(e.is_io());
    assert!(e.to_string().contains("blocker"), "{e}");
}

fn small(study: &str, extra: &str) -> SweepConfig {
    let text = format!(
        "study = \"{study}\"\nepsilons = [0.5, 0.25, 0.125]\nhorizon = 0.5\n[grid]\nextent = 16.0\npoints = 64\n[output]\nsamples_per_unit = 8\n{extra}"
    );
    parse_config_str(&text, &[]).unwrap()
}

#[test]
fn real_sweep_is_deterministic_and_ordered() {
    let cfg = small("rate-kg-vs-sw", "");
    let a = run_study(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    assert_eq!(rows_to_csv(&a.rows), rows_to_csv(&b.rows));
    let eps: Vec<f64> = a.legs.iter().map(|l| l.epsilon).collect();
    assert_eq!(eps, cfg.epsilons);
    assert_eq!(a.rows.len(), 3 * 5);
    assert!(a.rows.iter().all(|r| r.err_l2.is_some() && r.energy_drift.is_some() && r.mass_drift.is_some()));
    assert_eq!(a.rows[0].err_l2.unwrap(), 0.0f64.max(a.rows[0].err_l2.unwrap()));
}

#[test]
fn wave_sweep_rows_carry_half_waves() {
    let cfg = small("wave-diagnostics", "");
    let r = run_study(&cfg).unwrap();
    assert!(r.rows.iter().all(|x| x.w1_l2.is_some() && x.w2_l2.is_some() && x.err_l2.is_none()));
    assert!(r.summary.contains_key("w2_spread"));
}

#[test]
fn drifting_leg_is_excluded() {
    // A coarse step on a large amplitude makes the energy drift visibly.
    let cfg = small("rate-kg-vs-sw", "[step]\nh0 = 0.5\n[data]\nfamily = \"gaussian\"\ndelta0 = 3.0");
    let r = run_study(&cfg).unwrap();
    assert!(r.legs.iter().any(|l| l.unconverged));
    assert!(r.warnings.iter().any(|w| w.contains("excluded")));
}

#[test]
fn battery_passes_and_catches_fault() {
    let clean = validation_battery(None);
    assert!(clean.iter().all(|c| c.passed), "{clean:?}");
    let faulty = validation_battery(Some(Fault::Bracket));
    let failed: Vec<&str> = faulty.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, vec!["bracket plane-wave"]);
    assert_eq!(validation_battery(None), clean);
}
