//! Acceptance suite. One line per criterion; exits non-zero if any fails.
//!
//! Run with `cargo test -p kgnr-core --test acceptance`.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use kgnr_core::datagen::{gaussian, lens_transform_exact, rough_sobolev, LensParams};
use kgnr_core::dynamics::{
    conserved_quantities, rk4_oracle, solve_kg_eps, solve_nls, solve_schrodinger_wave, solve_unit_kg, EquationSpec,
    OracleState, Scheme, SecondOrderState, StepPolicy,
};
use kgnr_core::experiments::{fit_rate, parse_config, rows_from_csv, rows_to_csv, run_study, SweepConfig, SweepResult};
use kgnr_core::spectral::{l2_norm, make_grid, project_low, sobolev_norm, Frame, SpectralField};
use kgnr_core::Complex64;

type Outcome = Result<String, String>;

fn config(name: &str, overrides: &[&str]) -> SweepConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    parse_config(&path, &o).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn study(name: &str, overrides: &[&str]) -> Result<SweepResult, String> {
    run_study(&config(name, overrides)).map_err(|e| format!("{name}: {e}"))
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    l2_norm(&a.sub(b).unwrap()) / l2_norm(b)
}

fn converged(r: &SweepResult) -> bool {
    r.legs.iter().all(|l| !l.unconverged)
}

fn linear_suite() -> Outcome {
    let g = make_grid(1, 2.0 * PI, 32).unwrap();
    let k = 3.0f64;
    let br = (1.0 + k * k).sqrt();
    let wave = |t: f64, w: f64| SpectralField::from_fn(&g, Frame::Rescaled, |x| Complex64::from_polar(1.0, k * x[0] - w * t));
    let s0 = SecondOrderState::new(wave(0.0, br), wave(0.0, br).scale(Complex64::new(0.0, -br)), 0.0).unwrap();
    let tr = solve_unit_kg(&s0, &EquationSpec::unit_kg(0.0), &[1.0], &StepPolicy::strang(1e-3)).unwrap();
    let e_unit = rel(&tr.samples[0].position, &wave(1.0, br));

    let eps = 0.125;
    let om = (1.0 + eps * eps * k * k).sqrt() / (eps * eps);
    let u0 = wave(0.0, om).with_frame(Frame::Original);
    let u1 = u0.scale(Complex64::new(0.0, -om * eps * eps));
    let tr = solve_kg_eps(&u0, &u1, &EquationSpec::kg_eps(eps, 0.0), &[1.0], &StepPolicy::strang(1e-3)).unwrap();
    let e_eps = rel(&tr.samples[0].position, &wave(1.0, om).with_frame(Frame::Original));

    let g = make_grid(1, 16.0, 32).unwrap();
    let w0 = SpectralField::from_fn(&g, Frame::Rescaled, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
    let w1 = SpectralField::from_fn(&g, Frame::Rescaled, |x| Complex64::new(0.0, 0.4 * (-x[0] * x[0]).exp()));
    let s0 = SecondOrderState::new(w0, w1, 0.0).unwrap();
    let spec = EquationSpec::unit_kg(3.0);
    let oracle = rk4_oracle(&spec, OracleState::Second(s0.clone()), &[1.0], 1e-3, true).unwrap();
    let OracleState::Second(o) = &oracle[0] else { unreachable!() };
    let pts: Vec<(f64, f64)> = (4..=8)
        .map(|j| {
            let h = 0.5f64.powi(j);
            let tr = solve_unit_kg(&s0, &spec, &[1.0], &StepPolicy::strang(h)).unwrap();
            (h, l2_norm(&tr.samples[0].position.sub(&o.position).unwrap()))
        })
        .collect();
    let slope = fit_rate(&pts).unwrap().slope;
    check(
        e_unit <= 1e-8 && e_eps <= 1e-8 && (slope - 2.0).abs() <= 0.1,
        format!("unit-KG {e_unit:.2e}, KG-eps {e_eps:.2e} (<= 1e-8); Strang slope {slope:.3} (2 +- 0.1)"),
    )
}

fn conservation() -> Outcome {
    let g = make_grid(1, 32.0, 256).unwrap();
    let v0 = gaussian(&g, 0.25, 1.0, &[]).unwrap().with_frame(Frame::Modulated);
    let times = [10.0];
    let p = StepPolicy::strang(0.05);

    // Strang keeps a modified energy; the offset is O(λ|w|²h²), so unit KG
    // runs at h = 1e-2.
    let spec = EquationSpec::unit_kg(3.0);
    let w1 = v0.scale(Complex64::new(0.0, 1.0)).with_frame(Frame::Rescaled);
    let s0 = SecondOrderState::new(v0.clone().with_frame(Frame::Rescaled), w1, 0.0).unwrap();
    let tr = solve_unit_kg(&s0, &spec, &times, &StepPolicy::strang(1e-2)).unwrap();
    let q0 = conserved_quantities(&s0, &spec);
    let e_kg = conserved_quantities(&tr.samples[0], &spec).drift_from(&q0);

    let spec = EquationSpec::schrodinger_wave(0.125, 3.0);
    let s0 = SecondOrderState::new(v0.clone(), SpectralField::zeros(&g, Frame::Modulated), 0.0).unwrap();
    let tr = solve_schrodinger_wave(&s0.position, &s0.velocity, &spec, &times, &p).unwrap();
    let q0 = conserved_quantities(&s0, &spec);
    let q = conserved_quantities(&tr.samples[0], &spec);
    let (e_sw, m_sw) = (q.energy_drift_from(&q0).unwrap(), q.mass_drift_from(&q0).unwrap());

    let spec = EquationSpec::nls(3.0);
    let tr = solve_nls(&v0, &spec, &times, &p).unwrap();
    let m_nls = (l2_norm(&tr.samples[0].field).powi(2) - l2_norm(&v0).powi(2)).abs() / l2_norm(&v0).powi(2);
    let worst = e_kg.max(e_sw).max(m_sw).max(m_nls);
    check(
        worst < 1e-6,
        format!("unit-KG E {e_kg:.1e}, SW E {e_sw:.1e} M {m_sw:.1e}, NLS M {m_nls:.1e} over T = 10 (< 1e-6)"),
    )
}

fn frame_equivalence() -> Outcome {
    let g = make_grid(1, 32.0, 256).unwrap();
    let v0 = gaussian(&g, 1.0, 1.0, &[]).unwrap().with_frame(Frame::Modulated);
    let v1 = SpectralField::zeros(&g, Frame::Modulated);
    let spec = EquationSpec::schrodinger_wave(0.125, 3.0);
    let run = |scheme, h0| {
        let tr = solve_schrodinger_wave(&v0, &v1, &spec, &[1.0], &StepPolicy::strang(h0).with_scheme(scheme)).unwrap();
        tr.samples[0].position.clone()
    };
    let direct = run(Scheme::StrangTrig, 0.05);
    let rescaled = run(Scheme::RescaledFrame, 0.05);
    let gap = l2_norm(&direct.sub(&rescaled).unwrap());
    // Richardson estimate of the second-order scheme's own error.
    let disc_d = l2_norm(&direct.sub(&run(Scheme::StrangTrig, 0.025)).unwrap()) * 4.0 / 3.0;
    let disc_r = l2_norm(&rescaled.sub(&run(Scheme::RescaledFrame, 0.025)).unwrap()) * 4.0 / 3.0;
    let disc = disc_d.min(disc_r);
    check(gap <= 10.0 * disc, format!("direct vs rescaled {gap:.2e} <= 10 x discretization {disc:.2e}"))
}

fn lens_identity() -> Outcome {
    let g = make_grid(1, 32.0, 512).unwrap();
    let b = 4.0;
    let f = gaussian(&g, 1.0, 1.0, &[]).unwrap().with_frame(Frame::Modulated);
    let chirped = SpectralField::from_fn(&g, Frame::Modulated, |x| {
        Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), -0.5 * b * x[0] * x[0])
    });
    let times = [0.1, 0.25];
    let tr = solve_nls(&chirped, &EquationSpec::nls(0.0), &times, &StepPolicy::strang(0.01)).unwrap();
    let worst = tr
        .samples
        .iter()
        .map(|s| l2_norm(&lens_transform_exact(&f, LensParams { b, t: s.time }).unwrap().sub(&s.field).unwrap()))
        .fold(0.0, f64::max);
    check(worst < 1e-8, format!("closed form vs free flow {worst:.2e} (< 1e-8)"))
}

fn rate() -> Outcome {
    let one = study("rate-kg-vs-sw.toml", &["step.refine_check=true"])?;
    let two = study("rate-kg-vs-sw-2d.toml", &[])?;
    let (s1, s2) = (one.fit.map(|f| f.slope).unwrap_or(f64::NAN), two.fit.map(|f| f.slope).unwrap_or(f64::NAN));
    let refine = one.legs.iter().filter_map(|l| l.refine_delta).fold(0.0, f64::max);
    check(
        (s1 - 2.0).abs() <= 0.3 && (s2 - 2.0).abs() <= 0.4 && converged(&one) && converged(&two) && refine < 0.1,
        format!("slope d=1 {s1:.3} (2 +- 0.3), d=2 {s2:.3} (2 +- 0.4); h0/2 changes errors by <= {:.2}%", 100.0 * refine),
    )
}

fn waves() -> Outcome {
    let one = study("wave-diagnostics.toml", &[])?;
    let two = study("wave-diagnostics-2d.toml", &[])?;
    let s1 = one.fit.map(|f| f.slope).unwrap_or(f64::NAN);
    let sp1 = one.summary["w2_spread"];
    let l = &two.legs;
    let s2 = (l[0].headline / l[1].headline).ln() / (l[0].epsilon / l[1].epsilon).ln();
    let sp2 = two.summary["w2_spread"];
    check(
        (s1 - 2.0).abs() <= 0.4 && sp1 < 2.0 && (s2 - 2.0).abs() <= 0.4 && sp2 < 2.0 && converged(&one) && converged(&two),
        format!("W1 slope d=1 {s1:.3}, d=2 spot {s2:.3} (2 +- 0.4); W2 spread {sp1:.3}, {sp2:.3} (< 2)"),
    )
}

fn growth() -> Outcome {
    let smooth = study("growth-in-time.toml", &[])?;
    let rough = study("sharpness-rough.toml", &[])?;
    let a = smooth.fit.map(|f| f.slope).unwrap_or(f64::NAN);
    let b = rough.fit.map(|f| f.slope).unwrap_or(f64::NAN);
    check(
        (a - 1.0).abs() <= 0.3 && (b - 0.5).abs() <= 0.25 && converged(&smooth) && converged(&rough),
        format!("smooth slope {a:.3} (1 +- 0.3), rough alpha=2 slope {b:.3} (0.5 +- 0.25)"),
    )
}

fn chirped() -> Outcome {
    let r = study("sharpness-chirped.toml", &[])?;
    let s = &r.summary;
    let (lo, spread) = (s["ratio_min"], s["ratio_spread"]);
    let (defect, bound) = (s["defect"], s["defect_bound"]);
    check(
        lo > 0.0 && spread <= 5.0 && defect >= bound && converged(&r),
        format!("error/eps^2 in [{lo:.3e}, {:.3e}], spread {spread:.2} (<= 5); defect {defect:.3e} >= {bound:.3e}", s["ratio_max"]),
    )
}

fn rough_lattice() -> Outcome {
    let g = make_grid(1, 64.0, 8192).unwrap();
    let v = rough_sobolev(&g, 1.0, 2.0).unwrap();
    let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0, 128.0]
        .iter()
        .map(|&n: &f64| (n, sobolev_norm(&project_low(&v, n).unwrap(), 4.0, false) * n.ln()))
        .collect();
    let slope = fit_rate(&pts).unwrap().slope;
    check((slope - 2.0).abs() <= 0.15, format!("exponent of N in |P_N v0|_H4 ln N: {slope:.3} (2 +- 0.15)"))
}

fn determinism() -> Outcome {
    let cfg = config("rate-kg-vs-sw.toml", &["horizon=0.5", "epsilons=[0.25, 0.125, 0.0625]"]);
    let a = rows_to_csv(&run_study(&cfg).map_err(|e| e.to_string())?.rows);
    let b = rows_to_csv(&run_study(&cfg).map_err(|e| e.to_string())?.rows);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = rows_to_csv(&pool.install(|| run_study(&cfg)).map_err(|e| e.to_string())?.rows);
    let back = rows_to_csv(&rows_from_csv(&a).map_err(|e| e.to_string())?);
    check(a == b && a == c && a == back, format!("{} CSV bytes identical across runs, worker counts and a parse round trip", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("analytic linear suite", linear_suite),
        ("conservation", conservation),
        ("frame equivalence", frame_equivalence),
        ("lens identity", lens_identity),
        ("kg-vs-sw rate", rate),
        ("leftward-wave smallness", waves),
        ("growth in time", growth),
        ("chirped sharpness", chirped),
        ("rough-profile lattice exponent", rough_lattice),
        ("determinism and CSV round trip", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, msg) = match out {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("[{tag}] {:>2} {name}: {msg} ({secs:.1} s)", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
