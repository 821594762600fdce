use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::datagen::{gaussian, lens_transform_exact, LensParams};
use crate::dynamics::{
    rk4_oracle, solve_kg_eps, solve_nls, solve_schrodinger_wave, solve_unit_kg, EquationSpec, OracleState, Scheme,
    SecondOrderState, StepPolicy,
};
use crate::error::Result;
use crate::spectral::{apply_multiplier, l2_norm, make_grid, Frame, MultiplierSpec, SpectralField};

/// Deliberate corruption used to check that the battery can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Replace `⟨∇⟩` with `⟨∇⟩^{1.01}`.
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

fn rel(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    Ok(l2_norm(&a.sub(b)?) / l2_norm(b).max(1e-300))
}

fn bracket_plane_wave(fault: Option<Fault>) -> Result<f64> {
    let g = make_grid(1, 2.0 * PI, 32)?;
    let k = 3.0;
    let br = (1.0f64 + k * k).sqrt();
    let wave = |t: f64| SpectralField::from_fn(&g, Frame::Rescaled, |x| Complex64::from_polar(1.0, k * x[0] - br * t));
    let m = match fault {
        Some(Fault::Bracket) => MultiplierSpec::bracket_pow(1.01),
        None => MultiplierSpec::bracket(),
    };
    let applied = apply_multiplier(&wave(0.0), &m)?;
    let e1 = rel(&applied, &wave(0.0).scale(br.into()))?;
    let s0 = SecondOrderState::new(wave(0.0), applied.scale(-Complex64::i()), 0.0)?;
    let tr = solve_unit_kg(&s0, &EquationSpec::unit_kg(0.0), &[1.0], &StepPolicy::strang(1e-3))?;
    Ok(e1.max(rel(&tr.samples[0].position, &wave(1.0))?))
}

fn kg_eps_plane_wave() -> Result<f64> {
    let g = make_grid(1, 2.0 * PI, 16)?;
    let (eps, k): (f64, f64) = (0.25, 2.0);
    let om = (1.0 + eps * eps * k * k).sqrt() / (eps * eps);
    let u = |t: f64| SpectralField::from_fn(&g, Frame::Original, |x| Complex64::new((om * t).cos() * (k * x[0]).cos(), 0.0));
    let zero = SpectralField::zeros(&g, Frame::Original);
    let tr = solve_kg_eps(&u(0.0), &zero, &EquationSpec::kg_eps(eps, 0.0), &[1.0], &StepPolicy::strang(1e-3))?;
    rel(&tr.samples[0].position, &u(1.0))
}

fn nls_constant() -> Result<f64> {
    let g = make_grid(1, 2.0 * PI, 8)?;
    let c = Complex64::new(0.3, 0.4);
    let v0 = SpectralField::from_fn(&g, Frame::Modulated, |_| c);
    let tr = solve_nls(&v0, &EquationSpec::nls(3.0), &[2.0], &StepPolicy::strang(0.1))?;
    rel(&tr.samples[0].field, &v0.scale(Complex64::from_polar(1.0, 3.0 * c.norm_sqr())))
}

fn sw_constant() -> Result<f64> {
    let g = make_grid(1, 2.0 * PI, 8)?;
    let (eps, lam, c) = (0.5f64, 3.0, 0.6f64);
    let om = (-1.0 + (1.0 + lam * c * c * eps * eps).sqrt()) / (eps * eps);
    let v0 = SpectralField::from_fn(&g, Frame::Modulated, |_| Complex64::new(c, 0.0));
    let v1 = v0.scale(Complex64::new(0.0, om));
    let tr = solve_schrodinger_wave(&v0, &v1, &EquationSpec::schrodinger_wave(eps, lam), &[1.0], &StepPolicy::strang(1e-3))?;
    rel(&tr.samples[0].position, &v0.scale(Complex64::from_polar(1.0, om)))
}

fn duffing_constant() -> Result<f64> {
    let g = make_grid(1, 2.0 * PI, 8)?;
    let w0 = SpectralField::from_fn(&g, Frame::Rescaled, |_| Complex64::new(0.8, 0.0));
    let s0 = SecondOrderState::new(w0, SpectralField::zeros(&g, Frame::Rescaled), 0.0)?;
    let spec = EquationSpec::unit_kg(1.0);
    let tr = solve_unit_kg(&s0, &spec, &[1.0], &StepPolicy::strang(1e-3))?;
    let o = rk4_oracle(&spec, OracleState::Second(s0), &[1.0], 1e-5, true)?;
    let OracleState::Second(o) = &o[0] else { unreachable!("second-order oracle") };
    rel(&tr.samples[0].position, &o.position)
}

fn lens_identity() -> Result<f64> {
    let g = make_grid(1, 32.0, 256)?;
    let b = 4.0;
    let f = gaussian(&g, 1.0, 1.0, &[])?.with_frame(Frame::Modulated);
    let chirped = SpectralField::from_fn(&g, Frame::Modulated, |x| {
        Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), -0.5 * b * x[0] * x[0])
    });
    let tr = solve_nls(&chirped, &EquationSpec::nls(0.0), &[0.25], &StepPolicy::strang(0.05))?;
    let lens = lens_transform_exact(&f, LensParams { b, t: 0.25 })?;
    Ok(l2_norm(&lens.sub(&tr.samples[0].field)?))
}

fn frame_equivalence() -> Result<f64> {
    let g = make_grid(1, 32.0, 128)?;
    let v0 = gaussian(&g, 1.0, 1.0, &[])?.with_frame(Frame::Modulated);
    let v1 = SpectralField::zeros(&g, Frame::Modulated);
    let spec = EquationSpec::schrodinger_wave(0.125, 3.0);
    let p = StepPolicy::strang(0.05);
    let a = solve_schrodinger_wave(&v0, &v1, &spec, &[0.5], &p)?;
    let b = solve_schrodinger_wave(&v0, &v1, &spec, &[0.5], &p.with_scheme(Scheme::RescaledFrame))?;
    rel(&a.samples[0].position, &b.samples[0].position)
}

/// The fast analytic battery: plane waves, constant-data ODEs, the lens
/// identity and frame equivalence. Deterministic.
pub fn validation_battery(fault: Option<Fault>) -> Vec<CheckResult> {
    let checks: Vec<(&str, f64, Result<f64>)> = vec![
        ("bracket plane-wave", 1e-8, bracket_plane_wave(fault)),
        ("kg-eps plane-wave", 1e-8, kg_eps_plane_wave()),
        ("nls constant data", 1e-12, nls_constant()),
        ("schrodinger-wave constant data", 1e-6, sw_constant()),
        ("unit-kg constant data", 1e-6, duffing_constant()),
        ("lens identity", 1e-6, lens_identity()),
        ("frame equivalence", 1e-8, frame_equivalence()),
    ];
    checks
        .into_iter()
        .map(|(name, tolerance, r)| {
            let value = r.unwrap_or(f64::INFINITY);
            CheckResult { name: name.to_string(), passed: value <= tolerance, value, tolerance }
        })
        .collect()
}
