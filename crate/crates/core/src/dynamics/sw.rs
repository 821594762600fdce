use num_complex::Complex64;

use super::kg::state_from_coefficients;
use super::split::{check_times, Branches, SecondOrderSplitter};
use super::{oracle, solve_unit_kg, EquationKind, EquationSpec, Scheme, SecondOrderState, StepPolicy, Trajectory};
use crate::error::Result;
use crate::spectral::{sw_fast_branch, sw_slow_branch, Frame, Representation, SpectralField};

/// `ε²v_tt + 2i v_t - Δv = -λ|v|²v` with `v(0) = v0`, `v_t(0) = v1`.
///
/// `strang-trig` propagates both branches `e^{iω±t}` exactly; `rescaled-frame`
/// solves unit KG for `w = e^{iτ}𝒮_ε v` on the stretched grid and maps back.
pub fn solve_schrodinger_wave(
    v0: &SpectralField,
    v1: &SpectralField,
    spec: &EquationSpec,
    times: &[f64],
    policy: &StepPolicy,
) -> Result<Trajectory<SecondOrderState>> {
    spec.expect(EquationKind::SchrodingerWave)?;
    policy.validate(spec)?;
    let state0 = SecondOrderState::new(v0.clone(), v1.clone().with_frame(v0.frame()), 0.0)?;
    check_times(0.0, times)?;
    match policy.scheme {
        Scheme::StrangTrig => direct(&state0, spec, times, policy),
        Scheme::RescaledFrame => rescaled(&state0, spec, times, policy),
        Scheme::Rk4Oracle => oracle::rk4_second_order(&state0, spec, times, policy.h0, policy.two_thirds_for(spec)),
    }
}

fn direct(
    state0: &SecondOrderState,
    spec: &EquationSpec,
    times: &[f64],
    policy: &StepPolicy,
) -> Result<Trajectory<SecondOrderState>> {
    let grid = *state0.position.grid();
    let eps = spec.epsilon;
    let k2 = grid.xi_squared();
    let flow = Branches {
        slow: k2.iter().map(|&k| sw_slow_branch(eps, k)).collect(),
        fast: k2.iter().map(|&k| sw_fast_branch(eps, k)).collect(),
    };
    let mut s = SecondOrderSplitter::new(
        grid,
        flow,
        spec.lambda / (eps * eps),
        grid.dealias_mask(policy.two_thirds_for(spec)),
        state0.position.fourier_values().into_owned(),
        state0.velocity.fourier_values().into_owned(),
        0.0,
        policy.step_for(spec),
    );
    let frame = state0.position.frame();
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        s.advance_to(t)?;
        let (u, p) = s.coefficients();
        samples.push(state_from_coefficients(&grid, frame, u, p, t));
    }
    Ok(Trajectory { samples })
}

fn rescaled(
    state0: &SecondOrderState,
    spec: &EquationSpec,
    times: &[f64],
    policy: &StepPolicy,
) -> Result<Trajectory<SecondOrderState>> {
    // On the grid stretched by 1/ε the sample at y_j = x_j/ε of 𝒮_ε f is
    // exactly ε f(x_j), so the change of frame needs no interpolation.
    let grid = *state0.position.grid();
    let eps = spec.epsilon;
    let wide = grid.stretched(1.0 / eps)?;
    let i = Complex64::i();
    let v0 = state0.position.physical_values();
    let v1 = state0.velocity.physical_values();
    let w0: Vec<Complex64> = v0.iter().map(|z| eps * z).collect();
    let w1: Vec<Complex64> = w0.iter().zip(v1.iter()).map(|(w, p)| i * w + eps.powi(3) * p).collect();
    let make = |vals| SpectralField::from_values(wide, vals, Representation::Physical, Frame::Rescaled);
    let s0 = SecondOrderState::new(make(w0)?, make(w1)?, 0.0)?;
    let taus: Vec<f64> = times.iter().map(|t| t / (eps * eps)).collect();
    let unit = EquationSpec::unit_kg(spec.lambda);
    let unit_policy = StepPolicy { scheme: Scheme::StrangTrig, ..*policy };
    let traj = solve_unit_kg(&s0, &unit, &taus, &unit_policy)?;

    let frame = state0.position.frame();
    let samples = traj
        .samples
        .iter()
        .zip(times)
        .map(|(s, &t)| {
            let tau = t / (eps * eps);
            let back = Complex64::from_polar(1.0, -tau);
            let w = s.position.physical_values();
            let wt = s.velocity.physical_values();
            let v: Vec<Complex64> = w.iter().map(|z| back * z / eps).collect();
            let vt: Vec<Complex64> =
                w.iter().zip(wt.iter()).map(|(z, zt)| back * (zt - i * z) / eps.powi(3)).collect();
            let field = |vals| {
                SpectralField::from_values(grid, vals, Representation::Physical, frame).expect("same sample count")
            };
            SecondOrderState { position: field(v), velocity: field(vt), time: t }
        })
        .collect();
    Ok(Trajectory { samples })
}
