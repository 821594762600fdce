use num_complex::Complex64;

use super::split::{check_times, Rotation, SecondOrderSplitter};
use super::{oracle, EquationKind, EquationSpec, Scheme, SecondOrderState, StepPolicy, Trajectory};
use crate::error::Result;
use crate::spectral::{Frame, Representation, SpectralField, TorusGrid};

pub(crate) fn kg_splitter(
    state0: &SecondOrderState,
    omega: Vec<f64>,
    coupling: f64,
    two_thirds: bool,
    h: f64,
) -> SecondOrderSplitter<Rotation> {
    let grid = *state0.position.grid();
    SecondOrderSplitter::new(
        grid,
        Rotation { omega },
        coupling,
        grid.dealias_mask(two_thirds),
        state0.position.fourier_values().into_owned(),
        state0.velocity.fourier_values().into_owned(),
        state0.time,
        h,
    )
}

pub(crate) fn state_from_coefficients(
    grid: &TorusGrid,
    frame: Frame,
    u: &[Complex64],
    p: &[Complex64],
    time: f64,
) -> SecondOrderState {
    let make = |c: &[Complex64]| {
        SpectralField::from_values(*grid, c.to_vec(), Representation::Fourier, frame)
            .expect("coefficient buffer matches grid")
            .into_physical()
    };
    SecondOrderState { position: make(u), velocity: make(p), time }
}

fn run_rotation(
    state0: &SecondOrderState,
    omega: Vec<f64>,
    coupling: f64,
    two_thirds: bool,
    h: f64,
    times: &[f64],
) -> Result<Trajectory<SecondOrderState>> {
    check_times(state0.time, times)?;
    let frame = state0.position.frame();
    let grid = *state0.position.grid();
    let mut s = kg_splitter(state0, omega, coupling, two_thirds, h);
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        s.advance_to(t)?;
        let (u, p) = s.coefficients();
        samples.push(state_from_coefficients(&grid, frame, u, p, t));
    }
    Ok(Trajectory { samples })
}

/// Unit-mass Klein-Gordon `w_tt - Δw + w = -λ|w|²w` (complex `w` allowed).
pub fn solve_unit_kg(
    state0: &SecondOrderState,
    spec: &EquationSpec,
    times: &[f64],
    policy: &StepPolicy,
) -> Result<Trajectory<SecondOrderState>> {
    spec.expect(EquationKind::UnitKg)?;
    policy.validate(spec)?;
    SecondOrderState::new(state0.position.clone(), state0.velocity.clone(), state0.time)?;
    if policy.scheme == Scheme::Rk4Oracle {
        return oracle::rk4_second_order(state0, spec, times, policy.h0, policy.two_thirds_for(spec));
    }
    let omega = state0.position.grid().xi_squared().into_iter().map(|k2| (1.0 + k2).sqrt()).collect();
    run_rotation(state0, omega, spec.lambda, policy.two_thirds_for(spec), policy.step_for(spec), times)
}

/// `ε²u_tt - Δu + ε⁻²u = -λ|u|²u` with `u(0) = u0`, `u_t(0) = u1/ε²`.
pub fn solve_kg_eps(
    u0: &SpectralField,
    u1: &SpectralField,
    spec: &EquationSpec,
    times: &[f64],
    policy: &StepPolicy,
) -> Result<Trajectory<SecondOrderState>> {
    spec.expect(EquationKind::KgEps)?;
    policy.validate(spec)?;
    let eps2 = spec.epsilon * spec.epsilon;
    let velocity = u1.scale(Complex64::new(1.0 / eps2, 0.0)).with_frame(u0.frame());
    let state0 = SecondOrderState::new(u0.clone(), velocity, 0.0)?;
    if policy.scheme == Scheme::Rk4Oracle {
        return oracle::rk4_second_order(&state0, spec, times, policy.h0, policy.two_thirds_for(spec));
    }
    let omega = u0
        .grid()
        .xi_squared()
        .into_iter()
        .map(|k2| (1.0 + eps2 * k2).sqrt() / eps2)
        .collect();
    run_rotation(&state0, omega, spec.lambda / eps2, policy.two_thirds_for(spec), policy.step_for(spec), times)
}
