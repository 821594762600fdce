//! Classical RK4 on the semi-discrete Fourier system. Test-only in spirit:
//! slow, but shares nothing with the splitting code beyond the FFT.

use num_complex::Complex64;

use super::split::check_times;
use super::{EquationKind, EquationSpec, FieldSnapshot, SecondOrderState, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{FftPlan, Representation, SpectralField, TorusGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleState {
    Second(SecondOrderState),
    First(FieldSnapshot),
}

const MAX_POINTS: usize = 32;

struct System {
    kind: EquationKind,
    eps2: f64,
    lambda: f64,
    k2: Vec<f64>,
    mask: Vec<bool>,
    plan: FftPlan,
}

impl System {
    fn new(grid: &TorusGrid, spec: &EquationSpec, two_thirds: bool) -> Self {
        Self {
            kind: spec.kind,
            eps2: spec.epsilon * spec.epsilon,
            lambda: spec.lambda,
            k2: grid.xi_squared(),
            mask: grid.dealias_mask(two_thirds),
            plan: FftPlan::new(grid),
        }
    }

    fn max_frequency(&self) -> f64 {
        let k2 = self.k2.iter().cloned().fold(0.0, f64::max);
        match self.kind {
            EquationKind::UnitKg => (1.0 + k2).sqrt(),
            EquationKind::KgEps => (1.0 + self.eps2 * k2).sqrt() / self.eps2,
            EquationKind::SchrodingerWave => (1.0 + (1.0 + self.eps2 * k2).sqrt()) / self.eps2,
            EquationKind::Nls => 0.5 * k2,
        }
    }

    /// Masked Fourier coefficients of `|u|²u`.
    fn cubic(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut x = u.to_vec();
        self.plan.inverse(&mut x);
        for z in x.iter_mut() {
            *z *= z.norm_sqr();
        }
        self.plan.forward(&mut x);
        for (z, keep) in x.iter_mut().zip(&self.mask) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        x
    }

    /// Right-hand side on the stacked state `[u, u_t]` (or `[v]` for NLS).
    fn rhs(&self, y: &[Complex64]) -> Vec<Complex64> {
        let n = self.k2.len();
        let i = Complex64::i();
        let u = &y[..n];
        let nl = if self.lambda == 0.0 { vec![Complex64::new(0.0, 0.0); n] } else { self.cubic(u) };
        if self.kind == EquationKind::Nls {
            return (0..n).map(|m| 0.5 * i * (self.k2[m] * u[m] + self.lambda * nl[m])).collect();
        }
        let p = &y[n..];
        let mut out = Vec::with_capacity(2 * n);
        out.extend_from_slice(p);
        for m in 0..n {
            let acc = match self.kind {
                EquationKind::UnitKg => -(1.0 + self.k2[m]) * u[m] - self.lambda * nl[m],
                EquationKind::KgEps => {
                    (-(1.0 / self.eps2 + self.k2[m]) * u[m] - self.lambda * nl[m]) / self.eps2
                }
                _ => (-2.0 * i * p[m] - self.k2[m] * u[m] - self.lambda * nl[m]) / self.eps2,
            };
            out.push(acc);
        }
        out
    }

    fn rk4(&self, y: &mut [Complex64], h: f64) {
        let axpy = |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, k)| x + s * k).collect()
        };
        let k1 = self.rhs(y);
        let k2 = self.rhs(&axpy(y, &k1, 0.5 * h));
        let k3 = self.rhs(&axpy(y, &k2, 0.5 * h));
        let k4 = self.rhs(&axpy(y, &k3, h));
        for (m, z) in y.iter_mut().enumerate() {
            *z += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        }
    }
}

fn run(
    grid: &TorusGrid,
    spec: &EquationSpec,
    mut y: Vec<Complex64>,
    t0: f64,
    times: &[f64],
    h: f64,
    two_thirds: bool,
) -> Result<Vec<(f64, Vec<Complex64>)>> {
    spec.validate()?;
    check_times(t0, times)?;
    if grid.shape().iter().any(|&n| n > MAX_POINTS) {
        return Err(Error::param(format!("oracle grids are limited to {MAX_POINTS} points per axis")));
    }
    let sys = System::new(grid, spec, two_thirds);
    if !(h > 0.0) || h * sys.max_frequency() > 0.1 {
        return Err(Error::param(format!(
            "oracle step {h} too large: h * max frequency = {} > 0.1",
            h * sys.max_frequency()
        )));
    }
    let mut t = t0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let steps = ((target - t) / h).ceil() as u64;
        if steps > 0 {
            let dt = (target - t) / steps as f64;
            for _ in 0..steps {
                sys.rk4(&mut y, dt);
            }
        }
        t = target;
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::BlowUp { what: "oracle solution".into(), time: t });
        }
        out.push((t, y.clone()));
    }
    Ok(out)
}

fn field(grid: &TorusGrid, c: &[Complex64], frame: crate::spectral::Frame) -> SpectralField {
    SpectralField::from_values(*grid, c.to_vec(), Representation::Fourier, frame)
        .expect("buffer matches grid")
        .into_physical()
}

/// Fine-step RK4 reference solution. Steps are uniform between consecutive
/// output times with size at most `h`.
pub fn rk4_oracle(
    spec: &EquationSpec,
    state0: OracleState,
    times: &[f64],
    h: f64,
    two_thirds: bool,
) -> Result<Vec<OracleState>> {
    match state0 {
        OracleState::Second(s) => {
            if spec.kind == EquationKind::Nls {
                return Err(Error::param("NLS is first order"));
            }
            Ok(rk4_second_order(&s, spec, times, h, two_thirds)?.samples.into_iter().map(OracleState::Second).collect())
        }
        OracleState::First(s) => {
            if spec.kind != EquationKind::Nls {
                return Err(Error::param("second-order equation needs a velocity"));
            }
            Ok(rk4_nls(&s.field, spec, times, h, two_thirds)?.samples.into_iter().map(OracleState::First).collect())
        }
    }
}

pub(crate) fn rk4_second_order(
    s: &SecondOrderState,
    spec: &EquationSpec,
    times: &[f64],
    h: f64,
    two_thirds: bool,
) -> Result<Trajectory<SecondOrderState>> {
    let grid = *s.position.grid();
    let mut y = s.position.fourier_values().into_owned();
    y.extend_from_slice(&s.velocity.fourier_values());
    let n = grid.len();
    let frame = s.position.frame();
    let samples = run(&grid, spec, y, s.time, times, h, two_thirds)?
        .into_iter()
        .map(|(t, y)| SecondOrderState {
            position: field(&grid, &y[..n], frame),
            velocity: field(&grid, &y[n..], frame),
            time: t,
        })
        .collect();
    Ok(Trajectory { samples })
}

pub(crate) fn rk4_nls(
    v0: &SpectralField,
    spec: &EquationSpec,
    times: &[f64],
    h: f64,
    two_thirds: bool,
) -> Result<Trajectory<FieldSnapshot>> {
    let grid = *v0.grid();
    let samples = run(&grid, spec, v0.fourier_values().into_owned(), 0.0, times, h, two_thirds)?
        .into_iter()
        .map(|(t, y)| FieldSnapshot { field: field(&grid, &y, v0.frame()), time: t })
        .collect();
    Ok(Trajectory { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{l2_norm, make_grid, Frame};
    use std::f64::consts::PI;

    #[test]
    fn linear_mode_closed_form() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let k = 2.0;
        let w0 = SpectralField::from_fn(&g, Frame::Rescaled, |x| Complex64::new((k * x[0]).cos(), 0.0));
        let s0 = SecondOrderState::new(w0, SpectralField::zeros(&g, Frame::Rescaled), 0.0).unwrap();
        let out = rk4_oracle(&EquationSpec::unit_kg(0.0), OracleState::Second(s0), &[1.0], 1e-4, false).unwrap();
        let OracleState::Second(s) = &out[0] else { panic!() };
        let om = (1.0 + k * k).sqrt();
        let exact = SpectralField::from_fn(&g, Frame::Rescaled, |x| Complex64::new(om.cos() * (k * x[0]).cos(), 0.0));
        assert!(l2_norm(&s.position.sub(&exact).unwrap()) < 1e-10);
    }

    #[test]
    fn nls_constant_phase() {
        let g = make_grid(1, 2.0 * PI, 8).unwrap();
        let c = Complex64::new(0.5, 0.0);
        let v0 = SpectralField::from_fn(&g, Frame::Modulated, |_| c);
        let out = rk4_oracle(
            &EquationSpec::nls(3.0),
            OracleState::First(FieldSnapshot { field: v0.clone(), time: 0.0 }),
            &[1.0],
            1e-3,
            true,
        )
        .unwrap();
        let OracleState::First(s) = &out[0] else { panic!() };
        let exact = v0.scale(Complex64::from_polar(1.0, 1.5 * 0.25));
        assert!(l2_norm(&s.field.sub(&exact).unwrap()) < 1e-11);
    }

    #[test]
    fn rejects_large_steps_and_grids() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let z = SpectralField::zeros(&g, Frame::Rescaled);
        let s0 = SecondOrderState::new(z.clone(), z, 0.0).unwrap();
        assert!(rk4_oracle(&EquationSpec::unit_kg(1.0), OracleState::Second(s0), &[1.0], 0.1, true).is_err());
        let big = make_grid(1, 2.0 * PI, 64).unwrap();
        let z = SpectralField::zeros(&big, Frame::Rescaled);
        let s0 = SecondOrderState::new(z.clone(), z, 0.0).unwrap();
        assert!(rk4_oracle(&EquationSpec::unit_kg(1.0), OracleState::Second(s0), &[1.0], 1e-3, true).is_err());
    }
}
