use num_complex::Complex64;

use super::split::check_times;
use super::{oracle, EquationKind, EquationSpec, FieldSnapshot, Scheme, StepPolicy, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{FftPlan, Representation, SpectralField, TorusGrid};

/// Strang integrator for `2i v_t - Δv = -λ|v|²v`.
pub struct NlsIntegrator {
    grid: TorusGrid,
    plan: FftPlan,
    k2: Vec<f64>,
    mask: Vec<bool>,
    lambda: f64,
    /// Physical samples.
    v: Vec<Complex64>,
    time: f64,
    h: f64,
    phase: Option<(f64, Vec<Complex64>)>,
}

impl NlsIntegrator {
    pub fn new(v0: &SpectralField, lambda: f64, h: f64, two_thirds: bool) -> Self {
        let grid = *v0.grid();
        Self {
            plan: FftPlan::new(&grid),
            k2: grid.xi_squared(),
            mask: grid.dealias_mask(two_thirds),
            grid,
            lambda,
            v: v0.physical_values().into_owned(),
            time: 0.0,
            h,
            phase: None,
        }
    }

    fn linear_half(&mut self, h: f64) {
        let half = 0.5 * h;
        if self.phase.as_ref().map(|(s, _)| *s) != Some(half) {
            let ph = self.k2.iter().map(|k| Complex64::from_polar(1.0, 0.5 * k * half)).collect();
            self.phase = Some((half, ph));
        }
        let ph = &self.phase.as_ref().expect("set above").1;
        self.plan.forward(&mut self.v);
        for (z, p) in self.v.iter_mut().zip(ph) {
            *z *= p;
        }
        self.plan.inverse(&mut self.v);
    }

    fn nonlinear(&mut self, h: f64) -> Result<()> {
        if self.lambda == 0.0 {
            return Ok(());
        }
        let c = 0.5 * self.lambda * h;
        for z in self.v.iter_mut() {
            let a = z.norm_sqr();
            if !a.is_finite() {
                return Err(Error::BlowUp { what: "nls solution".into(), time: self.time });
            }
            *z *= Complex64::from_polar(1.0, c * a);
        }
        self.plan.forward(&mut self.v);
        for (z, keep) in self.v.iter_mut().zip(&self.mask) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        self.plan.inverse(&mut self.v);
        Ok(())
    }

    pub fn step(&mut self, h: f64) -> Result<()> {
        self.linear_half(h);
        self.nonlinear(h)?;
        self.linear_half(h);
        self.time += h;
        Ok(())
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let span = t - self.time;
        if span < 0.0 {
            return Err(Error::param("cannot integrate backwards"));
        }
        let h = self.h;
        let full = (span / h * (1.0 + 1e-12)).floor() as u64;
        let start = self.time;
        for k in 0..full {
            self.step(h)?;
            self.time = start + (k + 1) as f64 * h;
        }
        let rest = t - self.time;
        if rest > 1e-12 * h {
            self.step(rest)?;
        }
        self.time = t;
        if self.v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::BlowUp { what: "nls solution".into(), time: t });
        }
        Ok(())
    }

    pub fn snapshot(&self, frame: crate::spectral::Frame) -> FieldSnapshot {
        let field = SpectralField::from_values(self.grid, self.v.clone(), Representation::Physical, frame)
            .expect("buffer matches grid");
        FieldSnapshot { field, time: self.time }
    }
}

/// `2i v_t - Δv = -λ|v|²v`: linear phase `e^{i|ξ|²h/2}` around the exact
/// rotation `v ↦ v e^{i(λ/2)|v|²h}`.
pub fn solve_nls(
    v0: &SpectralField,
    spec: &EquationSpec,
    times: &[f64],
    policy: &StepPolicy,
) -> Result<Trajectory<FieldSnapshot>> {
    spec.expect(EquationKind::Nls)?;
    policy.validate(spec)?;
    check_times(0.0, times)?;
    if policy.scheme == Scheme::Rk4Oracle {
        return oracle::rk4_nls(v0, spec, times, policy.h0, policy.two_thirds_for(spec));
    }
    let mut s = NlsIntegrator::new(v0, spec.lambda, policy.step_for(spec), policy.two_thirds_for(spec));
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        s.advance_to(t)?;
        samples.push(s.snapshot(v0.frame()));
    }
    Ok(Trajectory { samples })
}
