//! Time integration of the four evolution equations.
//!
//! | kind | equation |
//! |------|----------|
//! | unit KG | `w_tt - Δw + w = -λ|w|²w` |
//! | KG-ε | `ε²u_tt - Δu + ε⁻²u = -λ|u|²u` |
//! | Schrödinger-wave | `ε²v_tt + 2i v_t - Δv = -λ|v|²v` |
//! | NLS | `2i v_t - Δv = -λ|v|²v` |
//!
//! Linear parts are propagated exactly in Fourier space; the cubic term is
//! applied as an exact kick between two linear half steps.

mod conserved;
mod kg;
mod nls;
mod oracle;
mod split;
mod sw;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub use conserved::{conserved_quantities, drift, ConservedReport, StateRef};
pub use kg::{solve_kg_eps, solve_unit_kg};
pub use nls::{solve_nls, NlsIntegrator};
pub use oracle::{rk4_oracle, OracleState};
pub use sw::solve_schrodinger_wave;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationKind {
    UnitKg,
    KgEps,
    SchrodingerWave,
    Nls,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub kind: EquationKind,
    /// Unused for unit KG and NLS.
    pub epsilon: f64,
    /// Cubic coefficient; the nonlinearity enters as `-λ|u|²u`.
    pub lambda: f64,
}

impl EquationSpec {
    pub fn unit_kg(lambda: f64) -> Self {
        Self { kind: EquationKind::UnitKg, epsilon: 1.0, lambda }
    }

    pub fn kg_eps(epsilon: f64, lambda: f64) -> Self {
        Self { kind: EquationKind::KgEps, epsilon, lambda }
    }

    pub fn schrodinger_wave(epsilon: f64, lambda: f64) -> Self {
        Self { kind: EquationKind::SchrodingerWave, epsilon, lambda }
    }

    pub fn nls(lambda: f64) -> Self {
        Self { kind: EquationKind::Nls, epsilon: 1.0, lambda }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::param(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        if !(self.lambda == 0.0 || (1.0..=3.0).contains(&self.lambda)) {
            return Err(Error::param(format!("lambda must be 0 or lie in [1, 3], got {}", self.lambda)));
        }
        Ok(())
    }

    fn expect(&self, kind: EquationKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::param(format!("expected a {kind:?} equation, got {:?}", self.kind)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    StrangTrig,
    RescaledFrame,
    Rk4Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub scheme: Scheme,
    /// Base step. KG-ε and Schrödinger-wave use `h0·ε²`, the rest `h0`.
    pub h0: f64,
    /// 2/3-rule truncation of the nonlinear term. `None` means on whenever
    /// `λ > 0`. The Nyquist mode is dropped regardless.
    pub two_thirds: Option<bool>,
}

impl StepPolicy {
    pub fn strang(h0: f64) -> Self {
        Self { scheme: Scheme::StrangTrig, h0, two_thirds: None }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_two_thirds(mut self, on: bool) -> Self {
        self.two_thirds = Some(on);
        self
    }

    pub fn step_for(&self, spec: &EquationSpec) -> f64 {
        match spec.kind {
            EquationKind::KgEps | EquationKind::SchrodingerWave => self.h0 * spec.epsilon * spec.epsilon,
            EquationKind::UnitKg | EquationKind::Nls => self.h0,
        }
    }

    pub(crate) fn two_thirds_for(&self, spec: &EquationSpec) -> bool {
        self.two_thirds.unwrap_or(spec.lambda > 0.0)
    }

    fn validate(&self, spec: &EquationSpec) -> Result<()> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::param(format!("step h0 must be positive, got {}", self.h0)));
        }
        let stiff = matches!(spec.kind, EquationKind::KgEps | EquationKind::SchrodingerWave);
        if stiff && self.scheme == Scheme::StrangTrig && self.step_for(spec) > 0.5 * spec.epsilon * spec.epsilon {
            return Err(Error::param(format!(
                "step {} exceeds eps^2/2 = {}: modulation unresolved",
                self.step_for(spec),
                0.5 * spec.epsilon * spec.epsilon
            )));
        }
        Ok(())
    }
}

/// `(position, ∂_t position)` at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderState {
    pub position: SpectralField,
    pub velocity: SpectralField,
    pub time: f64,
}

impl SecondOrderState {
    pub fn new(position: SpectralField, velocity: SpectralField, time: f64) -> Result<Self> {
        position.check_compatible(&velocity)?;
        if position.frame() != velocity.frame() {
            return Err(Error::param("position and velocity frames differ"));
        }
        Ok(Self { position, velocity, time })
    }
}

/// A first-order state (NLS).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub field: SpectralField,
    pub time: f64,
}

/// Samples of a solution at the requested output times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub samples: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> Option<&S> {
        self.samples.last()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub trait Timed {
    fn time(&self) -> f64;
}

impl Timed for SecondOrderState {
    fn time(&self) -> f64 {
        self.time
    }
}

impl Timed for FieldSnapshot {
    fn time(&self) -> f64 {
        self.time
    }
}

impl<S: Timed> Trajectory<S> {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(Timed::time).collect()
    }

    /// Sample at exactly time `t`, if recorded.
    pub fn at(&self, t: f64) -> Option<&S> {
        self.samples.iter().find(|s| (s.time() - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}
