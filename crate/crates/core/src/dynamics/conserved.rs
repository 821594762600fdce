use serde::{Deserialize, Serialize};

use super::{EquationKind, EquationSpec, FieldSnapshot, SecondOrderState};
use crate::spectral::{inner, l2_norm, lp_norm, sobolev_norm, SpectralField};

/// Conserved functionals of a state. Only the entries that apply to the
/// equation kind are set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservedReport {
    /// `‖w_t‖² + ‖∇w‖² + ‖w‖² + (λ/2)‖w‖⁴_{L⁴}`, with the ε weights
    /// `ε²`, `1`, `ε⁻²` for KG-ε.
    pub kg_energy: Option<f64>,
    /// `ε²‖v_t‖² + ‖∇v‖² + (λ/2)‖v‖⁴_{L⁴}`
    pub sw_energy: Option<f64>,
    /// `∫ ε² Im(v_t v̄) + |v|²`
    pub sw_mass: Option<f64>,
    pub nls_mass: Option<f64>,
}

impl ConservedReport {
    fn entries(&self) -> [Option<f64>; 4] {
        [self.kg_energy, self.sw_energy, self.sw_mass, self.nls_mass]
    }

    /// Largest relative drift over the entries set in both reports.
    pub fn drift_from(&self, initial: &ConservedReport) -> f64 {
        self.entries()
            .iter()
            .zip(initial.entries())
            .filter_map(|(q, q0)| Some(drift(q0?, (*q)?)))
            .fold(0.0, f64::max)
    }

    /// Energy-type drift (KG or SW energy).
    pub fn energy_drift_from(&self, initial: &ConservedReport) -> Option<f64> {
        let pick = |r: &ConservedReport| r.kg_energy.or(r.sw_energy);
        Some(drift(pick(initial)?, pick(self)?))
    }

    /// Mass-type drift (SW or NLS mass).
    pub fn mass_drift_from(&self, initial: &ConservedReport) -> Option<f64> {
        let pick = |r: &ConservedReport| r.sw_mass.or(r.nls_mass);
        Some(drift(pick(initial)?, pick(self)?))
    }
}

/// `|q - q0| / max(|q0|, 1e-30)`
pub fn drift(q0: f64, q: f64) -> f64 {
    (q - q0).abs() / q0.abs().max(1e-30)
}

pub enum StateRef<'a> {
    Second(&'a SecondOrderState),
    First(&'a FieldSnapshot),
}

impl<'a> From<&'a SecondOrderState> for StateRef<'a> {
    fn from(s: &'a SecondOrderState) -> Self {
        StateRef::Second(s)
    }
}

impl<'a> From<&'a FieldSnapshot> for StateRef<'a> {
    fn from(s: &'a FieldSnapshot) -> Self {
        StateRef::First(s)
    }
}

fn potential(f: &SpectralField, lambda: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        0.5 * lambda * lp_norm(f, 4.0).powi(4)
    }
}

fn grad2(f: &SpectralField) -> f64 {
    sobolev_norm(f, 1.0, true).powi(2)
}

pub fn conserved_quantities<'a>(state: impl Into<StateRef<'a>>, spec: &EquationSpec) -> ConservedReport {
    let mut r = ConservedReport::default();
    let (u, ut) = match state.into() {
        StateRef::Second(s) => (&s.position, Some(&s.velocity)),
        StateRef::First(s) => (&s.field, None),
    };
    let eps2 = spec.epsilon * spec.epsilon;
    match (spec.kind, ut) {
        (EquationKind::UnitKg, Some(ut)) => {
            r.kg_energy = Some(l2_norm(ut).powi(2) + grad2(u) + l2_norm(u).powi(2) + potential(u, spec.lambda));
        }
        (EquationKind::KgEps, Some(ut)) => {
            r.kg_energy =
                Some(eps2 * l2_norm(ut).powi(2) + grad2(u) + l2_norm(u).powi(2) / eps2 + potential(u, spec.lambda));
        }
        (EquationKind::SchrodingerWave, Some(ut)) => {
            r.sw_energy = Some(eps2 * l2_norm(ut).powi(2) + grad2(u) + potential(u, spec.lambda));
            // ∫ Im(v_t v̄) = Im ⟨v_t, v⟩ with ⟨f, g⟩ = ∫ f ḡ
            let cross = inner(ut, u).expect("state fields share a grid").im;
            r.sw_mass = Some(eps2 * cross + l2_norm(u).powi(2));
        }
        _ => r.nls_mass = Some(l2_norm(u).powi(2)),
    }
    r
}
