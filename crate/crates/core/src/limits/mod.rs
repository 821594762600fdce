//! Scaling, WKB reconstruction, remainders, half-wave decomposition and
//! resonance diagnostics.

mod scaling;
mod waves;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{FieldSnapshot, SecondOrderState, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{
    apply_multiplier, l2_norm, sobolev_norm, Frame, MultiplierSpec, Representation, Sign, SpectralField, Symbol,
};

pub use scaling::{from_rescaled_frame, scale_field, scaled_grid, to_rescaled_frame, ScaleDirection, ScalingOp};
pub use waves::{leftward_smallness_track, wave_decompose, LeftwardTrack, WaveDecomposition};

/// `v0 = (u0 - i u1) / 2`.
pub fn compatible_v0(u0: &SpectralField, u1: &SpectralField) -> Result<SpectralField> {
    Ok(u0.lin_comb(Complex64::new(0.5, 0.0), u1, Complex64::new(0.0, -0.5))?.with_frame(Frame::Modulated))
}

/// `e^{it/ε²} v + e^{-it/ε²} conj(v)`.
pub fn wkb_reconstruct(v: &SpectralField, t: f64, epsilon: f64) -> SpectralField {
    let phase = Complex64::from_polar(1.0, t / (epsilon * epsilon));
    let vals: Vec<Complex64> =
        v.physical_values().iter().map(|z| Complex64::new(2.0 * (phase * z).re, 0.0)).collect();
    SpectralField::from_values(*v.grid(), vals, Representation::Physical, Frame::Original)
        .expect("same sample count")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// KG-ε against the WKB reconstruction of the Schrödinger-wave profile.
    KgVsSw,
    /// KG-ε against the WKB reconstruction of the NLS profile.
    KgVsNls,
    /// Schrödinger-wave profile against NLS, no reconstruction.
    SwVsNls,
}

impl Pairing {
    pub fn reconstructs(self) -> bool {
        !matches!(self, Pairing::SwVsNls)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderRecord {
    pub time: f64,
    pub l2_error: f64,
    /// `(γ, ‖·‖_{H^γ})`
    pub sobolev: Vec<(f64, f64)>,
    pub pairing: Pairing,
}

/// A trajectory that can hand out the primary field at a sample time.
pub trait Sampled {
    fn field_at(&self, t: f64) -> Option<&SpectralField>;
}

impl Sampled for Trajectory<SecondOrderState> {
    fn field_at(&self, t: f64) -> Option<&SpectralField> {
        self.at(t).map(|s| &s.position)
    }
}

impl Sampled for Trajectory<FieldSnapshot> {
    fn field_at(&self, t: f64) -> Option<&SpectralField> {
        self.at(t).map(|s| &s.field)
    }
}

/// Difference field at `t`: `u - wkb(v)` for reconstructing pairings and
/// `u - v` otherwise.
pub fn remainder_field(u: &SpectralField, v: &SpectralField, t: f64, epsilon: f64, pairing: Pairing) -> Result<SpectralField> {
    if pairing.reconstructs() {
        u.sub(&wkb_reconstruct(v, t, epsilon))
    } else {
        u.sub(v)
    }
}

pub fn remainder(
    u_traj: &impl Sampled,
    v_traj: &impl Sampled,
    t: f64,
    epsilon: f64,
    pairing: Pairing,
    gammas: &[f64],
) -> Result<RemainderRecord> {
    let missing = || Error::param(format!("time {t} is not sampled in both trajectories"));
    let u = u_traj.field_at(t).ok_or_else(missing)?;
    let v = v_traj.field_at(t).ok_or_else(missing)?;
    let r = remainder_field(u, v, t, epsilon, pairing)?;
    Ok(RemainderRecord {
        time: t,
        l2_error: l2_norm(&r),
        sobolev: gammas.iter().map(|&g| (g, sobolev_norm(&r, g, false))).collect(),
        pairing,
    })
}

/// `-2 Re ∂_t v(0)` for the NLS profile, with `∂_t v(0) = (Δv0 - λ|v0|²v0)/(2i)`,
/// which equals `-Im(Δv0 - λ|v0|²v0)`.
pub fn nls_remainder_initial_velocity(v0: &SpectralField, lambda: f64) -> SpectralField {
    let grid = *v0.grid();
    let mut lap = v0.fourier_values().into_owned();
    for (c, k2) in lap.iter_mut().zip(grid.xi_squared()) {
        *c *= -k2;
    }
    let lap = SpectralField::from_values(grid, lap, Representation::Fourier, v0.frame())
        .expect("same grid")
        .into_physical();
    let v = v0.physical_values();
    let vals = lap
        .values()
        .iter()
        .zip(v.iter())
        .map(|(l, z)| Complex64::new(-(l - lambda * z.norm_sqr() * z).im, 0.0))
        .collect();
    SpectralField::from_values(grid, vals, Representation::Physical, v0.frame()).expect("same grid")
}

/// Non-resonant boundary term
/// `(⟨∇⟩-3)⁻¹⟨∇⟩⁻¹P_{≤1}(h³) + (⟨∇⟩+3)⁻¹⟨∇⟩⁻¹P_{≤1}(conj(h)³)`.
pub fn resonance_boundary_term(h: &SpectralField) -> Result<SpectralField> {
    let cube = h.map_physical(|z| z * z * z);
    let conj_cube = h.map_physical(|z| {
        let c = z.conj();
        c * c * c
    });
    let base = MultiplierSpec::lowpass(1.0).then(Symbol::Bracket { power: -1.0 });
    let minus = apply_multiplier(&cube, &base.clone().then(Symbol::ResonanceDenominator { sign: Sign::Minus }))?;
    let plus = apply_multiplier(&conj_cube, &base.then(Symbol::ResonanceDenominator { sign: Sign::Plus }))?;
    minus.add(&plus)
}

/// `max_t` of a remainder series.
pub fn sup_error(records: &[RemainderRecord]) -> f64 {
    records.iter().map(|r| r.l2_error).fold(0.0, f64::max)
}
