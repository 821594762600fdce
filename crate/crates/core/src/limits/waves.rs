use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{SecondOrderState, Trajectory};
use crate::error::Result;
use crate::spectral::{apply_multiplier, l2_norm, Frame, MultiplierSpec, SpectralField};

/// `W₁ = ⟨∇⟩⁻¹(w_t - i⟨∇⟩w)`, `W₂ = ⟨∇⟩⁻¹(w_t + i⟨∇⟩w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveDecomposition {
    pub w1: SpectralField,
    pub w2: SpectralField,
    pub frame: Frame,
}

pub fn wave_decompose(state: &SecondOrderState) -> Result<WaveDecomposition> {
    let a = apply_multiplier(&state.velocity, &MultiplierSpec::bracket_pow(-1.0))?;
    let i = Complex64::i();
    let w1 = a.lin_comb(1.0.into(), &state.position, -i)?;
    let w2 = a.lin_comb(1.0.into(), &state.position, i)?;
    Ok(WaveDecomposition { w1, w2, frame: state.position.frame() })
}

impl WaveDecomposition {
    /// `w = (i/2)(W₁ - W₂)`, `w_t = ½⟨∇⟩(W₁ + W₂)`.
    pub fn reconstruct(&self, time: f64) -> Result<SecondOrderState> {
        let half_i = Complex64::new(0.0, 0.5);
        let w = self.w1.lin_comb(half_i, &self.w2, -half_i)?;
        let sum = self.w1.lin_comb(0.5.into(), &self.w2, 0.5.into())?;
        let wt = apply_multiplier(&sum, &MultiplierSpec::bracket())?;
        SecondOrderState::new(w, wt, time)
    }
}

/// Half-wave norms along a unit-KG trajectory in the rescaled frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeftwardTrack {
    /// Original-frame times `t = ε²τ`.
    pub times: Vec<f64>,
    pub w1_raw: Vec<f64>,
    pub w2_raw: Vec<f64>,
    /// Raw norms times `ε^{d/2-1}`, i.e. measured after pulling back by
    /// `𝒮_ε⁻¹`. In d = 2 this is the raw norm.
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub max_w1: f64,
    pub max_w2: f64,
}

pub fn leftward_smallness_track(traj: &Trajectory<SecondOrderState>, epsilon: f64) -> Result<LeftwardTrack> {
    let mut tr = LeftwardTrack {
        times: Vec::new(),
        w1_raw: Vec::new(),
        w2_raw: Vec::new(),
        w1: Vec::new(),
        w2: Vec::new(),
        max_w1: 0.0,
        max_w2: 0.0,
    };
    for s in &traj.samples {
        let d = s.position.grid().dim() as f64;
        let norm = epsilon.powf(0.5 * d - 1.0);
        let wd = wave_decompose(s)?;
        let (a, b) = (l2_norm(&wd.w1), l2_norm(&wd.w2));
        tr.times.push(epsilon * epsilon * s.time);
        tr.w1_raw.push(a);
        tr.w2_raw.push(b);
        tr.w1.push(a * norm);
        tr.w2.push(b * norm);
        tr.max_w1 = tr.max_w1.max(a * norm);
        tr.max_w2 = tr.max_w2.max(b * norm);
    }
    Ok(tr)
}
