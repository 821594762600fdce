use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::SecondOrderState;
use crate::error::{Error, Result};
use crate::spectral::{Frame, Representation, SpectralField, TorusGrid};

/// Relative mass allowed to fall outside the target lattice.
const MASS_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleDirection {
    /// `f ↦ ε f(ε·)`
    Forward,
    /// `g ↦ ε⁻¹ g(·/ε)`
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingOp {
    pub epsilon: f64,
    pub direction: ScaleDirection,
}

impl ScalingOp {
    pub fn forward(epsilon: f64) -> Self {
        Self { epsilon, direction: ScaleDirection::Forward }
    }

    pub fn inverse(epsilon: f64) -> Self {
        Self { epsilon, direction: ScaleDirection::Inverse }
    }

    /// Factor applied to lengths.
    fn stretch(&self) -> f64 {
        match self.direction {
            ScaleDirection::Forward => 1.0 / self.epsilon,
            ScaleDirection::Inverse => self.epsilon,
        }
    }

    fn amplitude(&self) -> f64 {
        match self.direction {
            ScaleDirection::Forward => self.epsilon,
            ScaleDirection::Inverse => 1.0 / self.epsilon,
        }
    }

    /// Time law `t ↦ t/ε²` for forward, `τ ↦ ε²τ` for inverse.
    pub fn time(&self, t: f64) -> f64 {
        t * self.stretch().powi(2)
    }
}

/// The box the scaled field lives on, with `points` per axis.
pub fn scaled_grid(grid: &TorusGrid, op: ScalingOp, points: &[usize]) -> Result<TorusGrid> {
    let ext: Vec<f64> = grid.extents().iter().map(|l| l * op.stretch()).collect();
    TorusGrid::new(grid.dim(), &ext, points)
}

/// `𝒮_ε f` (or its inverse) resampled onto `target` by zero padding or
/// truncation of the Fourier series. The target box must be the image of
/// the source box.
pub fn scale_field(f: &SpectralField, op: ScalingOp, target: &TorusGrid) -> Result<SpectralField> {
    if !(op.epsilon > 0.0 && op.epsilon <= 1.0) {
        return Err(Error::param(format!("scaling epsilon must lie in (0, 1], got {}", op.epsilon)));
    }
    let src = f.grid();
    if src.dim() != target.dim() {
        return Err(Error::GridMismatch);
    }
    for (a, (&l, &lt)) in src.extents().iter().zip(target.extents()).enumerate() {
        let want = l * op.stretch();
        if (lt - want).abs() > 1e-9 * want {
            return Err(Error::param(format!("target extent {lt} on axis {a} does not equal the scaled box {want}")));
        }
    }
    let coeffs = f.fourier_values();
    let ratio = target.len() as f64 / src.len() as f64;
    let amp = op.amplitude() * ratio;
    let strides = target.strides();
    let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
    let (mut total, mut lost) = (0.0, 0.0);
    for (flat, c) in coeffs.iter().enumerate() {
        let m = c.norm_sqr();
        total += m;
        let idx = src.unravel(flat);
        let mut dst = 0usize;
        let mut keep = true;
        for a in 0..src.dim() {
            let n = target.points(a) as i64;
            let s = src.signed_index(a, idx[a]);
            if src.is_nyquist(a, idx[a]) || 2 * s.abs() >= n {
                keep = false;
                break;
            }
            dst += s.rem_euclid(n) as usize * strides[a];
        }
        if keep {
            out[dst] = c * amp;
        } else {
            lost += m;
        }
    }
    if total > 0.0 && lost > MASS_GUARD * total {
        return Err(Error::param(format!(
            "scaling drops {:.3e} of the mass, above the guard {MASS_GUARD:e}",
            lost / total
        )));
    }
    let frame = match op.direction {
        ScaleDirection::Forward => Frame::Rescaled,
        ScaleDirection::Inverse => Frame::Modulated,
    };
    Ok(SpectralField::from_values(*target, out, Representation::Fourier, frame)?
        .into_representation(f.representation()))
}

/// `(v, v_t)` at time `t` to `(w, w_τ)` at `τ = t/ε²`, with
/// `w = e^{iτ}𝒮_ε v`, on the box stretched by `1/ε`.
pub fn to_rescaled_frame(state: &SecondOrderState, epsilon: f64) -> Result<SecondOrderState> {
    let op = ScalingOp::forward(epsilon);
    let grid = state.position.grid();
    let target = scaled_grid(grid, op, grid.shape())?;
    let tau = op.time(state.time);
    let e = Complex64::from_polar(1.0, tau);
    let big_v = scale_field(&state.position, op, &target)?;
    let big_vt = scale_field(&state.velocity, op, &target)?.scale((epsilon * epsilon).into());
    let w = big_v.scale(e);
    let wt = big_vt.lin_comb(e, &big_v, Complex64::i() * e)?;
    SecondOrderState::new(w, wt, tau)
}

/// Inverse of [`to_rescaled_frame`].
pub fn from_rescaled_frame(state: &SecondOrderState, epsilon: f64) -> Result<SecondOrderState> {
    let op = ScalingOp::inverse(epsilon);
    let grid = state.position.grid();
    let target = scaled_grid(grid, op, grid.shape())?;
    let back = Complex64::from_polar(1.0, -state.time);
    let big_v = state.position.scale(back);
    let big_vt = state.velocity.lin_comb(back, &big_v, -Complex64::i())?;
    let v = scale_field(&big_v, op, &target)?;
    let vt = scale_field(&big_vt, op, &target)?.scale((1.0 / (epsilon * epsilon)).into());
    SecondOrderState::new(v, vt, op.time(state.time))
}
