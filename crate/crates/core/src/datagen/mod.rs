//! Initial data: smooth Gaussians, the chirped annulus, the rough Sobolev
//! profile, low-pass truncation, velocity presets, the defect functional and
//! the closed-form lens transform.

mod lens;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::compatible_v0;
use crate::spectral::{project_low, Frame, Representation, SpectralField, TorusGrid};

pub use lens::{lens_transform_exact, LensParams};

/// Fraction of `‖f‖²` outside the centred half box `[-L/4, L/4)^d`.
pub fn half_box_leak(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let half: Vec<f64> = grid.extents().iter().map(|l| 0.25 * l).collect();
    let outside = grid.map_points(|x| x.iter().zip(&half).any(|(a, h)| a.abs() >= *h));
    let vals = f.physical_values();
    let (mut tot, mut out) = (0.0, 0.0);
    for (z, o) in vals.iter().zip(outside) {
        let m = z.norm_sqr();
        tot += m;
        if o {
            out += m;
        }
    }
    if tot == 0.0 {
        0.0
    } else {
        out / tot
    }
}

/// Allowed fraction of mass beyond the box edge region for generated data.
const CLIP_GUARD: f64 = 1e-8;

fn clip_fraction(f: &SpectralField) -> f64 {
    // mass in the outermost 1/16 of the box on any axis
    let grid = f.grid();
    let edge: Vec<f64> = grid.extents().iter().map(|l| 0.5 * l * (1.0 - 1.0 / 8.0)).collect();
    let near = grid.map_points(|x| x.iter().zip(&edge).any(|(a, e)| a.abs() >= *e));
    let vals = f.physical_values();
    let tot: f64 = vals.iter().map(|z| z.norm_sqr()).sum();
    let out: f64 = vals.iter().zip(near).filter(|(_, n)| *n).map(|(z, _)| z.norm_sqr()).sum();
    if tot == 0.0 {
        0.0
    } else {
        out / tot
    }
}

/// `amplitude · exp(-|x - center|² / (2 width²))`, real.
pub fn gaussian(grid: &TorusGrid, amplitude: f64, width: f64, center: &[f64]) -> Result<SpectralField> {
    if !(width > 0.0) {
        return Err(Error::param(format!("gaussian width must be positive, got {width}")));
    }
    if !center.is_empty() && center.len() != grid.dim() {
        return Err(Error::param("gaussian center must have one entry per axis"));
    }
    let c = |a: usize| center.get(a).copied().unwrap_or(0.0);
    let f = SpectralField::from_fn(grid, Frame::Original, |x| {
        let r2: f64 = x.iter().enumerate().map(|(a, xa)| (xa - c(a)).powi(2)).sum();
        Complex64::new(amplitude * (-r2 / (2.0 * width * width)).exp(), 0.0)
    });
    let clip = clip_fraction(&f);
    if clip > CLIP_GUARD {
        return Err(Error::param(format!("gaussian clipped by the box: {clip:.3e} of the mass sits at the edge")));
    }
    Ok(f)
}

/// Quintic smoothstep on `[0, 1]`, C² at both ends.
fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Mollified indicator of `a0 <= r <= 2 a0`; each edge ramps over a band of
/// width `mollify · a0` centred on it. `mollify = 0` is the sharp indicator.
pub fn annulus_indicator(r: f64, a0: f64, mollify: f64) -> f64 {
    if mollify == 0.0 {
        return if (a0..=2.0 * a0).contains(&r) { 1.0 } else { 0.0 };
    }
    let w = mollify * a0;
    smoothstep((r - a0) / w + 0.5) * smoothstep((2.0 * a0 - r) / w + 0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChirpedData {
    /// `δ₀ e^{-ib₀|x|²/2} f`
    pub v0: SpectralField,
    /// The real profile `f = |x|⁻¹ χ_{a₀≤|x|≤2a₀}`.
    pub profile: SpectralField,
    pub warnings: Vec<String>,
}

/// Chirped annulus data.
pub fn chirped_annulus(grid: &TorusGrid, delta0: f64, a0: f64, b0: f64, mollify: f64) -> Result<ChirpedData> {
    if !(a0 > 0.0) || b0 < 0.0 || !(delta0 > 0.0) || !(0.0..1.0).contains(&mollify) {
        return Err(Error::param("chirped annulus needs a0 > 0, b0 >= 0, delta0 > 0 and mollify in [0, 1)"));
    }
    let half = grid.extents().iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
    let outer = 2.0 * a0 + 0.5 * mollify * a0;
    if outer >= half {
        return Err(Error::param(format!("annulus outer radius {outer} does not fit in the half box {half}")));
    }
    let mut warnings = Vec::new();
    if mollify == 0.0 {
        warnings.push("sharp annulus cutoff: expect Gibbs oscillations".to_string());
    }
    if !(delta0 < a0 && b0 * a0 < 1.0) {
        warnings.push(format!(
            "parameter ordering delta0 << a0 << 1/b0 not met (delta0 = {delta0}, a0 = {a0}, 1/b0 = {})",
            1.0 / b0
        ));
    }
    let profile = SpectralField::from_fn(grid, Frame::Modulated, |x| {
        let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let chi = annulus_indicator(r, a0, mollify);
        Complex64::new(if chi == 0.0 { 0.0 } else { chi / r }, 0.0)
    });
    let chirp = grid.map_points(|x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        Complex64::from_polar(delta0, -0.5 * b0 * r2)
    });
    let vals = chirp.iter().zip(profile.values()).map(|(c, f)| c * f).collect();
    let v0 = SpectralField::from_values(*grid, vals, Representation::Physical, Frame::Modulated)?;
    Ok(ChirpedData { v0, profile, warnings })
}

/// `‖-2 Re v₁ + (i/2)v₀³ - (i/4)conj(v₀)³‖_{L²}`.
pub fn defect_functional(v0: &SpectralField, v1: &SpectralField) -> Result<f64> {
    v0.check_compatible(v1)?;
    let i = Complex64::i();
    let a = v0.physical_values();
    let b = v1.physical_values();
    let s: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(v, w)| {
            let c = v.conj();
            (-2.0 * w.re + 0.5 * i * v * v * v - 0.25 * i * c * c * c).norm_sqr()
        })
        .sum();
    Ok((s * v0.grid().cell_volume()).sqrt())
}

/// Radial profile with `v̂₀(ξ) = δ₀ ⟨ξ⟩₂^{-α-d/2} / ln⟨ξ⟩₂`,
/// `⟨ξ⟩₂ = sqrt(|ξ|² + 2)`. Real and even.
pub fn rough_sobolev(grid: &TorusGrid, delta0: f64, alpha: f64) -> Result<SpectralField> {
    if !(1.0..=4.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must lie in [1, 4], got {alpha}")));
    }
    let d = grid.dim() as f64;
    let f = SpectralField::from_spectrum(grid, Frame::Modulated, |xi| {
        let b = (xi.iter().map(|k| k * k).sum::<f64>() + 2.0).sqrt();
        Complex64::new(delta0 * b.powf(-alpha - 0.5 * d) / b.ln(), 0.0)
    });
    let mut c = f.into_values();
    for (z, nyq) in c.iter_mut().zip(grid.nyquist_mask()) {
        if nyq {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    let f = SpectralField::from_values(*grid, c, Representation::Fourier, Frame::Modulated)?;
    Ok(f.into_physical().map_physical(|z| Complex64::new(z.re, 0.0)))
}

/// `P_{≤N} v₀` with `N = (ε²T)^{-1/4}`.
pub fn lowpass_data(v0: &SpectralField, epsilon: f64, horizon: f64) -> Result<SpectralField> {
    let x = epsilon * epsilon * horizon;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::param(format!("lowpass split needs 0 < eps^2 T <= 1, got {x}")));
    }
    let n = x.powf(-0.25);
    let grid = v0.grid();
    let dk = (0..grid.dim()).map(|a| grid.frequency_spacing(a)).fold(0.0, f64::max);
    if n < dk {
        return Err(Error::param(format!("cutoff N = {n} is below the lattice spacing {dk}")));
    }
    project_low(v0, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum V1Preset {
    #[default]
    Zero,
    /// `(i/2)(-Δv₀ + λ|v₀|²v₀)`, the NLS-aligned velocity.
    NlsAligned,
}

pub fn v1_preset(v0: &SpectralField, preset: V1Preset, lambda: f64) -> SpectralField {
    match preset {
        V1Preset::Zero => SpectralField::zeros(v0.grid(), v0.frame()),
        V1Preset::NlsAligned => {
            // -2 Re of this is the NLS remainder velocity; build it directly
            let grid = *v0.grid();
            let mut lap = v0.fourier_values().into_owned();
            for (c, k2) in lap.iter_mut().zip(grid.xi_squared()) {
                *c *= k2; // -Δ
            }
            let neg_lap = SpectralField::from_values(grid, lap, Representation::Fourier, v0.frame())
                .expect("same grid")
                .into_physical();
            let v = v0.physical_values();
            let half_i = Complex64::new(0.0, 0.5);
            let vals = neg_lap.values().iter().zip(v.iter()).map(|(l, z)| half_i * (l + lambda * z.norm_sqr() * z)).collect();
            SpectralField::from_values(grid, vals, Representation::Physical, v0.frame())
                .expect("same grid")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFamily {
    #[default]
    Gaussian,
    ChirpedAnnulus,
    RoughSobolev,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn quarter() -> f64 {
    0.25
}
fn two() -> f64 {
    2.0
}
fn tenth() -> f64 {
    0.1
}

/// Everything needed to build initial data for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    #[serde(default)]
    pub family: DataFamily,
    /// Amplitude (Gaussian amplitude, chirp amplitude or rough-profile scale).
    #[serde(default = "one")]
    pub delta0: f64,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub center: Vec<f64>,
    /// Gaussian family: `u₁ = velocity_ratio · u₀`.
    #[serde(default = "half")]
    pub velocity_ratio: f64,
    #[serde(default = "half")]
    pub a0: f64,
    #[serde(default = "quarter")]
    pub b0: f64,
    #[serde(default = "tenth")]
    pub mollify: f64,
    #[serde(default = "two")]
    pub alpha: f64,
    /// Smooth low-pass cutoff `N` applied to `v₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowpass: Option<f64>,
    #[serde(default)]
    pub v1: V1Preset,
}

impl DataSpec {
    pub fn new(family: DataFamily) -> Self {
        Self {
            family,
            delta0: 1.0,
            width: 1.0,
            center: Vec::new(),
            velocity_ratio: 0.5,
            a0: 0.5,
            b0: 0.25,
            mollify: 0.1,
            alpha: 2.0,
            lowpass: None,
            v1: V1Preset::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("data.{name} must be positive, got {v}")))
            }
        };
        pos(self.delta0, "delta0")?;
        pos(self.width, "width")?;
        pos(self.a0, "a0")?;
        if self.b0 < 0.0 {
            return Err(Error::Config("data.b0 must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.mollify) {
            return Err(Error::Config("data.mollify must lie in [0, 1)".into()));
        }
        if !(1.0..=4.0).contains(&self.alpha) {
            return Err(Error::Config("data.alpha must lie in [1, 4]".into()));
        }
        if let Some(n) = self.lowpass {
            pos(n, "lowpass")?;
        }
        Ok(())
    }

    /// Build `(u₀, u₁, v₀, v₁)` on `grid`; `lambda` is the profile
    /// coefficient used by velocity presets.
    pub fn build(&self, grid: &TorusGrid, lambda: f64) -> Result<InitialData> {
        let mut warnings = Vec::new();
        let mut profile = None;
        let mut v0 = match self.family {
            DataFamily::Gaussian => {
                let u0 = gaussian(grid, self.delta0, self.width, &self.center)?;
                let u1 = u0.scale(self.velocity_ratio.into());
                compatible_v0(&u0, &u1)?
            }
            DataFamily::ChirpedAnnulus => {
                let c = chirped_annulus(grid, self.delta0, self.a0, self.b0, self.mollify)?;
                warnings.extend(c.warnings);
                profile = Some(c.profile);
                c.v0
            }
            DataFamily::RoughSobolev => rough_sobolev(grid, self.delta0, self.alpha)?,
        };
        if let Some(n) = self.lowpass {
            v0 = project_low(&v0, n)?;
        }
        let v1 = v1_preset(&v0, self.v1, lambda);
        let u0 = v0.map_physical(|z| Complex64::new(2.0 * z.re, 0.0)).with_frame(Frame::Original);
        let u1 = v0.map_physical(|z| Complex64::new(-2.0 * z.im, 0.0)).with_frame(Frame::Original);
        let leak = half_box_leak(&v0);
        Ok(InitialData { u0, u1, v0, v1, profile, half_box_leak: leak, warnings })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0: SpectralField,
    pub u1: SpectralField,
    pub v0: SpectralField,
    pub v1: SpectralField,
    pub profile: Option<SpectralField>,
    pub half_box_leak: f64,
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests;
