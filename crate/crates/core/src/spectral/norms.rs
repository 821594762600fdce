//! Quadrature and Fourier-side norms.
//!
//! Physical-side norms use cell-volume-weighted sums. Sobolev norms are
//! evaluated on the Fourier side, where with raw DFT coefficients `c_k`
//! Parseval reads `‖f‖² = (V/N²) Σ |c_k|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormRequest {
    pub sobolev: Vec<f64>,
    pub lp: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorm {
    pub gamma: f64,
    /// `‖|∇|^γ f‖_{L²}`
    pub homogeneous: f64,
    /// `‖⟨∇⟩^γ f‖_{L²}`
    pub inhomogeneous: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub sobolev: Vec<SobolevNorm>,
    pub lp: Vec<(f64, f64)>,
}

pub fn l2_norm(f: &SpectralField) -> f64 {
    let dv = f.grid().cell_volume();
    let s: f64 = f.physical_values().iter().map(|z| z.norm_sqr()).sum();
    (dv * s).sqrt()
}

/// L² norm computed from raw DFT coefficients.
pub fn l2_norm_from_coefficients(grid: &TorusGrid, coeffs: &[Complex64]) -> f64 {
    let n = grid.len() as f64;
    let s: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    (grid.volume() * s).sqrt() / n
}

/// `‖f‖_{L^p}`; `p = ∞` gives the max norm.
pub fn lp_norm(f: &SpectralField, p: f64) -> f64 {
    let vals = f.physical_values();
    if p.is_infinite() {
        return vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let dv = f.grid().cell_volume();
    let s: f64 = vals.iter().map(|z| z.norm().powf(p)).sum();
    (dv * s).powf(1.0 / p)
}

/// Sobolev norm; `homogeneous` selects `|ξ|^γ` over `⟨ξ⟩^γ`. For the
/// homogeneous norm the zero mode has weight 1 at `γ = 0` and 0 otherwise.
pub fn sobolev_norm(f: &SpectralField, gamma: f64, homogeneous: bool) -> f64 {
    let coeffs = f.fourier_values();
    sobolev_norm_from_coefficients(f.grid(), &coeffs, gamma, homogeneous)
}

pub fn sobolev_norm_from_coefficients(grid: &TorusGrid, coeffs: &[Complex64], gamma: f64, homogeneous: bool) -> f64 {
    let xi2 = grid.xi_squared();
    let n = grid.len() as f64;
    let s: f64 = coeffs
        .iter()
        .zip(&xi2)
        .map(|(c, &k2)| {
            let w = if homogeneous {
                if k2 == 0.0 {
                    if gamma == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    k2.powf(gamma)
                }
            } else {
                (1.0 + k2).powf(gamma)
            };
            w * c.norm_sqr()
        })
        .sum();
    (grid.volume() * s).sqrt() / n
}

/// `⟨f, g⟩ = ∫ f conj(g)`.
pub fn inner(f: &SpectralField, g: &SpectralField) -> Result<Complex64> {
    f.check_compatible(g)?;
    let dv = f.grid().cell_volume();
    let (a, b) = (f.physical_values(), g.physical_values());
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * dv)
}

pub fn norms(f: &SpectralField, request: &NormRequest) -> Result<NormReport> {
    for &p in &request.lp {
        if !(p >= 1.0) {
            return Err(Error::param(format!("L^p exponent must lie in [1, inf], got {p}")));
        }
    }
    for &g in &request.sobolev {
        if !(-2.0..=6.0).contains(&g) {
            return Err(Error::param(format!("Sobolev index must lie in [-2, 6], got {g}")));
        }
    }
    if f.has_non_finite() {
        return Err(Error::BlowUp { what: "norm input".into(), time: f64::NAN });
    }
    let coeffs = f.fourier_values();
    let sobolev = request
        .sobolev
        .iter()
        .map(|&gamma| SobolevNorm {
            gamma,
            homogeneous: sobolev_norm_from_coefficients(f.grid(), &coeffs, gamma, true),
            inhomogeneous: sobolev_norm_from_coefficients(f.grid(), &coeffs, gamma, false),
        })
        .collect();
    let lp = request.lp.iter().map(|&p| (p, lp_norm(f, p))).collect();
    Ok(NormReport { l2: l2_norm(f), sobolev, lp })
}

/// Running `L^q_t L^r_x` norm over time slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeNorm {
    pub q: f64,
    pub r: f64,
    acc: f64,
}

impl SpacetimeNorm {
    pub fn new(q: f64, r: f64) -> Self {
        Self { q, r, acc: 0.0 }
    }

    /// The diagonal Strichartz pair `L^{2(d+2)/d}_{t,x}`.
    pub fn strichartz_diagonal(dim: usize) -> Self {
        let p = 2.0 * (dim as f64 + 2.0) / dim as f64;
        Self::new(p, p)
    }

    /// Add a slice of duration `width`.
    pub fn add_slice(&mut self, f: &SpectralField, width: f64) {
        let n = lp_norm(f, self.r);
        if self.q.is_infinite() {
            self.acc = self.acc.max(n);
        } else {
            self.acc += width * n.powf(self.q);
        }
    }

    pub fn value(&self) -> f64 {
        if self.q.is_infinite() {
            self.acc
        } else {
            self.acc.powf(1.0 / self.q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::Frame;
    use crate::spectral::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn constant_on_square() {
        let g = make_grid(2, 16.0, 32).unwrap();
        let f = SpectralField::from_fn(&g, Frame::Original, |_| Complex64::new(1.0, 0.0));
        assert!((l2_norm(&f) - 16.0).abs() < 1e-12);
        let r = norms(&f, &NormRequest { sobolev: vec![0.0, 2.0], lp: vec![4.0, f64::INFINITY] }).unwrap();
        assert!((r.sobolev[0].homogeneous - 16.0).abs() < 1e-12);
        assert!((r.sobolev[0].inhomogeneous - 16.0).abs() < 1e-12);
        assert!(r.sobolev[1].homogeneous.abs() < 1e-12);
        assert!((r.lp[0].1 - 256f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(r.lp[1].1, 1.0);
    }

    #[test]
    fn single_mode_homogeneous_h1_equals_l2() {
        let g = make_grid(1, 2.0 * PI, 32).unwrap();
        let f = SpectralField::from_fn(&g, Frame::Original, |x| Complex64::from_polar(1.0, x[0]));
        assert!((sobolev_norm(&f, 1.0, true) - l2_norm(&f)).abs() < 1e-12);
        assert!((sobolev_norm(&f, 1.0, false) - 2f64.sqrt() * l2_norm(&f)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_l2_against_analytic_integral() {
        // ∫ e^{-2x²} dx = sqrt(π/2)
        let g = make_grid(1, 30.0, 256).unwrap();
        let f = SpectralField::from_fn(&g, Frame::Original, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let exact = (PI / 2.0).powf(0.25);
        assert!((exact - 1.119_515_134_920_9).abs() < 1e-12);
        assert!((l2_norm(&f) - exact).abs() < 1e-12);
    }

    #[test]
    fn nan_input_reported() {
        let g = make_grid(1, 1.0, 8).unwrap();
        let f = SpectralField::from_fn(&g, Frame::Original, |_| Complex64::new(f64::NAN, 0.0));
        assert!(norms(&f, &NormRequest::default()).is_err());
    }

    #[test]
    fn bad_request_rejected() {
        let g = make_grid(1, 1.0, 8).unwrap();
        let f = SpectralField::zeros(&g, Frame::Original);
        assert!(norms(&f, &NormRequest { sobolev: vec![7.0], lp: vec![] }).is_err());
        assert!(norms(&f, &NormRequest { sobolev: vec![], lp: vec![0.5] }).is_err());
    }

    #[test]
    fn single_slice_spacetime_norm() {
        let g = make_grid(2, 4.0, 16).unwrap();
        let f = SpectralField::from_fn(&g, Frame::Original, |x| Complex64::new((-x[0] * x[0] - x[1] * x[1]).exp(), 0.0));
        let mut acc = SpacetimeNorm::strichartz_diagonal(2);
        assert_eq!(acc.q, 4.0);
        acc.add_slice(&f, 0.01);
        let expect = 0.01f64.powf(0.25) * lp_norm(&f, 4.0);
        assert!((acc.value() - expect).abs() < 1e-14);
    }
}
