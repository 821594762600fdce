use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Representation, SpectralField, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensParams {
    pub b: f64,
    pub t: f64,
}

impl LensParams {
    pub fn dilation(&self) -> f64 {
        1.0 + self.b * self.t
    }

    /// `t_b = t / (1 + bt)`
    pub fn t_b(&self) -> f64 {
        self.t / self.dilation()
    }
}

/// Closed form of `e^{-(i/2)tΔ}(e^{-ib|x|²/2} f)`:
///
/// `(1+bt)^{-d/2} e^{-ib|x|²/(2(1+bt))} [e^{-(i/2)t_b Δ} f](x/(1+bt))`.
///
/// The inner free flow is spectral; the dilated evaluation uses the
/// trigonometric interpolant of the grid samples, one axis at a time.
pub fn lens_transform_exact(f: &SpectralField, params: LensParams) -> Result<SpectralField> {
    let s = params.dilation();
    if !(s > 0.0) {
        return Err(Error::param(format!("lens transform needs 1 + bt > 0, got {s}")));
    }
    let grid = *f.grid();
    let tb = params.t_b();
    let mut g = f.fourier_values().into_owned();
    for (c, k2) in g.iter_mut().zip(grid.xi_squared()) {
        *c *= Complex64::from_polar(1.0, 0.5 * tb * k2);
    }
    if s < 1.0 {
        // x/s leaves the box; only allowed when g has no mass out there
        let gf = SpectralField::from_values(grid, g.clone(), Representation::Fourier, f.frame())?.into_physical();
        let lim: Vec<f64> = grid.extents().iter().map(|l| 0.5 * l * s).collect();
        let outside = grid.map_points(|x| x.iter().zip(&lim).any(|(a, m)| a.abs() >= *m));
        let vals = gf.values();
        let tot: f64 = vals.iter().map(|z| z.norm_sqr()).sum();
        let out: f64 = vals.iter().zip(outside).filter(|(_, o)| *o).map(|(z, _)| z.norm_sqr()).sum();
        if tot > 0.0 && out > 1e-8 * tot {
            return Err(Error::param("dilated evaluation points leave the box"));
        }
    }
    let mut vals = g;
    for axis in 0..grid.dim() {
        vals = interpolate_axis(&grid, &vals, axis, 1.0 / s);
    }
    let amp = s.powf(-0.5 * grid.dim() as f64);
    let phase = grid.map_points(|x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        Complex64::from_polar(amp, -0.5 * params.b * r2 / s)
    });
    for (z, p) in vals.iter_mut().zip(phase) {
        *z *= p;
    }
    SpectralField::from_values(grid, vals, Representation::Physical, f.frame())
}

/// Replace the Fourier coefficients along `axis` by samples of the
/// interpolant at `factor · x_j`. Axes already processed hold physical
/// values; the transform along one axis commutes with the others.
fn interpolate_axis(grid: &TorusGrid, data: &[Complex64], axis: usize, factor: f64) -> Vec<Complex64> {
    let n = grid.points(axis);
    let l = grid.extent(axis);
    let xs = grid.coords(axis);
    let ks = grid.wavenumbers(axis);
    // E[j][k] = e^{iξ_k (factor·x_j + L/2)} / n, Nyquist column dropped
    let mat: Vec<Complex64> = xs
        .iter()
        .flat_map(|x| {
            let y = factor * x + 0.5 * l;
            ks.iter()
                .enumerate()
                .map(move |(k, xi)| {
                    if grid.is_nyquist(axis, k) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::from_polar(1.0 / n as f64, xi * y)
                    }
                })
        })
        .collect();
    let stride = grid.strides()[axis];
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for base in 0..data.len() {
        if (base / stride) % n != 0 {
            continue;
        }
        for (k, c) in line.iter_mut().enumerate() {
            *c = data[base + k * stride];
        }
        for j in 0..n {
            let row = &mat[j * n..(j + 1) * n];
            out[base + j * stride] = row.iter().zip(&line).map(|(e, c)| e * c).sum();
        }
    }
    out
}
