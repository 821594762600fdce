use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `[-L/2, L/2)^d` sampled on a uniform tensor grid.
///
/// Values are stored row-major with the last axis contiguous. Frequencies
/// follow the usual FFT ordering: index `k < n/2` maps to `k`, the rest to
/// `k - n`, so the Nyquist index carries the negative frequency `-n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    extent: [f64; 3],
    points: [usize; 3],
}

impl TorusGrid {
    pub fn new(dim: usize, extent: &[f64], points: &[usize]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Grid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if extent.len() != dim || points.len() != dim {
            return Err(Error::Grid(format!(
                "expected {dim} extents and point counts, got {} and {}",
                extent.len(),
                points.len()
            )));
        }
        let mut e = [1.0; 3];
        let mut p = [1usize; 3];
        for axis in 0..dim {
            let (l, n) = (extent[axis], points[axis]);
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Grid(format!("extent must be positive, got {l}")));
            }
            if !n.is_power_of_two() {
                return Err(Error::Grid(format!("points not power of two: {n}")));
            }
            if n < 8 {
                return Err(Error::Grid(format!("need at least 8 points per axis, got {n}")));
            }
            e[axis] = l;
            p[axis] = n;
        }
        Ok(Self { dim, extent: e, points: p })
    }

    /// Same extent and point count on every axis.
    pub fn cube(dim: usize, extent: f64, points: usize) -> Result<Self> {
        Self::new(dim, &vec![extent; dim], &vec![points; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.extent[axis]
    }

    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    pub fn extents(&self) -> &[f64] {
        &self.extent[..self.dim]
    }

    pub fn shape(&self) -> &[usize] {
        &self.points[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.extents().iter().product()
    }

    /// Fundamental frequency `2π/L` along an axis.
    pub fn frequency_spacing(&self, axis: usize) -> f64 {
        2.0 * PI / self.extent[axis]
    }

    /// Row-major strides.
    pub fn strides(&self) -> [usize; 3] {
        let mut s = [1usize; 3];
        for a in (0..self.dim.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.points[a + 1];
        }
        s
    }

    /// Signed integer frequency index along an axis for FFT position `k`.
    pub fn signed_index(&self, axis: usize, k: usize) -> i64 {
        let n = self.points[axis];
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    pub fn is_nyquist(&self, axis: usize, k: usize) -> bool {
        k == self.points[axis] / 2
    }

    /// Physical coordinates along one axis.
    pub fn coords(&self, axis: usize) -> Vec<f64> {
        let (l, n) = (self.extent[axis], self.points[axis]);
        let dx = l / n as f64;
        (0..n).map(|j| -0.5 * l + j as f64 * dx).collect()
    }

    /// Angular frequencies along one axis in FFT order.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let dk = self.frequency_spacing(axis);
        (0..self.points[axis])
            .map(|k| dk * self.signed_index(axis, k) as f64)
            .collect()
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.points[a];
            flat /= self.points[a];
        }
        idx
    }

    /// Evaluate `f(x)` at every grid point (flat row-major order).
    pub fn map_points<T>(&self, mut f: impl FnMut(&[f64]) -> T) -> Vec<T> {
        let coords: Vec<Vec<f64>> = (0..self.dim).map(|a| self.coords(a)).collect();
        let mut x = [0.0; 3];
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                for a in 0..self.dim {
                    x[a] = coords[a][idx[a]];
                }
                f(&x[..self.dim])
            })
            .collect()
    }

    /// Evaluate `f(ξ)` at every lattice frequency (flat FFT order).
    pub fn map_frequencies<T>(&self, mut f: impl FnMut(&[f64]) -> T) -> Vec<T> {
        let ks: Vec<Vec<f64>> = (0..self.dim).map(|a| self.wavenumbers(a)).collect();
        let mut xi = [0.0; 3];
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                for a in 0..self.dim {
                    xi[a] = ks[a][idx[a]];
                }
                f(&xi[..self.dim])
            })
            .collect()
    }

    /// `|ξ|²` on the lattice.
    pub fn xi_squared(&self) -> Vec<f64> {
        self.map_frequencies(|xi| xi.iter().map(|k| k * k).sum())
    }

    /// True for lattice points that carry a Nyquist index on any axis.
    pub fn nyquist_mask(&self) -> Vec<bool> {
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                (0..self.dim).any(|a| self.is_nyquist(a, idx[a]))
            })
            .collect()
    }

    /// Keep-mask for the nonlinear term: Nyquist always dropped, and with
    /// `two_thirds` every mode with `|k_a| > n_a/3` on some axis as well.
    pub fn dealias_mask(&self, two_thirds: bool) -> Vec<bool> {
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                (0..self.dim).all(|a| {
                    if self.is_nyquist(a, idx[a]) {
                        return false;
                    }
                    !two_thirds
                        || 3 * self.signed_index(a, idx[a]).unsigned_abs() as usize
                            <= self.points[a]
                })
            })
            .collect()
    }

    /// Grid with every extent multiplied by `factor` and the same points.
    pub fn stretched(&self, factor: f64) -> Result<Self> {
        let ext: Vec<f64> = self.extents().iter().map(|l| l * factor).collect();
        Self::new(self.dim, &ext, self.shape())
    }

    pub(crate) fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Build a grid with the same extent and point count on every axis.
pub fn make_grid(dim: usize, extent: f64, points: usize) -> Result<TorusGrid> {
    TorusGrid::cube(dim, extent, points)
}
