use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::FftPlan;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    Physical,
    Fourier,
}

/// Which variable the samples hold: the Klein-Gordon field `u`, the
/// rescaled complex field `w = e^{it} S_eps v`, or a modulated profile `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Original,
    Rescaled,
    Modulated,
}

/// Complex samples of a function on a periodic grid.
///
/// In the Fourier representation the values are raw (unnormalized) DFT
/// coefficients in FFT order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: TorusGrid,
    values: Vec<Complex64>,
    repr: Representation,
    frame: Frame,
}

impl SpectralField {
    pub fn from_values(
        grid: TorusGrid,
        values: Vec<Complex64>,
        repr: Representation,
        frame: Frame,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values, repr, frame })
    }

    pub fn zeros(grid: &TorusGrid, frame: Frame) -> Self {
        Self {
            grid: *grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            repr: Representation::Physical,
            frame,
        }
    }

    /// Sample a function of position.
    pub fn from_fn(grid: &TorusGrid, frame: Frame, f: impl FnMut(&[f64]) -> Complex64) -> Self {
        Self {
            grid: *grid,
            values: grid.map_points(f),
            repr: Representation::Physical,
            frame,
        }
    }

    /// Build from a function of frequency, interpreted as the continuum
    /// Fourier transform `∫ e^{-ix·ξ} f(x) dx` of a function centred at the
    /// origin.
    pub fn from_spectrum(
        grid: &TorusGrid,
        frame: Frame,
        mut fhat: impl FnMut(&[f64]) -> Complex64,
    ) -> Self {
        // Raw DFT of samples ≈ continuum transform / cell volume, up to the
        // phase from the box origin sitting at -L/2.
        let dv = grid.cell_volume();
        let shift: Vec<f64> = grid.extents().iter().map(|l| -0.5 * l).collect();
        let values = grid.map_frequencies(|xi| {
            let phase: f64 = xi.iter().zip(&shift).map(|(k, x0)| k * x0).sum();
            fhat(xi) * Complex64::from_polar(1.0 / dv, phase)
        });
        Self { grid: *grid, values, repr: Representation::Fourier, frame }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    /// Raw samples in whatever representation the field currently holds.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn to_physical(&self) -> SpectralField {
        self.clone().into_physical()
    }

    pub fn to_fourier(&self) -> SpectralField {
        self.clone().into_fourier()
    }

    pub fn into_physical(mut self) -> SpectralField {
        if self.repr == Representation::Fourier {
            FftPlan::new(&self.grid).inverse(&mut self.values);
            self.repr = Representation::Physical;
        }
        self
    }

    pub fn into_fourier(mut self) -> SpectralField {
        if self.repr == Representation::Physical {
            FftPlan::new(&self.grid).forward(&mut self.values);
            self.repr = Representation::Fourier;
        }
        self
    }

    pub fn into_representation(self, repr: Representation) -> SpectralField {
        match repr {
            Representation::Physical => self.into_physical(),
            Representation::Fourier => self.into_fourier(),
        }
    }

    /// Physical samples (converting if necessary).
    pub fn physical_values(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.repr {
            Representation::Physical => std::borrow::Cow::Borrowed(&self.values),
            Representation::Fourier => std::borrow::Cow::Owned(self.to_physical().values),
        }
    }

    /// Fourier coefficients (converting if necessary).
    pub fn fourier_values(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.repr {
            Representation::Fourier => std::borrow::Cow::Borrowed(&self.values),
            Representation::Physical => std::borrow::Cow::Owned(self.to_fourier().values),
        }
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        self.grid.check_same(&other.grid)
    }

    /// Pointwise combination in physical space: `a·self + b·other`.
    pub fn lin_comb(&self, a: Complex64, other: &SpectralField, b: Complex64) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let x = self.physical_values();
        let y = other.physical_values();
        let values = x.iter().zip(y.iter()).map(|(p, q)| a * p + b * q).collect();
        Ok(SpectralField {
            grid: self.grid,
            values,
            repr: Representation::Physical,
            frame: self.frame,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> SpectralField {
        let mut out = self.clone();
        for z in out.values.iter_mut() {
            *z *= s;
        }
        out
    }

    /// Apply a pointwise map in physical space.
    pub fn map_physical(&self, f: impl Fn(Complex64) -> Complex64) -> SpectralField {
        let values = self.physical_values().iter().map(|&z| f(z)).collect();
        SpectralField {
            grid: self.grid,
            values,
            repr: Representation::Physical,
            frame: self.frame,
        }
    }

    pub fn conj(&self) -> SpectralField {
        self.map_physical(|z| z.conj())
    }

    pub fn has_non_finite(&self) -> bool {
        self.values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
    }
}
