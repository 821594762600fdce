//! Periodic grids, spectral fields, Fourier multipliers and norms.

mod fft;
mod field;
mod grid;
mod multiplier;
mod norms;

pub use fft::FftPlan;
pub use field::{Frame, Representation, SpectralField};
pub use grid::{make_grid, TorusGrid};
pub use multiplier::{
    apply_multiplier, project_high, project_low, project_low_with, smooth_cutoff, sw_fast_branch,
    sw_slow_branch, CutoffMode, MultiplierSpec, Sign, Symbol,
};
pub use norms::{
    inner, l2_norm, l2_norm_from_coefficients, lp_norm, norms, sobolev_norm, sobolev_norm_from_coefficients,
    NormReport, NormRequest, SobolevNorm, SpacetimeNorm,
};
