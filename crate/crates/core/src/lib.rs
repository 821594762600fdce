//! Spectral laboratory for the cubic Klein-Gordon equation in the
//! non-relativistic regime and its modulated-profile limit equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: periodic grids, fields, Fourier multipliers and norms.
//! - [`dynamics`]: split-step integrators for the four evolution equations
//!   and their conserved quantities.
//! - [`limits`]: the scaling `S_eps`, WKB reconstruction, remainders and the
//!   leftward/rightward wave decomposition.
//! - [`datagen`]: initial-data generators.
//! - [`experiments`]: parameter sweeps, rate fits and result emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod limits;
pub mod datagen;
pub mod dynamics;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
