//! Benchmarks live in `benches/`; run them with `cargo bench -p kgnr-bench`.

use kgnr_core::datagen::gaussian;
use kgnr_core::spectral::{make_grid, Frame, SpectralField};

/// Unit Gaussian on a cube of side 32 with `points` per axis.
pub fn bench_field(dim: usize, points: usize) -> SpectralField {
    let g = make_grid(dim, 32.0, points).expect("valid grid");
    gaussian(&g, 0.5, 1.0, &[]).expect("gaussian fits the box").with_frame(Frame::Rescaled)
}
