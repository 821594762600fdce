//! Tensor-product FFT over a [`TorusGrid`].
//!
//! Forward transforms are unnormalized; the inverse divides by the total
//! number of points so that `inverse(forward(f)) == f`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Planned transforms for one grid. Cheap to clone.
#[derive(Clone)]
pub struct FftPlan {
    grid: TorusGrid,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("grid", &self.grid).finish()
    }
}

impl FftPlan {
    pub fn new(grid: &TorusGrid) -> Self {
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            let fw = grid.shape().iter().map(|&n| p.plan_fft_forward(n)).collect();
            let inv = grid.shape().iter().map(|&n| p.plan_fft_inverse(n)).collect();
            (fw, inv)
        });
        Self { grid: *grid, forward, inverse }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.grid.len(), "buffer does not match grid");
        let dim = self.grid.dim();
        let strides = self.grid.strides();
        for axis in 0..dim {
            let n = self.grid.points(axis);
            if axis == dim - 1 {
                plans[axis].process(data);
                continue;
            }
            // Gather every line along `axis` into a contiguous buffer,
            // transform them in one batch and scatter back.
            let stride = strides[axis];
            let lines = data.len() / n;
            let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
            let outer = data.len() / (n * stride);
            let mut line = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    let dst = &mut buf[line * n..(line + 1) * n];
                    for (k, d) in dst.iter_mut().enumerate() {
                        *d = data[base + k * stride];
                    }
                    line += 1;
                }
            }
            debug_assert_eq!(line, lines);
            plans[axis].process(&mut buf);
            let mut line = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    let src = &buf[line * n..(line + 1) * n];
                    for (k, s) in src.iter().enumerate() {
                        data[base + k * stride] = *s;
                    }
                    line += 1;
                }
            }
        }
    }
}
