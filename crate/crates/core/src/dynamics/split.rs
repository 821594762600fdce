//! Strang splitting for second-order semilinear systems
//! `(u, p)' = L(u, p) + (0, -c |u|² u)`.
//!
//! The linear part is propagated exactly, mode by mode, by a 2×2 complex
//! matrix; the cubic kick is exact because `u` is frozen while `p` moves.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{FftPlan, TorusGrid};

/// Exact linear flow of one Fourier mode over a time `h`.
pub(crate) trait LinearFlow: Send + Sync {
    /// Row-major `[[m00, m01], [m10, m11]]` acting on `(u, p)`.
    fn matrix(&self, mode: usize, h: f64) -> [Complex64; 4];
}

/// `u'' = -ω² u`.
pub(crate) struct Rotation {
    pub omega: Vec<f64>,
}

impl LinearFlow for Rotation {
    fn matrix(&self, mode: usize, h: f64) -> [Complex64; 4] {
        let w = self.omega[mode];
        let (s, c) = (w * h).sin_cos();
        let sinc = if w == 0.0 { h } else { s / w };
        [c.into(), sinc.into(), (-w * s).into(), c.into()]
    }
}

/// `ε² u'' + 2i u' + k² u = 0`, diagonalised into `e^{iω₊t}` and `e^{iω₋t}`.
pub(crate) struct Branches {
    pub slow: Vec<f64>,
    pub fast: Vec<f64>,
}

impl LinearFlow for Branches {
    fn matrix(&self, mode: usize, h: f64) -> [Complex64; 4] {
        let (wp, wm) = (self.slow[mode], self.fast[mode]);
        let gap = wp - wm;
        let ep = Complex64::from_polar(1.0, wp * h);
        let em = Complex64::from_polar(1.0, wm * h);
        let i = Complex64::i();
        let diff = (ep - em) / (i * gap);
        [
            (wp * em - wm * ep) / gap,
            diff,
            wp * wm * diff,
            (wp * ep - wm * em) / gap,
        ]
    }
}

struct MatrixCache {
    h: f64,
    mats: Vec<[Complex64; 4]>,
}

pub(crate) struct SecondOrderSplitter<L: LinearFlow> {
    grid: TorusGrid,
    plan: FftPlan,
    flow: L,
    coupling: f64,
    mask: Vec<bool>,
    u: Vec<Complex64>,
    p: Vec<Complex64>,
    time: f64,
    h: f64,
    caches: Vec<MatrixCache>,
    scratch: Vec<Complex64>,
}

impl<L: LinearFlow> SecondOrderSplitter<L> {
    /// `u`, `p` are raw Fourier coefficients.
    pub fn new(
        grid: TorusGrid,
        flow: L,
        coupling: f64,
        mask: Vec<bool>,
        u: Vec<Complex64>,
        p: Vec<Complex64>,
        time: f64,
        h: f64,
    ) -> Self {
        let n = grid.len();
        Self {
            plan: FftPlan::new(&grid),
            grid,
            flow,
            coupling,
            mask,
            u,
            p,
            time,
            h,
            caches: Vec::new(),
            scratch: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn coefficients(&self) -> (&[Complex64], &[Complex64]) {
        (&self.u, &self.p)
    }

    fn half_matrices(&mut self, h: f64) -> usize {
        let half = 0.5 * h;
        if let Some(i) = self.caches.iter().position(|c| c.h == half) {
            return i;
        }
        let mats = (0..self.grid.len()).map(|m| self.flow.matrix(m, half)).collect();
        if self.caches.len() >= 3 {
            self.caches.remove(0);
        }
        self.caches.push(MatrixCache { h: half, mats });
        self.caches.len() - 1
    }

    fn rotate(&mut self, cache: usize) {
        let mats = &self.caches[cache].mats;
        for ((u, p), m) in self.u.iter_mut().zip(self.p.iter_mut()).zip(mats) {
            let (a, b) = (*u, *p);
            *u = m[0] * a + m[1] * b;
            *p = m[2] * a + m[3] * b;
        }
    }

    fn kick(&mut self, h: f64) -> Result<()> {
        if self.coupling == 0.0 {
            return Ok(());
        }
        self.scratch.copy_from_slice(&self.u);
        self.plan.inverse(&mut self.scratch);
        let mut finite = true;
        for z in self.scratch.iter_mut() {
            let a = z.norm_sqr();
            finite &= a.is_finite();
            *z *= a;
        }
        if !finite {
            return Err(Error::BlowUp { what: "solution".into(), time: self.time });
        }
        self.plan.forward(&mut self.scratch);
        let c = h * self.coupling;
        for ((p, n), keep) in self.p.iter_mut().zip(&self.scratch).zip(&self.mask) {
            if *keep {
                *p -= c * n;
            }
        }
        Ok(())
    }

    /// One Strang step of signed length `h`.
    pub fn step(&mut self, h: f64) -> Result<()> {
        let cache = self.half_matrices(h);
        self.rotate(cache);
        self.kick(h)?;
        self.rotate(cache);
        self.time += h;
        Ok(())
    }

    /// Step with the nominal step size up to `t`, shortening the last step.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let span = t - self.time;
        if span < 0.0 {
            return Err(Error::param(format!("cannot integrate backwards from {} to {t}", self.time)));
        }
        let h = self.h;
        let full = (span / h * (1.0 + 1e-12)).floor() as u64;
        let start = self.time;
        for k in 0..full {
            self.step(h)?;
            self.time = start + (k + 1) as f64 * h;
        }
        let rest = t - self.time;
        if rest > 1e-12 * h {
            self.step(rest)?;
        }
        self.time = t;
        if self.u.iter().chain(&self.p).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::BlowUp { what: "solution".into(), time: t });
        }
        Ok(())
    }
}

/// Validate and sort output times relative to a start time.
pub(crate) fn check_times(t0: f64, times: &[f64]) -> Result<()> {
    let mut prev = t0;
    for &t in times {
        if !t.is_finite() || t < prev {
            return Err(Error::param("output times must be finite, non-decreasing and >= the start time"));
        }
        prev = t;
    }
    Ok(())
}
