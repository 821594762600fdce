//! Fourier multipliers and frequency projectors.

use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffMode {
    /// C² smoothstep: 1 on `|ξ| <= N/2`, 0 on `|ξ| >= N`.
    Smooth,
    /// Indicator of `|ξ| <= N`.
    Sharp,
}

/// One real Fourier symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Symbol {
    /// `⟨ξ⟩^power` with `⟨ξ⟩ = sqrt(1 + |ξ|²)`.
    Bracket { power: f64 },
    /// `|ξ|^gamma`; the zero mode gets 1 when `gamma == 0` and 0 otherwise.
    FracLaplacian { gamma: f64 },
    /// `ε⁻² sqrt(1 + ε²|ξ|²)`.
    KgOmega { epsilon: f64 },
    /// `(-1 ± sqrt(1 + ε²|ξ|²)) / ε²`.
    SwBranch { epsilon: f64, sign: Sign },
    /// `|ξ|² / 2`.
    SchrodingerPhase,
    /// `1 / (⟨ξ⟩ ± 3)`.
    ResonanceDenominator { sign: Sign },
    /// `χ(ξ/N)`.
    Lowpass { cutoff: f64, mode: CutoffMode },
    /// `1 - χ(ξ/N)`.
    Highpass { cutoff: f64, mode: CutoffMode },
}

/// Radial cutoff profile: 1 for `r <= 1/2`, 0 for `r >= 1`.
pub fn smooth_cutoff(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let s = 2.0 * r - 1.0;
        1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    }
}

fn cutoff(mode: CutoffMode, r: f64) -> f64 {
    match mode {
        CutoffMode::Smooth => smooth_cutoff(r),
        CutoffMode::Sharp => {
            if r <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// `(-1 + sqrt(1 + ε²k²)) / ε²` without cancellation.
pub fn sw_slow_branch(epsilon: f64, k2: f64) -> f64 {
    k2 / (1.0 + (1.0 + epsilon * epsilon * k2).sqrt())
}

pub fn sw_fast_branch(epsilon: f64, k2: f64) -> f64 {
    -(1.0 + (1.0 + epsilon * epsilon * k2).sqrt()) / (epsilon * epsilon)
}

impl Symbol {
    pub fn eval(&self, xi2: f64) -> f64 {
        let k = xi2.sqrt();
        match *self {
            Symbol::Bracket { power } => (1.0 + xi2).powf(0.5 * power),
            Symbol::FracLaplacian { gamma } => {
                if xi2 == 0.0 {
                    if gamma == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    xi2.powf(0.5 * gamma)
                }
            }
            Symbol::KgOmega { epsilon } => (1.0 + epsilon * epsilon * xi2).sqrt() / (epsilon * epsilon),
            Symbol::SwBranch { epsilon, sign: Sign::Plus } => sw_slow_branch(epsilon, xi2),
            Symbol::SwBranch { epsilon, sign: Sign::Minus } => sw_fast_branch(epsilon, xi2),
            Symbol::SchrodingerPhase => 0.5 * xi2,
            Symbol::ResonanceDenominator { sign } => 1.0 / ((1.0 + xi2).sqrt() + 3.0 * sign.as_f64()),
            Symbol::Lowpass { cutoff: n, mode } => cutoff(mode, k / n),
            Symbol::Highpass { cutoff: n, mode } => 1.0 - cutoff(mode, k / n),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::param(what.to_string()));
        match *self {
            Symbol::KgOmega { epsilon } | Symbol::SwBranch { epsilon, .. } => {
                if !(epsilon > 0.0 && epsilon <= 1.0) {
                    return bad("epsilon must lie in (0, 1]");
                }
            }
            Symbol::Lowpass { cutoff, .. } | Symbol::Highpass { cutoff, .. } => {
                if !(cutoff > 0.0 && cutoff.is_finite()) {
                    return bad("cutoff N must be positive");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A product of symbols applied in one pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    factors: Vec<Symbol>,
}

// ⟨ξ⟩ = 3 at |ξ| = sqrt(8).
const RESONANT_RADIUS: f64 = 2.828_427_124_746_19;

impl MultiplierSpec {
    pub fn new(symbol: Symbol) -> Self {
        Self { factors: vec![symbol] }
    }

    pub fn bracket() -> Self {
        Self::new(Symbol::Bracket { power: 1.0 })
    }

    pub fn bracket_pow(power: f64) -> Self {
        Self::new(Symbol::Bracket { power })
    }

    pub fn lowpass(cutoff: f64) -> Self {
        Self::new(Symbol::Lowpass { cutoff, mode: CutoffMode::Smooth })
    }

    /// Compose with another symbol (pointwise product).
    pub fn then(mut self, symbol: Symbol) -> Self {
        self.factors.push(symbol);
        self
    }

    pub fn factors(&self) -> &[Symbol] {
        &self.factors
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.factors {
            s.validate()?;
        }
        let needs_lowpass = self
            .factors
            .iter()
            .any(|s| matches!(s, Symbol::ResonanceDenominator { sign: Sign::Minus }));
        if needs_lowpass {
            let safe = self.factors.iter().any(|s| match *s {
                Symbol::Lowpass { cutoff, mode: CutoffMode::Smooth } => cutoff <= RESONANT_RADIUS,
                Symbol::Lowpass { cutoff, mode: CutoffMode::Sharp } => cutoff < RESONANT_RADIUS,
                _ => false,
            });
            if !safe {
                return Err(Error::param(
                    "resonance denominator 1/(<xi>-3) requires a composed low-pass P_{<=N} \
                     with support inside |xi| < sqrt(8)",
                ));
            }
        }
        Ok(())
    }

    /// Symbol value at `|ξ|²`. Factors that vanish short-circuit, so a
    /// singular denominator outside the low-pass support is never evaluated.
    pub fn eval(&self, xi2: f64) -> f64 {
        let mut acc = 1.0;
        // Cut-offs first so the resonant denominator is skipped off-support.
        for s in self.factors.iter().filter(|s| matches!(s, Symbol::Lowpass { .. } | Symbol::Highpass { .. })) {
            acc *= s.eval(xi2);
        }
        if acc == 0.0 {
            return 0.0;
        }
        for s in self.factors.iter().filter(|s| !matches!(s, Symbol::Lowpass { .. } | Symbol::Highpass { .. })) {
            acc *= s.eval(xi2);
        }
        acc
    }

    /// Symbol sampled on the lattice in FFT order.
    pub fn on_grid(&self, grid: &TorusGrid) -> Vec<f64> {
        grid.xi_squared().into_iter().map(|k2| self.eval(k2)).collect()
    }
}

/// Multiply the Fourier coefficients of `f` by the symbol of `m`. The output
/// keeps the representation of the input.
pub fn apply_multiplier(f: &SpectralField, m: &MultiplierSpec) -> Result<SpectralField> {
    m.validate()?;
    let repr = f.representation();
    let symbol = m.on_grid(f.grid());
    let mut out = f.to_fourier();
    for (z, s) in out.values_mut().iter_mut().zip(&symbol) {
        *z *= *s;
    }
    Ok(out.into_representation(repr))
}

/// `P_{<=N} f` with the smooth cutoff.
pub fn project_low(f: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    project_low_with(f, cutoff, CutoffMode::Smooth)
}

pub fn project_low_with(f: &SpectralField, cutoff: f64, mode: CutoffMode) -> Result<SpectralField> {
    if !(cutoff > 0.0) {
        return Err(Error::param(format!("cutoff N must be positive, got {cutoff}")));
    }
    apply_multiplier(f, &MultiplierSpec::new(Symbol::Lowpass { cutoff, mode }))
}

/// `P_{>N} f = f - P_{<=N} f`.
pub fn project_high(f: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    if !(cutoff > 0.0) {
        return Err(Error::param(format!("cutoff N must be positive, got {cutoff}")));
    }
    apply_multiplier(f, &MultiplierSpec::new(Symbol::Highpass { cutoff, mode: CutoffMode::Smooth }))
}
