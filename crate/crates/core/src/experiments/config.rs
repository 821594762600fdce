use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::{DataFamily, DataSpec};
use crate::dynamics::{EquationKind, EquationSpec, Scheme};
use crate::error::{Error, Result};
use crate::limits::Pairing;
use crate::spectral::make_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    RateKgVsSw,
    RateSwVsNls,
    GrowthInTime,
    SharpnessChirped,
    SharpnessRough,
    WaveDiagnostics,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::RateKgVsSw => "rate-kg-vs-sw",
            Study::RateSwVsNls => "rate-sw-vs-nls",
            Study::GrowthInTime => "growth-in-time",
            Study::SharpnessChirped => "sharpness-chirped",
            Study::SharpnessRough => "sharpness-rough",
            Study::WaveDiagnostics => "wave-diagnostics",
        }
    }

    fn is_epsilon_sweep(self) -> bool {
        !matches!(self, Study::GrowthInTime | Study::SharpnessRough)
    }
}

fn default_epsilons() -> Vec<f64> {
    vec![0.25, 0.125, 0.0625, 0.03125]
}
fn d1() -> usize {
    1
}
fn two() -> f64 {
    2.0
}
fn default_data() -> DataSpec {
    DataSpec::new(DataFamily::Gaussian)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Box side length in the original frame.
    pub extent: f64,
    /// Points per axis.
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { extent: 32.0, points: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LegLambdas {
    /// Cubic coefficient of the Klein-Gordon leg.
    pub kg: f64,
    /// Cubic coefficient of the profile legs. Defaults to 3 when the profile
    /// is compared against Klein-Gordon and 1 for the single-modulated
    /// Schrödinger-wave/NLS pair.
    pub profile: Option<f64>,
}

impl Default for LegLambdas {
    fn default() -> Self {
        Self { kg: 1.0, profile: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepConfig {
    pub scheme: Scheme,
    pub h0: f64,
    /// Base step of the NLS leg, which runs at `profile_h0·ε²`. Defaults to `h0`.
    pub profile_h0: Option<f64>,
    pub two_thirds: Option<bool>,
    /// Re-run every leg at `h0/2` and record the change of its headline error.
    pub refine_check: bool,
    /// Relative change accepted by the refinement check.
    pub refine_tolerance: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::StrangTrig,
            h0: 0.05,
            profile_h0: None,
            two_thirds: None,
            refine_check: false,
            refine_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub samples_per_unit: usize,
    /// Sobolev indices reported next to the L² error; the first one fills the
    /// `err_sobolev_gamma` column.
    pub gammas: Vec<f64>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { samples_per_unit: 64, gammas: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrowthConfig {
    pub epsilon: f64,
    pub pairing: Pairing,
    /// Number of log-spaced output times in `[1, window/ε²]`.
    pub points: usize,
    /// The window constant: times run up to `window/ε²`.
    pub window: f64,
    /// Fit only where `(ε²t)^{α/4} > dominance_factor·ε²`.
    pub dominance_factor: f64,
    /// Regularity used for the dominance window; defaults to `data.alpha`
    /// for rough data and 4 otherwise.
    pub alpha: Option<f64>,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0625,
            pairing: Pairing::SwVsNls,
            points: 24,
            window: 0.5,
            dominance_factor: 3.0,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChirpConfig {
    /// Errors are maximised over `[t0 - width, t0]`.
    pub t0: f64,
    pub width: f64,
}

impl Default for ChirpConfig {
    fn default() -> Self {
        Self { t0: 2.0, width: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub equation: EquationKind,
    pub epsilon: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { equation: EquationKind::KgEps, epsilon: 0.125 }
    }
}

/// Injected errors that bypass the solvers: `coefficient·ε^exponent` for
/// sweeps and `coefficient·(ε²t)^exponent` for growth studies, times
/// `1 + noise·U(-1, 1)` drawn from the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Synthetic {
    #[serde(default = "one")]
    pub coefficient: f64,
    pub exponent: f64,
    #[serde(default)]
    pub noise: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub study: Study,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "d1")]
    pub dim: usize,
    #[serde(default = "two")]
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_data")]
    pub data: DataSpec,
    #[serde(default)]
    pub lambda: LegLambdas,
    #[serde(default)]
    pub step: StepConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub growth: GrowthConfig,
    #[serde(default)]
    pub chirp: ChirpConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<Synthetic>,
}

impl SweepConfig {
    /// Defaults for a study, as if parsed from `study = "..."` alone.
    pub fn for_study(study: Study) -> Self {
        let text = format!("study = \"{}\"", study.name());
        let mut cfg: SweepConfig = toml::from_str(&text).expect("defaults parse");
        cfg.materialize();
        cfg
    }

    /// The pairing a study compares.
    pub fn pairing(&self) -> Pairing {
        match self.study {
            Study::RateKgVsSw | Study::SharpnessChirped | Study::WaveDiagnostics => Pairing::KgVsSw,
            Study::RateSwVsNls => Pairing::SwVsNls,
            Study::GrowthInTime | Study::SharpnessRough => self.growth.pairing,
        }
    }

    pub fn profile_lambda(&self) -> f64 {
        self.lambda.profile.unwrap_or(match self.pairing() {
            Pairing::SwVsNls => 1.0,
            _ => 3.0,
        })
    }

    pub fn growth_alpha(&self) -> f64 {
        self.growth.alpha.unwrap_or(match self.data.family {
            DataFamily::RoughSobolev => self.data.alpha,
            _ => 4.0,
        })
    }

    pub fn profile_h0(&self) -> f64 {
        self.step.profile_h0.unwrap_or(self.step.h0)
    }

    /// Fill every optional knob with its resolved value.
    pub fn materialize(&mut self) {
        self.lambda.profile = Some(self.profile_lambda());
        self.step.profile_h0 = Some(self.profile_h0());
        if self.study == Study::SharpnessRough && self.growth.alpha.is_none() {
            self.growth.alpha = Some(self.data.alpha);
        }
        self.growth.alpha = Some(self.growth_alpha());
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.study.is_epsilon_sweep() {
            let need = if self.study == Study::WaveDiagnostics { 2 } else { 3 };
            if self.epsilons.len() < need {
                return bad(format!("{} needs at least {need} epsilons", self.study.name()));
            }
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return bad("epsilons must lie in (0, 1]".into());
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad("epsilons must be strictly decreasing".into());
        }
        if !(1..=3).contains(&self.dim) {
            return bad(format!("dim must be 1, 2 or 3, got {}", self.dim));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("horizon must be positive".into());
        }
        make_grid(self.dim, self.grid.extent, self.grid.points).map_err(|e| Error::Config(e.to_string()))?;
        self.data.validate()?;
        if !(self.step.h0 > 0.0) || !(self.profile_h0() > 0.0) {
            return bad("step sizes must be positive".into());
        }
        if self.step.scheme == Scheme::Rk4Oracle {
            return bad("rk4-oracle is a test oracle, not a sweep scheme".into());
        }
        if !(self.step.refine_tolerance > 0.0) {
            return bad("step.refine_tolerance must be positive".into());
        }
        if self.output.samples_per_unit == 0 {
            return bad("output.samples_per_unit must be at least 1".into());
        }
        for &g in &self.output.gammas {
            if !(-2.0..=6.0).contains(&g) {
                return bad(format!("output.gammas entries must lie in [-2, 6], got {g}"));
            }
        }
        let g = &self.growth;
        if !(g.epsilon > 0.0 && g.epsilon <= 1.0) {
            return bad("growth.epsilon must lie in (0, 1]".into());
        }
        if g.points < 3 || !(g.window > 0.0) || !(g.dominance_factor > 0.0) {
            return bad("growth needs points >= 3, window > 0 and dominance_factor > 0".into());
        }
        if matches!(self.study, Study::GrowthInTime | Study::SharpnessRough) && g.window / (g.epsilon * g.epsilon) <= 1.0 {
            return bad("growth window [1, window/eps^2] is empty: epsilon too large".into());
        }
        if self.study == Study::SharpnessRough && self.data.family != DataFamily::RoughSobolev {
            return bad("sharpness-rough needs data.family = \"rough-sobolev\"".into());
        }
        if self.study == Study::SharpnessChirped && self.data.family != DataFamily::ChirpedAnnulus {
            return bad("sharpness-chirped needs data.family = \"chirped-annulus\"".into());
        }
        if !(self.chirp.width > 0.0 && self.chirp.t0 >= self.chirp.width) {
            return bad("chirp window needs 0 < width <= t0".into());
        }
        if !(self.solve.epsilon > 0.0 && self.solve.epsilon <= 1.0) {
            return bad("solve.epsilon must lie in (0, 1]".into());
        }
        for lam in [self.lambda.kg, self.profile_lambda()] {
            EquationSpec::kg_eps(0.5, lam).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// Apply one `dotted.key=value` override to a TOML table. Values are read
/// as TOML, falling back to a bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    let value: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {}", raw.trim())) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed override key `{key}`")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key `{key}`: `{p}` is not a section")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Parse a config from text plus overrides, materialize defaults, validate.
pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<SweepConfig> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let mut cfg: SweepConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    cfg.materialize();
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text, overrides)
}

/// The fully materialized config as TOML text.
pub fn echo_config(cfg: &SweepConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}
