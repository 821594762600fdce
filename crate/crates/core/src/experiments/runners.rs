use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Study, SweepConfig};
use super::fit::{fit_rate, RateFit};
use crate::datagen::{defect_functional, InitialData};
use crate::dynamics::{
    conserved_quantities, solve_kg_eps, solve_nls, solve_schrodinger_wave, solve_unit_kg, ConservedReport, EquationKind,
    EquationSpec, FieldSnapshot, Scheme, SecondOrderState, StepPolicy, Trajectory,
};
use crate::error::{Error, Result};
use crate::limits::{leftward_smallness_track, remainder, resonance_boundary_term, to_rescaled_frame, Pairing, RemainderRecord};
use crate::spectral::{l2_norm, make_grid, TorusGrid};

/// Legs whose conserved quantities drift more than this are reported but
/// left out of fits.
pub const DRIFT_LIMIT: f64 = 1e-5;

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub study: Study,
    pub dim: usize,
    pub epsilon: f64,
    pub t: f64,
    pub err_l2: Option<f64>,
    pub err_sobolev_gamma: Option<f64>,
    pub w1_l2: Option<f64>,
    pub w2_l2: Option<f64>,
    pub energy_drift: Option<f64>,
    pub mass_drift: Option<f64>,
    pub scheme: Scheme,
    pub h0: f64,
    pub grid_points: usize,
    pub box_extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegReport {
    pub epsilon: f64,
    /// Sup-in-time error over the reported times (max `W₁` norm for wave
    /// diagnostics).
    pub headline: f64,
    pub max_energy_drift: f64,
    pub max_mass_drift: f64,
    pub unconverged: bool,
    /// Relative change of `headline` when the step is halved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_delta: Option<f64>,
    pub half_box_leak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub study: Study,
    pub dim: usize,
    pub rows: Vec<ResultRow>,
    pub legs: Vec<LegReport>,
    pub fit: Option<RateFit>,
    pub summary: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

struct LegOutput {
    rows: Vec<ResultRow>,
    report: LegReport,
    extra: BTreeMap<String, f64>,
    warnings: Vec<String>,
}

/// `k/spu` for `k = 0..=round(t_end·spu)`.
pub fn uniform_times(t_end: f64, samples_per_unit: usize) -> Vec<f64> {
    let n = (t_end * samples_per_unit as f64).round() as usize;
    (0..=n).map(|k| k as f64 / samples_per_unit as f64).collect()
}

/// `n` log-spaced times in `[1, t_max]`.
pub fn log_times(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (t_max.ln() * k as f64 / (n - 1) as f64).exp()).collect()
}

fn policy(scheme: Scheme, h0: f64, two_thirds: Option<bool>) -> StepPolicy {
    StepPolicy { scheme, h0, two_thirds }
}

enum Leg {
    Second(Trajectory<SecondOrderState>, EquationSpec),
    First(Trajectory<FieldSnapshot>, EquationSpec),
}

impl Leg {
    fn drifts(&self) -> Vec<ConservedReport> {
        match self {
            Leg::Second(tr, spec) => tr.samples.iter().map(|s| conserved_quantities(s, spec)).collect(),
            Leg::First(tr, spec) => tr.samples.iter().map(|s| conserved_quantities(s, spec)).collect(),
        }
    }
}

/// Max energy and mass drift at each sample across both legs.
fn pair_drifts(a: &Leg, b: &Leg) -> Vec<(Option<f64>, Option<f64>)> {
    let (qa, qb) = (a.drifts(), b.drifts());
    let fold = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    };
    qa.iter()
        .zip(&qb)
        .map(|(ra, rb)| {
            let e = fold(ra.energy_drift_from(&qa[0]), rb.energy_drift_from(&qb[0]));
            let m = fold(ra.mass_drift_from(&qa[0]), rb.mass_drift_from(&qb[0]));
            (e, m)
        })
        .collect()
}

fn build_data(cfg: &SweepConfig, grid: &TorusGrid) -> Result<InitialData> {
    cfg.data.build(grid, cfg.profile_lambda())
}

struct PairRun {
    records: Vec<RemainderRecord>,
    drifts: Vec<(Option<f64>, Option<f64>)>,
    data: InitialData,
}

/// Solve both legs of `pairing` at `epsilon` and compare at `times`.
fn run_pair(cfg: &SweepConfig, epsilon: f64, pairing: Pairing, times: &[f64], scale: f64) -> Result<PairRun> {
    let grid = make_grid(cfg.dim, cfg.grid.extent, cfg.grid.points)?;
    let data = build_data(cfg, &grid)?;
    let lp = cfg.profile_lambda();
    let h0 = cfg.step.h0 * scale;
    let tt = cfg.step.two_thirds;
    let kg = |()| -> Result<Leg> {
        let spec = EquationSpec::kg_eps(epsilon, cfg.lambda.kg);
        let tr = solve_kg_eps(&data.u0, &data.u1, &spec, times, &policy(Scheme::StrangTrig, h0, tt))?;
        Ok(Leg::Second(tr, spec))
    };
    let sw = |()| -> Result<Leg> {
        let spec = EquationSpec::schrodinger_wave(epsilon, lp);
        let tr = solve_schrodinger_wave(&data.v0, &data.v1, &spec, times, &policy(cfg.step.scheme, h0, tt))?;
        Ok(Leg::Second(tr, spec))
    };
    let nls = |()| -> Result<Leg> {
        let spec = EquationSpec::nls(lp);
        let h = cfg.profile_h0() * scale * epsilon * epsilon;
        let tr = solve_nls(&data.v0, &spec, times, &policy(Scheme::StrangTrig, h, tt))?;
        Ok(Leg::First(tr, spec))
    };
    let (a, b) = match pairing {
        Pairing::KgVsSw => (kg(())?, sw(())?),
        Pairing::KgVsNls => (kg(())?, nls(())?),
        Pairing::SwVsNls => (sw(())?, nls(())?),
    };
    let gammas = &cfg.output.gammas;
    let records = times
        .iter()
        .map(|&t| match (&a, &b) {
            (Leg::Second(u, _), Leg::Second(v, _)) => remainder(u, v, t, epsilon, pairing, gammas),
            (Leg::Second(u, _), Leg::First(v, _)) => remainder(u, v, t, epsilon, pairing, gammas),
            _ => unreachable!("first leg is always second order"),
        })
        .collect::<Result<Vec<_>>>()?;
    let drifts = pair_drifts(&a, &b);
    Ok(PairRun { records, drifts, data })
}

fn row(cfg: &SweepConfig, epsilon: f64, t: f64) -> ResultRow {
    ResultRow {
        study: cfg.study,
        dim: cfg.dim,
        epsilon,
        t,
        err_l2: None,
        err_sobolev_gamma: None,
        w1_l2: None,
        w2_l2: None,
        energy_drift: None,
        mass_drift: None,
        scheme: cfg.step.scheme,
        h0: cfg.step.h0,
        grid_points: cfg.grid.points,
        box_extent: cfg.grid.extent,
    }
}

fn leg_report(epsilon: f64, headline: f64, rows: &[ResultRow], leak: f64) -> LegReport {
    let max = |f: fn(&ResultRow) -> Option<f64>| rows.iter().filter_map(f).fold(0.0, f64::max);
    let max_energy_drift = max(|r| r.energy_drift);
    let max_mass_drift = max(|r| r.mass_drift);
    LegReport {
        epsilon,
        headline,
        max_energy_drift,
        max_mass_drift,
        unconverged: max_energy_drift.max(max_mass_drift) > DRIFT_LIMIT || !headline.is_finite(),
        refine_delta: None,
        half_box_leak: leak,
    }
}

/// Remainder legs (rates, growth, chirped sharpness). Rows are kept for
/// times in `[t_lo, ∞)`.
fn pair_leg(cfg: &SweepConfig, epsilon: f64, pairing: Pairing, times: &[f64], t_lo: f64, scale: f64) -> Result<LegOutput> {
    let run = run_pair(cfg, epsilon, pairing, times, scale)?;
    let rows: Vec<ResultRow> = run
        .records
        .iter()
        .zip(&run.drifts)
        .filter(|(r, _)| r.time >= t_lo - 1e-12)
        .map(|(r, (e, m))| ResultRow {
            err_l2: Some(r.l2_error),
            err_sobolev_gamma: r.sobolev.first().map(|s| s.1),
            energy_drift: *e,
            mass_drift: *m,
            ..row(cfg, epsilon, r.time)
        })
        .collect();
    let headline = rows.iter().filter_map(|r| r.err_l2).fold(0.0, f64::max);
    let mut extra = BTreeMap::new();
    if cfg.study == Study::SharpnessChirped {
        extra.insert("defect".into(), defect_functional(&run.data.v0, &run.data.v1)?);
        if let Some(f) = &run.data.profile {
            let f3 = f.map_physical(|z| z * z * z);
            extra.insert("defect_bound".into(), 0.25 * cfg.data.delta0.powi(3) * l2_norm(&f3));
        }
    }
    let report = leg_report(epsilon, headline, &rows, run.data.half_box_leak);
    Ok(LegOutput { rows, report, extra, warnings: run.data.warnings })
}

/// Unit KG in the rescaled frame, tracked through the half-wave norms.
fn wave_leg(cfg: &SweepConfig, epsilon: f64, scale: f64) -> Result<LegOutput> {
    let grid = make_grid(cfg.dim, cfg.grid.extent, cfg.grid.points)?;
    let data = build_data(cfg, &grid)?;
    let state0 = to_rescaled_frame(&SecondOrderState::new(data.v0.clone(), data.v1.clone(), 0.0)?, epsilon)?;
    let spec = EquationSpec::unit_kg(cfg.profile_lambda());
    let times = uniform_times(cfg.horizon, cfg.output.samples_per_unit);
    let taus: Vec<f64> = times.iter().map(|t| t / (epsilon * epsilon)).collect();
    let tr = solve_unit_kg(&state0, &spec, &taus, &policy(Scheme::StrangTrig, cfg.step.h0 * scale, cfg.step.two_thirds))?;
    let track = leftward_smallness_track(&tr, epsilon)?;
    let q0 = conserved_quantities(&tr.samples[0], &spec);
    let rows: Vec<ResultRow> = tr
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| ResultRow {
            w1_l2: Some(track.w1[k]),
            w2_l2: Some(track.w2[k]),
            energy_drift: conserved_quantities(s, &spec).energy_drift_from(&q0),
            ..row(cfg, epsilon, times[k])
        })
        .collect();
    let norm = epsilon.powf(0.5 * cfg.dim as f64 - 1.0);
    let mut extra = BTreeMap::new();
    extra.insert("max_w2".into(), track.max_w2);
    extra.insert("resonance_term".into(), l2_norm(&resonance_boundary_term(&state0.position)?) * norm);
    let report = leg_report(epsilon, track.max_w1, &rows, data.half_box_leak);
    Ok(LegOutput { rows, report, extra, warnings: data.warnings })
}

fn run_leg(cfg: &SweepConfig, epsilon: f64, scale: f64) -> Result<LegOutput> {
    match cfg.study {
        Study::RateKgVsSw | Study::RateSwVsNls => {
            pair_leg(cfg, epsilon, cfg.pairing(), &uniform_times(cfg.horizon, cfg.output.samples_per_unit), 0.0, scale)
        }
        Study::SharpnessChirped => {
            let times = uniform_times(cfg.chirp.t0, cfg.output.samples_per_unit);
            pair_leg(cfg, epsilon, Pairing::KgVsSw, &times, cfg.chirp.t0 - cfg.chirp.width, scale)
        }
        Study::GrowthInTime | Study::SharpnessRough => {
            let g = &cfg.growth;
            let times = log_times(g.window / (g.epsilon * g.epsilon), g.points);
            pair_leg(cfg, epsilon, g.pairing, &times, 0.0, scale)
        }
        Study::WaveDiagnostics => wave_leg(cfg, epsilon, scale),
    }
}

fn synthetic_leg(cfg: &SweepConfig, epsilon: f64, index: usize) -> LegOutput {
    let s = cfg.synthetic.expect("synthetic mode");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
    let mut noisy = |v: f64| v * (1.0 + s.noise * rng.random_range(-1.0..1.0));
    let rows: Vec<ResultRow> = match cfg.study {
        Study::GrowthInTime | Study::SharpnessRough => log_times(cfg.growth.window / (epsilon * epsilon), cfg.growth.points)
            .into_iter()
            .map(|t| ResultRow {
                err_l2: Some(noisy(s.coefficient * (epsilon * epsilon * t).powf(s.exponent))),
                ..row(cfg, epsilon, t)
            })
            .collect(),
        Study::WaveDiagnostics => vec![ResultRow {
            w1_l2: Some(noisy(s.coefficient * epsilon.powf(s.exponent))),
            w2_l2: Some(1.0),
            ..row(cfg, epsilon, cfg.horizon)
        }],
        _ => vec![ResultRow { err_l2: Some(noisy(s.coefficient * epsilon.powf(s.exponent))), ..row(cfg, epsilon, cfg.horizon) }],
    };
    let headline = rows.iter().filter_map(|r| r.err_l2.or(r.w1_l2)).fold(0.0, f64::max);
    let mut extra = BTreeMap::new();
    if cfg.study == Study::WaveDiagnostics {
        extra.insert("max_w2".into(), 1.0);
    }
    LegOutput { report: leg_report(epsilon, headline, &rows, 0.0), rows, extra, warnings: Vec::new() }
}

fn with_refinement(cfg: &SweepConfig, epsilon: f64) -> Result<LegOutput> {
    let mut out = run_leg(cfg, epsilon, 1.0)?;
    if cfg.step.refine_check {
        let fine = run_leg(cfg, epsilon, 0.5)?;
        let delta = (fine.report.headline - out.report.headline).abs() / out.report.headline.abs().max(1e-300);
        out.report.refine_delta = Some(delta);
        if delta > cfg.step.refine_tolerance {
            out.warnings.push(format!(
                "eps = {epsilon}: halving h0 changed the headline error by {:.2}%, above the {:.2}% band",
                100.0 * delta,
                100.0 * cfg.step.refine_tolerance
            ));
        }
    }
    Ok(out)
}

/// Run a study. Legs are independent and run in parallel on the current
/// rayon pool; results are gathered in config order.
pub fn run_study(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let epsilons: Vec<f64> = match cfg.study {
        Study::GrowthInTime | Study::SharpnessRough => vec![cfg.growth.epsilon],
        _ => cfg.epsilons.clone(),
    };
    let outputs: Vec<LegOutput> = epsilons
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            if cfg.synthetic.is_some() {
                Ok(synthetic_leg(cfg, eps, i))
            } else {
                with_refinement(cfg, eps).map_err(|e| Error::Leg { epsilon: eps, source: Box::new(e) })
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings: Vec<String> = Vec::new();
    for o in &outputs {
        for w in &o.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
        if o.report.unconverged {
            warnings.push(format!(
                "eps = {}: conserved-quantity drift {:.3e} exceeds {DRIFT_LIMIT:e}; leg excluded from fits",
                o.report.epsilon,
                o.report.max_energy_drift.max(o.report.max_mass_drift)
            ));
        }
    }
    let mut summary = BTreeMap::new();
    let converged: Vec<&LegOutput> = outputs.iter().filter(|o| !o.report.unconverged).collect();
    let max_drift = outputs.iter().map(|o| o.report.max_energy_drift.max(o.report.max_mass_drift)).fold(0.0, f64::max);
    summary.insert("max_drift".into(), max_drift);
    summary.insert("max_half_box_leak".into(), outputs.iter().map(|o| o.report.half_box_leak).fold(0.0, f64::max));

    let eps_fit = |f: &dyn Fn(&LegOutput) -> f64| -> Option<RateFit> {
        let pts: Vec<(f64, f64)> = converged.iter().map(|o| (o.report.epsilon, f(o))).collect();
        if pts.len() >= 3 {
            fit_rate(&pts).ok()
        } else {
            None
        }
    };

    let fit = match cfg.study {
        Study::RateKgVsSw | Study::RateSwVsNls => eps_fit(&|o| o.report.headline),
        Study::SharpnessChirped => {
            let ratios: Vec<f64> = converged.iter().map(|o| o.report.headline / (o.report.epsilon * o.report.epsilon)).collect();
            if !ratios.is_empty() {
                let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().cloned().fold(0.0, f64::max);
                summary.insert("ratio_min".into(), lo);
                summary.insert("ratio_max".into(), hi);
                summary.insert("ratio_spread".into(), hi / lo);
            }
            if let Some(o) = outputs.first() {
                for k in ["defect", "defect_bound"] {
                    if let Some(v) = o.extra.get(k) {
                        summary.insert(k.into(), *v);
                    }
                }
            }
            eps_fit(&|o| o.report.headline)
        }
        Study::GrowthInTime | Study::SharpnessRough => {
            let eps = cfg.growth.epsilon;
            let alpha = cfg.growth_alpha();
            let t_start = (cfg.growth.dominance_factor * eps * eps).powf(4.0 / alpha) / (eps * eps);
            summary.insert("window_start".into(), t_start);
            summary.insert("window_end".into(), cfg.growth.window / (eps * eps));
            let pts: Vec<(f64, f64)> = converged
                .iter()
                .flat_map(|o| o.rows.iter())
                .filter(|r| r.t > t_start)
                .filter_map(|r| Some((r.t, r.err_l2?)))
                .collect();
            summary.insert("window_points".into(), pts.len() as f64);
            let f = fit_rate(&pts).ok();
            if f.is_none() {
                warnings.push("growth fit window holds fewer than 3 usable points".into());
            }
            f
        }
        Study::WaveDiagnostics => {
            let w2: Vec<f64> = converged.iter().filter_map(|o| o.extra.get("max_w2").copied()).collect();
            if !w2.is_empty() {
                let lo = w2.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = w2.iter().cloned().fold(0.0, f64::max);
                summary.insert("w2_spread".into(), hi / lo);
            }
            if let Some(r) = eps_fit(&|o| o.extra.get("resonance_term").copied().unwrap_or(f64::NAN)) {
                summary.insert("resonance_slope".into(), r.slope);
            }
            eps_fit(&|o| o.report.headline)
        }
    };
    if let Some(f) = &fit {
        summary.insert("slope".into(), f.slope);
        summary.insert("residual".into(), f.residual);
    }
    let mut rows = Vec::new();
    let mut legs = Vec::new();
    for o in outputs {
        rows.extend(o.rows);
        legs.push(o.report);
    }
    Ok(SweepResult { study: cfg.study, dim: cfg.dim, rows, legs, fit, summary, warnings })
}

/// One sample of a single-equation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveSample {
    pub t: f64,
    pub l2: f64,
    pub energy_drift: Option<f64>,
    pub mass_drift: Option<f64>,
}

/// Solve `cfg.solve.equation` alone on `[0, horizon]`.
pub fn run_single_solve(cfg: &SweepConfig) -> Result<Vec<SolveSample>> {
    cfg.validate()?;
    let grid = make_grid(cfg.dim, cfg.grid.extent, cfg.grid.points)?;
    let data = build_data(cfg, &grid)?;
    let eps = cfg.solve.epsilon;
    let times = uniform_times(cfg.horizon, cfg.output.samples_per_unit);
    let tt = cfg.step.two_thirds;
    let lp = cfg.profile_lambda();
    let leg = match cfg.solve.equation {
        EquationKind::KgEps => {
            let spec = EquationSpec::kg_eps(eps, cfg.lambda.kg);
            Leg::Second(solve_kg_eps(&data.u0, &data.u1, &spec, &times, &policy(Scheme::StrangTrig, cfg.step.h0, tt))?, spec)
        }
        EquationKind::SchrodingerWave => {
            let spec = EquationSpec::schrodinger_wave(eps, lp);
            Leg::Second(solve_schrodinger_wave(&data.v0, &data.v1, &spec, &times, &policy(cfg.step.scheme, cfg.step.h0, tt))?, spec)
        }
        EquationKind::Nls => {
            let spec = EquationSpec::nls(lp);
            Leg::First(solve_nls(&data.v0, &spec, &times, &policy(Scheme::StrangTrig, cfg.step.h0, tt))?, spec)
        }
        EquationKind::UnitKg => {
            let spec = EquationSpec::unit_kg(cfg.lambda.kg);
            let s0 = SecondOrderState::new(data.u0.clone(), data.u1.clone(), 0.0)?;
            Leg::Second(solve_unit_kg(&s0, &spec, &times, &policy(Scheme::StrangTrig, cfg.step.h0, tt))?, spec)
        }
    };
    let q = leg.drifts();
    let norms: Vec<f64> = match &leg {
        Leg::Second(tr, _) => tr.samples.iter().map(|s| l2_norm(&s.position)).collect(),
        Leg::First(tr, _) => tr.samples.iter().map(|s| l2_norm(&s.field)).collect(),
    };
    Ok(times
        .iter()
        .enumerate()
        .map(|(k, &t)| SolveSample {
            t,
            l2: norms[k],
            energy_drift: q[k].energy_drift_from(&q[0]),
            mass_drift: q[k].mass_drift_from(&q[0]),
        })
        .collect())
}
