use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Study, SweepConfig};
use super::fit::RateFit;
use super::runners::{LegReport, ResultRow, SolveSample, SweepResult};
use crate::dynamics::Scheme;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "study,d,epsilon,t,err_l2,err_sobolev_gamma,w1_l2,w2_l2,energy_drift,mass_drift,scheme,h0,grid_points,box_extent";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::StrangTrig => "strang-trig",
        Scheme::RescaledFrame => "rescaled-frame",
        Scheme::Rk4Oracle => "rk4-oracle",
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.study.name(),
            r.dim,
            num(r.epsilon),
            num(r.t),
            opt(r.err_l2),
            opt(r.err_sobolev_gamma),
            opt(r.w1_l2),
            opt(r.w2_l2),
            opt(r.energy_drift),
            opt(r.mass_drift),
            scheme_name(r.scheme),
            num(r.h0),
            r.grid_points,
            num(r.box_extent)
        );
    }
    out
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    T::deserialize(toml::Value::String(s.to_string())).map_err(|e| Error::Config(format!("bad csv field `{s}`: {e}")))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("csv header does not match".into()));
    }
    let bad = |m: String| Error::Config(m);
    let f = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("bad number `{s}`: {e}")));
    let of = |s: &str| if s.is_empty() { Ok(None) } else { f(s).map(Some) };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 14 {
                return Err(bad(format!("csv row has {} fields", c.len())));
            }
            Ok(ResultRow {
                study: parse_enum(c[0])?,
                dim: c[1].parse().map_err(|_| bad(format!("bad dim `{}`", c[1])))?,
                epsilon: f(c[2])?,
                t: f(c[3])?,
                err_l2: of(c[4])?,
                err_sobolev_gamma: of(c[5])?,
                w1_l2: of(c[6])?,
                w2_l2: of(c[7])?,
                energy_drift: of(c[8])?,
                mass_drift: of(c[9])?,
                scheme: parse_enum(c[10])?,
                h0: f(c[11])?,
                grid_points: c[12].parse().map_err(|_| bad(format!("bad grid_points `{}`", c[12])))?,
                box_extent: f(c[13])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassGuard {
    pub half_box_target: f64,
    pub max_half_box_leak: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub study: Study,
    pub wall_time_s: f64,
    pub mass_guard: MassGuard,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<RateFit>,
    pub summary: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub legs: Vec<LegReport>,
    pub config: SweepConfig,
}

pub const HALF_BOX_TARGET: f64 = 1e-10;

impl RunManifest {
    pub fn new(cfg: &SweepConfig, result: &SweepResult, wall_time_s: f64) -> Self {
        let leak = result.legs.iter().map(|l| l.half_box_leak).fold(0.0, f64::max);
        Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            study: result.study,
            wall_time_s,
            mass_guard: MassGuard { half_box_target: HALF_BOX_TARGET, max_half_box_leak: leak, ok: leak <= HALF_BOX_TARGET },
            fit: result.fit,
            summary: result.summary.clone(),
            warnings: result.warnings.clone(),
            legs: result.legs.clone(),
            config: cfg.clone(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedPaths {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub plot: Option<PathBuf>,
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })
}

/// Write `results.csv`, `manifest.toml` and, if asked, `plot.svg` into `dir`.
pub fn emit_results(result: &SweepResult, manifest: &RunManifest, dir: &Path, plot: bool) -> Result<EmittedPaths> {
    ensure_dir(dir)?;
    let csv = dir.join("results.csv");
    write_file(&csv, &rows_to_csv(&result.rows))?;
    let man = dir.join("manifest.toml");
    write_file(&man, &manifest.to_toml())?;
    let plot = if plot {
        let p = dir.join("plot.svg");
        write_file(&p, &render_svg(result))?;
        Some(p)
    } else {
        None
    };
    Ok(EmittedPaths { csv, manifest: man, plot })
}

pub fn solve_samples_to_csv(samples: &[SolveSample]) -> String {
    let mut out = String::from("t,l2,energy_drift,mass_drift\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{}", num(s.t), num(s.l2), opt(s.energy_drift), opt(s.mass_drift));
    }
    out
}

/// Log-log plot: sup error (or max `W₁`) against ε for sweeps, error
/// against t for growth studies.
pub fn render_svg(result: &SweepResult) -> String {
    let growth = matches!(result.study, Study::GrowthInTime | Study::SharpnessRough);
    let pts: Vec<(f64, f64)> = if growth {
        result.rows.iter().filter_map(|r| Some((r.t, r.err_l2?))).collect()
    } else {
        result.legs.iter().map(|l| (l.epsilon, l.headline)).collect()
    };
    let pts: Vec<(f64, f64)> = pts.into_iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.log10(), y.log10())).collect();
    let (w, h, m) = (480.0, 360.0, 48.0);
    let mut svg = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n");
    let _ = writeln!(svg, "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>", w - 2.0 * m, h - 2.0 * m);
    let xl = if growth { "log10 t" } else { "log10 eps" };
    let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\" font-size=\"12\">{xl}</text>", w / 2.0 - 20.0, h - 12.0);
    let _ = writeln!(svg, "<text x=\"4\" y=\"{}\" font-size=\"12\">log10 err</text>", m - 8.0);
    if pts.len() >= 2 {
        let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let sx = |x: f64| m + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * m);
        let sy = |y: f64| h - m - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * m);
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"steelblue\" points=\"{}\"/>", path.join(" "));
        for (x, y) in &pts {
            let _ = writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>", sx(*x), sy(*y));
        }
        let _ = writeln!(svg, "<text x=\"{m}\" y=\"{}\" font-size=\"10\">{x0:.2}</text>", h - m + 14.0);
        let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\" font-size=\"10\">{x1:.2}</text>", w - m - 24.0, h - m + 14.0);
        let _ = writeln!(svg, "<text x=\"4\" y=\"{}\" font-size=\"10\">{y0:.2}</text>", h - m);
        let _ = writeln!(svg, "<text x=\"4\" y=\"{}\" font-size=\"10\">{y1:.2}</text>", m + 10.0);
    }
    if let Some(f) = &result.fit {
        let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\" font-size=\"12\">slope {:.3}</text>", w - m - 80.0, m - 8.0, f.slope);
    }
    svg.push_str("</svg>\n");
    svg
}
