//! Parameter sweeps, rate fits and result emission.

mod battery;
mod config;
mod emit;
mod fit;
mod runners;

pub use battery::{validation_battery, CheckResult, Fault};
pub use config::{
    echo_config, parse_config, parse_config_str, ChirpConfig, GridConfig, GrowthConfig, LegLambdas, OutputConfig,
    SolveConfig, StepConfig, Study, SweepConfig, Synthetic,
};
pub use emit::{
    emit_results, render_svg, rows_from_csv, rows_to_csv, solve_samples_to_csv, EmittedPaths, MassGuard, RunManifest,
    CSV_HEADER, HALF_BOX_TARGET,
};
pub use fit::{fit_rate, RateFit};
pub use runners::{log_times, run_single_solve, run_study, uniform_times, LegReport, ResultRow, SolveSample, SweepResult, DRIFT_LIMIT};

#[cfg(test)]
mod tests;
