use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgnr_core::experiments::{
    emit_results, parse_config, run_single_solve, run_study, solve_samples_to_csv, validation_battery, Fault, RunManifest,
    Study, SweepConfig,
};
use kgnr_core::Error;

/// Numerical studies of the non-relativistic limit of the cubic Klein-Gordon equation.
#[derive(Parser)]
#[command(name = "kgnr", version)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a config entry, e.g. `--set grid.points=128`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for synthetic noisy test vectors.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write plot.svg.
    #[arg(long)]
    plot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Bracket,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one equation and write trajectory.csv.
    Solve(RunArgs),
    /// Run a study and write results.csv and manifest.toml.
    Sweep(RunArgs),
    /// Run a sharpness study.
    Counterexample(RunArgs),
    /// Run the half-wave diagnostics study.
    DiagnoseWaves(RunArgs),
    /// Run the analytic check battery.
    Validate {
        #[arg(long, hide = true)]
        fault: Option<FaultArg>,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        4
    } else if e.is_numerical() {
        3
    } else {
        2
    }
}

fn load(args: &RunArgs) -> Result<SweepConfig, Error> {
    let mut overrides = args.overrides.clone();
    if let Some(s) = args.seed {
        overrides.push(format!("seed={s}"));
    }
    parse_config(&args.config, &overrides)
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn solve(args: &RunArgs) -> Result<(), Error> {
    let cfg = load(args)?;
    let samples = run_single_solve(&cfg)?;
    std::fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let path = args.out.join("trajectory.csv");
    std::fs::write(&path, solve_samples_to_csv(&samples)).map_err(|e| io_err(&path, e))?;
    let cfg_path = args.out.join("config.toml");
    std::fs::write(&cfg_path, kgnr_core::experiments::echo_config(&cfg)).map_err(|e| io_err(&cfg_path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn study(args: &RunArgs, allowed: &[Study], verb: &str) -> Result<(), Error> {
    let cfg = load(args)?;
    if !allowed.is_empty() && !allowed.contains(&cfg.study) {
        return Err(Error::Config(format!("`{verb}` does not run study {}", cfg.study.name())));
    }
    let start = Instant::now();
    let result = run_study(&cfg)?;
    let manifest = RunManifest::new(&cfg, &result, start.elapsed().as_secs_f64());
    let paths = emit_results(&result, &manifest, &args.out, args.plot)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    for (k, v) in &result.summary {
        println!("{k} = {v:.6e}");
    }
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.manifest.display());
    if let Some(p) = paths.plot {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn validate(fault: Option<FaultArg>) -> ExitCode {
    let fault = fault.map(|FaultArg::Bracket| Fault::Bracket);
    let report = validation_battery(fault);
    for c in &report {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} ({:.3e} <= {:.1e})", c.name, c.value, c.tolerance);
    }
    if report.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let r = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => study(a, &[], "sweep"),
        Command::Counterexample(a) => study(a, &[Study::SharpnessChirped, Study::SharpnessRough], "counterexample"),
        Command::DiagnoseWaves(a) => study(a, &[Study::WaveDiagnostics], "diagnose-waves"),
        Command::Validate { fault } => return validate(*fault),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
