//! Scenario runner.
//!
//! Verbs:
//!
//! * `run <source>` integrates one scenario and writes `trajectory.csv` plus
//!   `summary.json` into `--out`.
//! * `sweep <source> --parameter <key> --values a,b,c` re-runs the scenario
//!   per value and writes `sweep.csv`.
//! * `list-builtins` prints the shipped scenario names.
//! * `validate <source>` loads and checks a config without running it.
//!
//! Sources are file paths or `builtin:<name>` references; `--set key=value`
//! applies dotted-path overrides in order before validation.
//!
//! Exit codes: 0 when a run converges below the tolerance (and for sweeps,
//! listings, and validations that complete), 1 for configuration or usage
//! errors, 2 when the run diverges or finishes above the tolerance.
//!
//! Retry policy: integration is fixed-step, so a too-coarse step shows up as
//! divergence, not silent error. With `--retries N`, a diverged run is
//! reloaded with the main step halved and the recording stride doubled (the
//! sampling interval in seconds stays put) and integrated again, up to N
//! times; the first surviving attempt is the one scored and written. Warmup
//! windows are never touched by retries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use neseek::batch::{run_sweep, SweepSpec};
use neseek::output;
use neseek::phi::PhiRegistry;
use neseek::scenario::{load, BuiltScenario, BUILTIN_NAMES};
use neseek::sim::{compute_metrics, integrate, EstimatorMode, RunLog};
use neseek::{Error, Result};

#[derive(Parser)]
#[command(name = "neseek", version, about = "Multi-agent equilibrium seeking simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectory.csv and summary.json
    Run(RunArgs),
    /// Score one scenario across a list of values for a numeric config key
    Sweep(SweepArgs),
    /// Print the names of the built-in scenarios
    ListBuiltins,
    /// Load, validate, and describe a scenario without running it
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file path or builtin:<name>
    source: String,
    /// Directory receiving the artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Dotted config override, repeatable (key=value)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Convergence bar on the final error (infinity norm)
    #[arg(long, default_value_t = 1e-2)]
    tolerance: f64,
    /// On divergence, halve the main step and rerun up to this many times
    #[arg(long, default_value_t = 0)]
    retries: u32,
}

#[derive(Args)]
struct SweepArgs {
    /// Config file path or builtin:<name>
    source: String,
    /// Dotted config key receiving each swept value
    #[arg(long)]
    parameter: String,
    /// Comma-separated numeric values to sweep
    #[arg(long)]
    values: String,
    /// Directory receiving sweep.csv
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Dotted config override applied to every variant, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for the sweep (default: one per core)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Config file path or builtin:<name>
    source: String,
    /// Dotted config override, repeatable (key=value)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ListBuiltins => cmd_list_builtins(),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_overrides(set: &[String]) -> Result<Vec<(String, String)>> {
    set.iter()
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::config("--set", format!("expected key=value, got `{pair}`")))
        })
        .collect()
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let base_overrides = parse_overrides(&args.set)?;
    let registry = PhiRegistry::new();
    let mut built = load(&args.source, &base_overrides, &registry)?;
    let mut log = integrate(&built.closed_loop, &built.initial_state, &built.params)?;
    let mut halvings = 0;
    while log.diverged.is_some() && halvings < args.retries {
        halvings += 1;
        let step = built.params.step / 2.0;
        let stride = built.params.stride.saturating_mul(2);
        eprintln!(
            "run diverged; retrying with h = {step} (attempt {halvings} of {})",
            args.retries
        );
        let mut overrides = base_overrides.clone();
        overrides.push(("integration.h".to_string(), format!("{step}")));
        overrides.push(("integration.stride".to_string(), format!("{stride}")));
        built = load(&args.source, &overrides, &registry)?;
        log = integrate(&built.closed_loop, &built.initial_state, &built.params)?;
    }
    let metrics = compute_metrics(&built.closed_loop, &log, &built.x_star);
    std::fs::create_dir_all(&args.out)?;
    let trajectory_path = args.out.join("trajectory.csv");
    let mut writer = BufWriter::new(File::create(&trajectory_path)?);
    output::write_trajectory(&mut writer, &built.closed_loop, &log)?;
    writer.flush()?;
    let summary = output::summary_json(&built, &metrics, args.tolerance)?;
    let summary_path = args.out.join("summary.json");
    std::fs::write(&summary_path, format!("{summary:#}\n"))?;
    describe_run(&built, &log, &metrics.final_error, metrics.final_time, args.tolerance);
    println!("wrote {}", trajectory_path.display());
    println!("wrote {}", summary_path.display());
    let converged = log.diverged.is_none() && metrics.final_error < args.tolerance;
    Ok(if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn describe_run(
    built: &BuiltScenario,
    log: &RunLog,
    final_error: &f64,
    final_time: f64,
    tolerance: f64,
) {
    match &log.diverged {
        Some(report) => println!("{}: diverged: {report}", built.name),
        None => {
            let verdict = if *final_error < tolerance {
                "converged"
            } else {
                "above tolerance"
            };
            println!(
                "{}: {verdict}, final error {final_error:.3e} at t = {final_time} (tolerance {tolerance:e})",
                built.name
            );
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let overrides = parse_overrides(&args.set)?;
    let values = parse_values(&args.values)?;
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(Error::config("--jobs", "needs at least one worker"));
        }
    }
    let spec = SweepSpec {
        source: &args.source,
        overrides: &overrides,
        parameter: &args.parameter,
    };
    let registry = PhiRegistry::new();
    let rows = match args.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::config("--jobs", e.to_string()))?;
            pool.install(|| run_sweep(&spec, &values, &registry))?
        }
        None => run_sweep(&spec, &values, &registry)?,
    };
    std::fs::create_dir_all(&args.out)?;
    let sweep_path = args.out.join("sweep.csv");
    let mut writer = BufWriter::new(File::create(&sweep_path)?);
    output::write_sweep(&mut writer, &rows)?;
    writer.flush()?;
    let diverged = rows.iter().filter(|r| r.diverged).count();
    println!(
        "swept {} over {} values ({diverged} diverged)",
        args.parameter,
        rows.len()
    );
    println!("wrote {}", sweep_path.display());
    Ok(ExitCode::SUCCESS)
}

fn parse_values(raw: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for part in raw.split(',') {
        let text = part.trim();
        if text.is_empty() {
            continue;
        }
        let value: f64 = text
            .parse()
            .map_err(|_| Error::config("sweep.values", format!("`{text}` is not a number")))?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::config(
            "sweep.values",
            "need at least one value to sweep",
        ));
    }
    Ok(values)
}

fn cmd_list_builtins() -> Result<ExitCode> {
    for name in BUILTIN_NAMES {
        println!("{name}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let overrides = parse_overrides(&args.set)?;
    let registry = PhiRegistry::new();
    let built = load(&args.source, &overrides, &registry)?;
    let cl = &built.closed_loop;
    println!("{}: valid", built.name);
    println!(
        "  game: {} players, total action dimension {}",
        cl.game().n_players(),
        cl.game().total_dim()
    );
    let simulated = cl.players().len();
    if simulated == 0 {
        println!("  players: none (reference layer only)");
    } else {
        println!("  players: {simulated} simulated");
    }
    match cl.mode() {
        EstimatorMode::Fixed(_) => println!("  estimator: fixed gains"),
        EstimatorMode::Adaptive(_) => println!("  estimator: adaptive gains"),
    }
    println!(
        "  integration: T = {}, h = {}, stride = {}, warmup windows: {}",
        built.params.t_final,
        built.params.step,
        built.params.stride,
        built.params.warmup.len()
    );
    println!("  state dimension: {}", cl.layout().total_len());
    Ok(ExitCode::SUCCESS)
}
