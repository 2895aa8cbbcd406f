//! `otto`: parameter sweeps, plot data and sampling runs for the
//! deformed-trap quantum Otto engine. Every run writes one CSV file.

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use output::DEFAULT_PRECISION;
use params::{find_preset, split_assignment, CommandKind, ConfigFile, Params, Value};

#[derive(Parser)]
#[command(
    name = "otto",
    version,
    about = "Finite-time quantum Otto engine sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Efficiency over η_C and operation mode versus r = √(ω_h/ω_c).
    ModeSweep(RunArgs),
    /// Mean work on an (ω_c, ω_h) grid.
    WorkContour(RunArgs),
    /// Efficiency and relative power fluctuation versus γ_h.
    Tradeoff(RunArgs),
    /// Efficiency at maximum power versus η_C.
    EmpSweep(RunArgs),
    /// Seeded Monte Carlo sampling of the work distribution.
    Sample(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in parameter set, e.g. fig1b.
    #[arg(long)]
    preset: Option<String>,
    /// Flat key=value file; overrides the preset.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Directory for the default output file name.
    #[arg(long, value_name = "DIR", env = "OTTO_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Significant digits in the CSV.
    #[arg(long, value_name = "INT")]
    precision: Option<usize>,
    /// Swept parameter.
    #[arg(long = "sweep", value_name = "SYM=START:STOP:COUNT")]
    sweeps: Vec<String>,
    /// Fixed parameter.
    #[arg(long = "set", value_name = "SYM=VALUE")]
    sets: Vec<String>,
    /// Exit with success even when some points were written as NA.
    #[arg(long)]
    allow_missing: bool,
}

struct Run {
    params: Params,
    seed: u64,
    precision: usize,
    out: PathBuf,
    allow_missing: bool,
}

fn resolve(kind: CommandKind, args: RunArgs) -> Result<Run> {
    let mut params = Params::new(kind);
    if let Some(name) = &args.preset {
        let preset = find_preset(name)?;
        if preset.command != kind {
            bail!("preset `{name}` belongs to `{}`", preset.command);
        }
        for &(k, v) in preset.entries {
            params.apply_text(k, v)?;
        }
    }
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    for (k, v) in &file.values {
        params.apply_text(k, v).context("in config file")?;
    }
    for s in &args.sweeps {
        let (k, v) = split_assignment(s)?;
        let value = Value::parse(v).with_context(|| format!("--sweep {s}"))?;
        if !matches!(value, Value::Sweep(_)) {
            bail!("--sweep {s}: expected START:STOP:COUNT");
        }
        params.apply(k, value)?;
    }
    for s in &args.sets {
        let (k, v) = split_assignment(s)?;
        let value = Value::parse(v).with_context(|| format!("--set {s}"))?;
        if !matches!(value, Value::Fixed(_)) {
            bail!("--set {s}: expected a single value, use --sweep for ranges");
        }
        params.apply(k, value)?;
    }
    let precision = args
        .precision
        .or(file.precision)
        .unwrap_or(DEFAULT_PRECISION);
    if !(1..=17).contains(&precision) {
        bail!("precision must be between 1 and 17 significant digits");
    }
    let out = match args.out {
        Some(path) => path,
        None => {
            let stem = args.preset.as_deref().unwrap_or(kind.name());
            args.out_dir
                .unwrap_or_else(|| PathBuf::from("."))
                .join(format!("{stem}.csv"))
        }
    };
    Ok(Run {
        params,
        seed: args.seed.or(file.seed).unwrap_or(0),
        precision,
        out,
        allow_missing: args.allow_missing,
    })
}

fn execute(cli: Cli) -> Result<bool> {
    let (kind, args) = match cli.command {
        Command::ModeSweep(a) => (CommandKind::ModeSweep, a),
        Command::WorkContour(a) => (CommandKind::WorkContour, a),
        Command::Tradeoff(a) => (CommandKind::Tradeoff, a),
        Command::EmpSweep(a) => (CommandKind::EmpSweep, a),
        Command::Sample(a) => (CommandKind::Sample, a),
    };
    let run = resolve(kind, args)?;
    let outcome = commands::run(&run.params, run.seed)?;
    outcome.table.write_atomic(&run.out, run.precision)?;
    for line in &outcome.log {
        eprintln!("{line}");
    }
    eprintln!(
        "wrote {} rows to {} ({} failed)",
        outcome.table.rows.len(),
        run.out.display(),
        outcome.failed
    );
    Ok(outcome.failed == 0 || run.allow_missing)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
