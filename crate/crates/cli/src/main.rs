//! Command-line front end for coherence–discord conversion cycles.
//!
//! Subcommands: `cycle` (one run, JSON), `sweep` (grid run, CSV), `report`
//! (compare a sweep against an embedded reference table), `plot` (sweep CSV
//! to SVG), and `qpt-demo` (simulated process tomography of the conversion
//! gate). Exit codes: 0 success, 1 usage error, 2 comparison thresholds
//! exceeded, 3 runtime failure.

mod config;
mod errors;
mod gatespec;
mod plot;
mod qptdemo;
mod reftable;
mod report;
mod sweep;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use qcycle::protocol::{run_cycle, CycleInput};

use crate::config::ConfigFile;
use crate::errors::CliError;
use crate::gatespec::GateArgs;
use crate::report::Thresholds;

#[derive(Parser)]
#[command(
    name = "qcycle",
    version,
    about = "Simulate cyclic inter-conversion between single-qubit coherence and two-qubit discord"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one conversion cycle and print a JSON report.
    Cycle(CycleArgs),
    /// Run a grid of conversion cycles and write CSV rows.
    Sweep(SweepArgs),
    /// Compare a sweep CSV against an embedded reference table.
    Report(ReportArgs),
    /// Render a sweep CSV as an SVG chart.
    Plot(PlotArgs),
    /// Reconstruct a gate's process matrix from simulated tomography.
    #[command(name = "qpt-demo")]
    QptDemo(QptDemoArgs),
}

#[derive(Args)]
struct CycleArgs {
    /// Pure input: preparation angle in degrees (0 to 45).
    #[arg(long, conflicts_with_all = ["a_re", "a_im"])]
    theta: Option<f64>,

    /// Mixed input: real part of the off-diagonal amplitude.
    #[arg(long)]
    a_re: Option<f64>,

    /// Mixed input: imaginary part of the off-diagonal amplitude.
    #[arg(long, requires = "a_re")]
    a_im: Option<f64>,

    /// Measurement basis: pauli-y or fourier.
    #[arg(long)]
    basis: Option<String>,

    #[command(flatten)]
    gate: GateArgs,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// JSON file with flag defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Input family: pure or mixed.
    #[arg(long)]
    mode: Option<String>,

    /// Grid: "table" for the embedded reference grid, or comma-separated
    /// values (degrees for pure, amplitudes for mixed).
    #[arg(long)]
    grid: Option<String>,

    /// Measurement basis: pauli-y or fourier.
    #[arg(long)]
    basis: Option<String>,

    #[command(flatten)]
    gate: GateArgs,

    /// Base seed, reserved for sampled pipelines; sweeps are exact and
    /// ignore it.
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// JSON file with flag defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Reference table to compare against: pure or mixed.
    #[arg(long)]
    table: String,

    /// Sweep CSV to compare.
    #[arg(long)]
    input: PathBuf,

    /// Threshold on the RMS discord deviation.
    #[arg(long)]
    max_rms_discord: Option<f64>,

    /// Threshold on the RMS final-coherence deviation.
    #[arg(long)]
    max_rms_cfinal: Option<f64>,

    /// Write the comparison here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// JSON file with flag defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSV to render.
    #[arg(long)]
    input: PathBuf,

    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QptDemoArgs {
    #[command(flatten)]
    gate: GateArgs,

    /// Shots per measurement setting.
    #[arg(long)]
    shots: Option<u64>,

    /// Base seed for sampled counts.
    #[arg(long)]
    seed: Option<u64>,

    /// Use noise-free rounded counts instead of sampling.
    #[arg(long)]
    analytic: bool,

    /// Write the reconstructed process-matrix JSON here.
    #[arg(long)]
    out: Option<PathBuf>,

    /// JSON file with flag defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Cycle(args) => cmd_cycle(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
        Command::Plot(args) => cmd_plot(args),
        Command::QptDemo(args) => cmd_qpt_demo(args),
    }
}

/// Write to the path when given, else to stdout.
fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|err| {
            CliError::runtime(format!("cannot write {}: {err}", path.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_cycle(args: CycleArgs) -> Result<i32, CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let usage = |err: qcycle::Error| CliError::usage(err.to_string());
    let input = match (args.theta, args.a_re) {
        (Some(theta), None) => CycleInput::pure(theta).map_err(usage)?,
        (None, Some(re)) => {
            CycleInput::mixed(C64::new(re, args.a_im.unwrap_or(0.0))).map_err(usage)?
        }
        (None, None) => {
            return Err(CliError::usage(
                "provide an input: --theta for pure, --a-re (and optionally --a-im) for mixed",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::usage("choose one of --theta or --a-re"))
        }
    };
    let basis = sweep::resolve_basis(args.basis.as_deref(), &config)?;
    let gate = args.gate.resolve(&config)?;
    let report = run_cycle(&input, &gate.model, &basis)?;
    let json = report
        .to_json_with_context(&[("gate", &gate.description), ("basis", basis.label())]);
    emit(args.out.as_deref(), &json)?;
    Ok(0)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let mode = args
        .mode
        .or_else(|| config.mode.clone())
        .ok_or_else(|| CliError::usage("provide --mode pure or --mode mixed"))?;
    let grid = args
        .grid
        .or_else(|| config.grid.clone())
        .unwrap_or_else(|| "table".into());
    let points = sweep::build_points(&mode, &grid)?;
    let basis = sweep::resolve_basis(args.basis.as_deref(), &config)?;
    let gate = args.gate.resolve(&config)?;
    let rows = sweep::run_sweep(&points, &gate.model, &basis)?;
    emit(args.out.as_deref(), &sweep::sweep_csv(&rows))?;
    Ok(0)
}

fn cmd_report(args: ReportArgs) -> Result<i32, CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let table = reftable::reference_table(&args.table)?;
    let text = std::fs::read_to_string(&args.input).map_err(|err| {
        CliError::runtime(format!("cannot read {}: {err}", args.input.display()))
    })?;
    let sim = report::parse_sim_csv(&text)?;
    let defaults = Thresholds::default();
    let thresholds = Thresholds {
        max_rms_discord: args
            .max_rms_discord
            .or(config.max_rms_discord)
            .unwrap_or(defaults.max_rms_discord),
        max_rms_cfinal: args
            .max_rms_cfinal
            .or(config.max_rms_cfinal)
            .unwrap_or(defaults.max_rms_cfinal),
    };
    let comparison = report::compare(&table, &sim, &thresholds)?;
    emit(args.out.as_deref(), &comparison.text)?;
    Ok(if comparison.thresholds_met { 0 } else { 2 })
}

fn cmd_plot(args: PlotArgs) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.input).map_err(|err| {
        CliError::runtime(format!("cannot read {}: {err}", args.input.display()))
    })?;
    let svg = plot::render_svg(&text)?;
    std::fs::write(&args.out, svg).map_err(|err| {
        CliError::runtime(format!("cannot write {}: {err}", args.out.display()))
    })?;
    Ok(0)
}

fn cmd_qpt_demo(args: QptDemoArgs) -> Result<i32, CliError> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let gate = args.gate.resolve(&config)?;
    let shots = args.shots.or(config.shots).unwrap_or(10_000);
    if shots == 0 {
        return Err(CliError::usage("--shots must be at least 1"));
    }
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let outcome = qptdemo::run_demo(&gate, shots, seed, args.analytic)?;
    print!("{}", outcome.summary_json);
    if let Some(path) = args.out.as_deref() {
        std::fs::write(path, outcome.reconstructed.to_json()).map_err(|err| {
            CliError::runtime(format!("cannot write {}: {err}", path.display()))
        })?;
    }
    Ok(0)
}
