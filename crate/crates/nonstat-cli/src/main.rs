// SPDX-License-Identifier: MIT OR Apache-2.0

#![forbid(unsafe_code)]

//! Command-line front end for the `nonstat` library.
//!
//! Two subcommands:
//!
//! * `run --config <path> [--seed S] [--out DIR] [--threads T]` — execute a
//!   config-described Monte Carlo experiment and write a results CSV plus a
//!   run manifest (JSON) into the output directory.
//! * `analyze --input <csv> --m INT --h FLOAT --alpha FLOAT
//!   --bootstrap INT [--periods P1,P2] [--seed S] [--out DIR]` — run the
//!   single-series pipeline (change-point test, simultaneous confidence
//!   band, residuals, optional harmonic-trend assessment) and print a JSON
//!   report to stdout.
//!
//! Exit codes: 0 success; 2 configuration or usage error; 3 data error
//! (unreadable or malformed input series, unwritable output); 4 numerical
//! failure. Outputs are deterministic for a fixed seed: re-running `run`
//! with the same config and seed produces byte-identical result CSVs, and
//! `analyze` prints byte-identical reports. Result files are written via a
//! temporary name and renamed into place, so a crash never leaves a
//! partial results file behind.

mod config;
mod input;
mod output;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use nonstat::experiments::{analyze_series, run_experiment};
use nonstat::series::default_block_length;
use nonstat::{Error, TimeSeries};

use crate::config::Manifest;

/// Inference for non-stationary time series: experiment runner and
/// single-series analysis pipeline.
#[derive(Debug, Parser)]
#[command(name = "nonstat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a config-described Monte Carlo experiment.
    Run(RunArgs),
    /// Analyze one observed series from a CSV file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Path to a flat key-value config file (see `config` module docs).
    #[arg(long)]
    config: PathBuf,
    /// Override the config file's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config file's `output` entry.
    /// Defaults to the current directory if neither is given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for replication-level parallelism; results are
    /// identical for any value.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Input CSV with header `time,value` (strictly increasing time) or
    /// `index,value` (consecutive integers).
    #[arg(long)]
    input: PathBuf,
    /// Block length for the running-variance estimator: a positive
    /// integer, or `auto` for the floor(n^(1/3)) default.
    #[arg(long)]
    m: String,
    /// Smoothing bandwidth on the unit design interval, in (0, 1).
    #[arg(long)]
    h: f64,
    /// Level: the band has simultaneous coverage 1 - alpha and the test
    /// has nominal size alpha.
    #[arg(long)]
    alpha: f64,
    /// Bootstrap draws behind the critical value and the band width.
    #[arg(long)]
    bootstrap: usize,
    /// Comma-separated harmonic periods in the input file's time units
    /// (e.g. `208,50` for calendar-year data). When given, the report
    /// includes a linear-plus-harmonics trend fit and whether the band
    /// rejects it.
    #[arg(long, value_delimiter = ',')]
    periods: Vec<f64>,
    /// Seed for the bootstrap randomness (default 0).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as `report.json` in this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the bootstrap; results are identical for any
    /// value.
    #[arg(long)]
    threads: Option<usize>,
}

/// CLI-level failure carrying the process exit code.
#[derive(Debug)]
enum CliError {
    /// Bad configuration, flags, or argument preconditions (exit 2).
    Config(String),
    /// Unreadable or malformed data, or an output file that cannot be
    /// written (exit 3).
    Data(String),
    /// A numerical procedure failed (exit 4).
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => CliError::Config(msg),
            Error::Data(msg) => CliError::Data(msg),
            Error::Numerical(msg) => CliError::Numerical(msg),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run_command(&args),
        Command::Analyze(args) => analyze_command(&args),
    };
    if let Err(e) = outcome {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

/// Configure the global worker pool. Must run before any parallel work;
/// a second configuration attempt in the same process is rejected, which
/// cannot happen here because each subcommand calls this exactly once.
fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure {t} threads: {e}")))?;
    }
    Ok(())
}

fn run_command(args: &RunArgs) -> Result<(), CliError> {
    configure_threads(args.threads)?;
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::Config(format!(
            "cannot read config file {}: {e}",
            args.config.display()
        ))
    })?;
    let mut config = config::parse_config(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output = Some(out.display().to_string());
    }

    let started = Instant::now();
    let table = run_experiment(&config)?;
    let wall_time_seconds = started.elapsed().as_secs_f64();

    let out_dir = config
        .output
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Data(format!(
            "cannot create output directory {}: {e}",
            out_dir.display()
        ))
    })?;

    let results_name = format!("{}_results.csv", config.experiment.name());
    let results_path = out_dir.join(&results_name);
    write_or_data_error(&results_path, table.to_csv().as_bytes())?;

    let manifest = Manifest::new(&config, results_name, wall_time_seconds);
    // A manifest must reproduce the run: parsing its embedded config back
    // has to give exactly the config that just executed.
    let round_trip = manifest.config.to_config().map_err(|e| {
        CliError::Config(format!("manifest does not round-trip its config: {e}"))
    })?;
    if round_trip != config {
        return Err(CliError::Config(
            "manifest does not round-trip its config (field mismatch)".into(),
        ));
    }
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Numerical(format!("cannot serialize manifest: {e}")))?;
    let manifest_path = out_dir.join("manifest.json");
    write_or_data_error(&manifest_path, manifest_json.as_bytes())?;

    println!(
        "{}: {} rows -> {} (manifest {})",
        config.experiment.name(),
        table.rows.len(),
        results_path.display(),
        manifest_path.display()
    );
    Ok(())
}

fn analyze_command(args: &AnalyzeArgs) -> Result<(), CliError> {
    configure_threads(args.threads)?;
    let text = std::fs::read_to_string(&args.input).map_err(|e| {
        CliError::Data(format!(
            "cannot read input file {}: {e}",
            args.input.display()
        ))
    })?;
    let series_input = input::parse_series_csv(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let n = series_input.values.len();

    let m = match args.m.as_str() {
        "auto" => default_block_length(n),
        s => s.parse::<usize>().map_err(|_| {
            CliError::Config(format!(
                "--m must be a positive integer or `auto`; got `{s}`"
            ))
        })?,
    };

    // The library works on the unit design grid; periods arrive in the
    // file's time units and shrink by the series' time span.
    let periods_grid: Vec<f64> = args
        .periods
        .iter()
        .map(|p| {
            if p.is_finite() && *p > 0.0 {
                Ok(p / series_input.span)
            } else {
                Err(CliError::Config(format!("--periods must be positive; got {p}")))
            }
        })
        .collect::<Result<_, _>>()?;

    let series = TimeSeries::with_grid(series_input.values.clone(), series_input.grid.clone())
        .map_err(CliError::from)?;
    let analysis = analyze_series(
        &series,
        m,
        args.h,
        args.alpha,
        args.bootstrap,
        &periods_grid,
        args.seed,
    )?;

    let report = report::build_report(
        &analysis,
        &series_input,
        report::AnalyzeSettings {
            m,
            h: args.h,
            alpha: args.alpha,
            bootstrap: args.bootstrap,
            seed: args.seed,
            periods: args.periods.clone(),
        },
    );
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Numerical(format!("cannot serialize report: {e}")))?;
    println!("{json}");

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(|e| {
            CliError::Data(format!(
                "cannot create output directory {}: {e}",
                out.display()
            ))
        })?;
        write_or_data_error(&out.join("report.json"), json.as_bytes())?;
    }
    Ok(())
}

fn write_or_data_error(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    output::write_atomic(path, bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}
