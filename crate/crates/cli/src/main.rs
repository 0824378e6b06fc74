//! `cfsk`: bounds, receiver simulation, and parameter scans for M-ary
//! coherent frequency-shift keying over one optical pulse.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::CommandOutput;
use crate::error::CliError;
use crate::output::{OutputFormat, ResultDocument, BUILD_ID, SCHEMA_VERSION};

/// Seed used when neither the flags nor the config file set one.
pub const DEFAULT_SEED: u64 = 42;

/// Overrides the worker thread count when --threads is not given.
pub const THREADS_ENV_VAR: &str = "CFSK_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cfsk",
    version,
    about = "Error bounds and receiver simulation for coherent frequency-shift keying"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct GlobalArgs {
    /// TOML config file; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed (results are reproducible per seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; never changes emitted numbers
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Helstrom and shot-noise error bounds per constellation
    Bounds(commands::BoundsArgs),
    /// Monte Carlo symbol error rate of the adaptive CFSK receiver
    Ser(commands::SerArgs),
    /// Map SER or the Helstrom bound over the (dwt, dtheta) grid
    Sweep(commands::SweepArgs),
    /// CFSK against reference constellations across pulse energies
    ScanEnergy(commands::ScanEnergyArgs),
    /// CFSK against PSK across alphabet sizes at fixed energy per bit
    ScanAlphabet(commands::ScanAlphabetArgs),
    /// CFSK/PSK Helstrom bound ratio over energy and alphabet size
    RatioMap(commands::RatioMapArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bounds(_) => "bounds",
            Command::Ser(_) => "ser",
            Command::Sweep(_) => "sweep",
            Command::ScanEnergy(_) => "scan-energy",
            Command::ScanAlphabet(_) => "scan-alphabet",
            Command::RatioMap(_) => "ratio-map",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file = config::load(cli.global.config.as_deref())?;
    let seed = cli.global.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let threads = resolve_threads(cli.global.threads, file.threads)?;
    apply_threads(threads)?;
    let format = cli
        .global
        .format
        .or(file.format)
        .unwrap_or(OutputFormat::Csv);
    let out_path = cli.global.out.clone().or_else(|| file.out.clone());

    let started = Instant::now();
    let output = match &cli.command {
        Command::Bounds(args) => commands::bounds(args, &file, seed, threads)?,
        Command::Ser(args) => commands::ser(args, &file, seed, threads)?,
        Command::Sweep(args) => commands::sweep(args, &file, seed, threads)?,
        Command::ScanEnergy(args) => commands::scan_energy_cmd(args, &file, seed, threads)?,
        Command::ScanAlphabet(args) => commands::scan_alphabet_cmd(args, &file, seed, threads)?,
        Command::RatioMap(args) => commands::ratio_map(args, &file, seed, threads)?,
    };
    let duration_seconds = started.elapsed().as_secs_f64();

    let text = match format {
        OutputFormat::Csv => {
            for note in &output.notes {
                eprintln!("{note}");
            }
            output.csv.clone()
        }
        OutputFormat::Doc => render_doc(cli.command.name(), &output, duration_seconds)?,
    };
    write_output(out_path.as_deref(), &text)
}

fn render_doc(
    command: &str,
    output: &CommandOutput,
    duration_seconds: f64,
) -> Result<String, CliError> {
    let doc = ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        build: BUILD_ID.to_string(),
        config: output.config.clone(),
        duration_seconds,
        results: output.results.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Io(format!("cannot serialize result document: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Thread count precedence: --threads, then the config file, then the
/// environment variable. `None` leaves the pool at its default size
/// (available parallelism).
fn resolve_threads(flag: Option<usize>, file: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag.or(file) {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV_VAR) {
        Ok(s) => {
            let n: usize = s.parse().map_err(|_| {
                CliError::Config(format!("{THREADS_ENV_VAR} must be an integer, got {s:?}"))
            })?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

#[cfg(feature = "parallel")]
fn apply_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("thread count must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn apply_threads(threads: Option<usize>) -> Result<(), CliError> {
    match threads {
        Some(0) => Err(CliError::Config("thread count must be >= 1".into())),
        _ => Ok(()),
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
