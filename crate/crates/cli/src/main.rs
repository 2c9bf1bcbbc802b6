//! `gamow-thermo`: batch front end for resonance poles, survival curves,
//! complex entropy and ladder-coefficient evolution.

mod commands;
mod config;
mod format;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::commands::Command;
use crate::config::Config;
use crate::output::{record_text, CsvLayout, Status};

/// Caps the worker threads used for grid and scan evaluation.
const THREADS_ENV: &str = "GAMOW_THERMO_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Config(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gamow-thermo", version, about = "Gamow-state resonance toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Flat `key = value` config, or a previous run record (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Reserved for randomised helpers; accepted and ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress warnings on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Resonance pole with golden-rule and diagonalisation comparisons.
    Pole,
    /// Survival amplitude and probability on a time grid, with decay regimes.
    Survival,
    /// Complex entropy on a beta grid.
    Entropy,
    /// Thermal or real-time evolution of a ladder coefficient.
    Evolve,
    /// One-axis parameter sweep over lambda, gamma or beta.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Pole => Command::Pole,
            Sub::Survival => Command::Survival,
            Sub::Entropy => Command::Entropy,
            Sub::Evolve => Command::Evolve,
            Sub::Scan => Command::Scan,
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got '{raw}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

fn write(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Status, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("--config {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut cfg = Config::parse(&text)?;
    if let Some(f) = cli.format {
        cfg.set("output.format", if f == Format::Json { "json" } else { "csv" });
    }
    let precision = cfg.precision()?;
    let json_out = cfg.choice("output.format", &["csv", "json"])? == "json";
    let layout = match (&cli.out, json_out) {
        (Some(out), false) => Some(CsvLayout::new(out)?),
        _ => None,
    };

    let pool = thread_pool()?;
    let outcome = pool.install(|| commands::run(cli.command.into(), &cfg))?;
    let record = outcome.record(cfg.echo(), precision);

    if json_out {
        let text = record_text(&record);
        match &cli.out {
            Some(out) => write(out, &text)?,
            None => print!("{text}"),
        }
    } else {
        let primary = outcome.tables.first().map(|t| t.to_csv(precision)).transpose()?;
        match &layout {
            Some(layout) => {
                write(&layout.primary, primary.as_deref().unwrap_or(""))?;
                for table in outcome.tables.iter().skip(1) {
                    write(&layout.table(table.name), &table.to_csv(precision)?)?;
                }
                write(&layout.record, &record_text(&record))?;
            }
            None => print!("{}", primary.unwrap_or_default()),
        }
    }
    std::io::stdout().flush().map_err(|e| CliError::Io(e.to_string()))?;

    if !cli.quiet {
        for w in &outcome.warnings {
            eprintln!("warning: {w}");
        }
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: numerical failure: {e}");
    }
    Ok(outcome.status())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Status::Failed) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
