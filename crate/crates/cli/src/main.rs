//! `potnet`: command-line front end for the potential-theory library.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
//! input (unreadable or invalid files, unknown vertices, invalid pairs).

mod commands;
mod input;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use potnet::io::{NetworkFile, PairFile};

use commands::Outcome;
use input::{NetworkSource, PairSource};
use report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "potnet",
    version,
    about = "Energy-space analysis of weighted networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    /// Tolerance applied to every check, replacing the per-check defaults
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the output to this file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vertex and edge counts, degrees, connectivity and the conductance bound
    Describe {
        #[command(flatten)]
        source: NetworkSource,
    },
    /// Effective resistance between two vertices
    Resistance {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long)]
        x: String,
        /// Defaults to the origin
        #[arg(long)]
        y: Option<String>,
    },
    /// Grounded dipole with unit current from x to y
    Dipole {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
    },
    /// Spectral moments of v_x - v_y
    Moments {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
    },
    /// Spectral measure of v_x - v_y
    Measure {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
    },
    /// Escape probability from x to the origin, exact and optionally simulated
    Walk {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long)]
        x: String,
        /// Number of Monte Carlo walks
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Checks on a pair of conductances b <= c
    Compare {
        #[command(flatten)]
        source: PairSource,
    },
    /// Scaling of the adjoint inclusion on the harmonic line
    Invariant {
        #[command(flatten)]
        source: PairSource,
        /// Interior vertices, comma separated; defaults to -N+1..N-1 for geometric pairs
        #[arg(long, value_delimiter = ',')]
        interior: Vec<String>,
    },
    /// Schur reduction onto the kept vertices, written as a network file
    Reduce {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
        /// Origin of the reduced network; defaults to the original origin if kept, else the first kept vertex
        #[arg(long)]
        origin: Option<String>,
    },
    /// Write a network (or pair) file
    Generate {
        #[command(flatten)]
        source: PairOrNetwork,
    },
}

#[derive(Debug, clap::Args)]
struct PairOrNetwork {
    #[command(flatten)]
    network: NetworkSource,
    /// With --c-base, write a geometric pair file instead of a network
    #[arg(long, requires = "c_base")]
    b_base: Option<f64>,
    #[arg(long, requires = "b_base")]
    c_base: Option<f64>,
}

enum Output {
    Report(Outcome),
    Text(String),
}

fn run(cli: &Cli) -> Result<Output> {
    let tol = cli.tol;
    let outcome = match &cli.command {
        Command::Describe { source } => commands::describe(&source.load()?)?,
        Command::Resistance { source, x, y } => {
            commands::resistance(&source.load()?, x, y.as_deref())?
        }
        Command::Dipole { source, x, y } => {
            commands::dipole_report(&source.load()?, x, y.as_deref())?
        }
        Command::Moments { source, x, y, kmax } => {
            commands::moments(&source.load()?, x, y.as_deref(), *kmax, tol)?
        }
        Command::Measure { source, x, y } => commands::measure(&source.load()?, x, y.as_deref())?,
        Command::Walk {
            source,
            x,
            trials,
            seed,
        } => commands::walk(&source.load()?, x, *trials, *seed, tol)?,
        Command::Compare { source } => commands::compare(&source.load()?, tol)?,
        Command::Invariant { source, interior } => {
            commands::invariant(&source.load()?, interior, tol)?
        }
        Command::Reduce {
            source,
            keep,
            origin,
        } => {
            let reduced = commands::reduce(&source.load()?, keep, origin.as_deref())?;
            return Ok(Output::Text(NetworkFile::from_network(&reduced).to_json()));
        }
        Command::Generate { source } => {
            let text = match (source.b_base, source.c_base) {
                (Some(b), Some(c)) => {
                    let n = source
                        .network
                        .family
                        .n
                        .context("a geometric pair needs --n")?;
                    let pair = potnet::comparison::ConductancePair::geometric(n, b, c)?;
                    PairFile::from_pair(&pair).to_json()
                }
                _ => NetworkFile::from_network(&source.network.load()?).to_json(),
            };
            return Ok(Output::Text(text));
        }
    };
    Ok(Output::Report(outcome))
}

fn emit(cli: &Cli, output: &Output) -> Result<()> {
    let mut buffer = Vec::new();
    match output {
        Output::Report(outcome) => outcome.report.write(cli.format, &mut buffer)?,
        Output::Text(text) => buffer.extend_from_slice(text.as_bytes()),
    }
    match &cli.out {
        Some(path) => {
            fs::write(path, &buffer).with_context(|| format!("cannot write {}", path.display()))
        }
        None => Ok(io::stdout().write_all(&buffer)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &output) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match output {
        Output::Report(outcome) if !outcome.passed => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
