//! Command-line front end for `gamow-core`: reads a TOML potential
//! description, runs one computation, writes CSV or JSON-lines tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{Loaded, Tolerances};
pub use crate::error::CliError;
use crate::output::{write_table, Format, Header};

#[derive(Debug, Parser)]
#[command(name = "gamow", version, about = "Scattering states and resonances of piecewise-constant radial potentials")]
pub struct Cli {
    /// TOML file with `kappa`, `breakpoints`, `heights` and per-command tables.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Override a verification tolerance; repeatable.
    #[arg(long = "tolerance", global = true, value_name = "KEY=VALUE")]
    pub tolerances: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// S-matrix on a real k grid.
    Smatrix,
    /// Poles of S (zeros of the Jost function) in a fourth-quadrant rectangle.
    Resonances,
    /// A continuum eigenfunction or a Gamow state on a radial grid.
    Eigenfunction,
    /// Conjugation-symmetry criterion for measures, Jost functions and factors.
    Criterion,
    /// Run every numerical check and report pass/fail.
    Verify,
    /// Energy-representation coefficients of a Gaussian bump.
    Transform,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Smatrix => "smatrix",
            Command::Resonances => "resonances",
            Command::Eigenfunction => "eigenfunction",
            Command::Criterion => "criterion",
            Command::Verify => "verify",
            Command::Transform => "transform",
        }
    }
}

/// Execute one command; the caller maps errors to exit codes.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let loaded = Loaded::from_path(path)?;
    let tolerances = Tolerances::with_overrides(&cli.tolerances)?;
    let mut failed = 0;
    let table = match cli.command {
        Command::Smatrix => commands::smatrix(&loaded)?,
        Command::Resonances => commands::resonances(&loaded)?,
        Command::Eigenfunction => commands::eigenfunction(&loaded)?,
        Command::Criterion => commands::criterion(&loaded)?,
        Command::Verify => {
            let (t, f) = commands::verify(&loaded, &tolerances)?;
            failed = f;
            t
        }
        Command::Transform => commands::transform(&loaded)?,
    };
    let header = Header {
        command: cli.command.name(),
        config_hash: loaded.hash.clone(),
        tolerances: tolerances.summary(),
    };
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write_table(&mut *sink, &header, &table, cli.format)?;
    eprintln!(
        "gamow {}: {} rows{}",
        header.command,
        table.rows.len(),
        if table.warnings.is_empty() {
            String::new()
        } else {
            format!(", {} warning(s)", table.warnings.len())
        }
    );
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
