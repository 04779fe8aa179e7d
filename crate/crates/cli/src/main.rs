mod config;
mod json;
mod random_system;
mod signals;
mod simulate;
mod transfer;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::Flavor;

#[derive(Parser)]
#[command(name = "fmsys", version, about = "Simulate and verify dissipative Fornasini-Marchesini systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the recursion and write the trajectory with per-level energy balance.
    Simulate(simulate::Args),
    /// Evaluate F and W at points of the ball or at row contractions.
    Transfer(transfer::Args),
    /// Run the property suite; exit 1 if any property fails.
    Verify(verify::Args),
    /// Write a seeded random dissipative system description.
    RandomSystem(random_system::Args),
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn write_csv(path: &PathBuf, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn flavor_or(config: Flavor, flag: Option<Flavor>) -> Flavor {
    flag.unwrap_or(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate::run(&a).map(|()| true),
        Command::Transfer(a) => transfer::run(&a).map(|()| true),
        Command::Verify(a) => verify::run(&a),
        Command::RandomSystem(a) => random_system::run(&a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
