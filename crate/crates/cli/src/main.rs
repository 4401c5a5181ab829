//! Command-line front end: input design, excitation checks, data-driven
//! simulation queries and the stabilization comparison.
//!
//! Exit codes: 0 success, 1 verification failed, 2 usage or configuration
//! error, 3 I/O or parse error.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ScenarioConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pe-excite", version, about = "Persistently exciting input design and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Design excitation inputs and write the plan and experiment CSVs.
    Design(Scenario),
    /// Check excitation of recorded series, optionally after basis lifting.
    Verify(Scenario),
    /// Test whether a query input/output window is a system trajectory.
    Membership(Scenario),
    /// Predict outputs for a query input from initial outputs.
    Predict(Scenario),
    /// Run the three-strategy stabilization comparison.
    Table1(Scenario),
}

#[derive(Debug, Args)]
struct Scenario {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    cfg: ScenarioConfig,
}

impl Scenario {
    fn resolve(self) -> Result<ScenarioConfig, CliError> {
        match &self.config {
            Some(path) => Ok(self.cfg.merge(ScenarioConfig::load(path)?)),
            None => Ok(self.cfg),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design(s) => commands::design(&s.resolve()?),
        Command::Verify(s) => commands::verify(&s.resolve()?),
        Command::Membership(s) => commands::membership_cmd(&s.resolve()?),
        Command::Predict(s) => commands::predict_cmd(&s.resolve()?),
        Command::Table1(s) => commands::table1(&s.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
