//! Command line front end: reads a scenario file, runs one analysis and
//! writes a table or CSV report.

pub mod commands;
mod error;
pub mod report;
pub mod scenario;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use pandemic_games::mask::HealthStatus;
use pandemic_games::Execution;

pub use error::CliError;
pub use report::{Format, Report};
pub use scenario::{parse_scenario, ScenarioFile};
pub use verify::{Check, Checks};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Pair games: equilibria, social optima, dominant actions.
    MaskBasic,
    /// Mask decision under an unknown infection status.
    MaskBayesian,
    /// Mixed mask use with imperfect masks.
    MaskEfficiency,
    /// Go-out versus stay-home decision.
    Distancing,
    /// Best meeting exposure and the resulting decision.
    MeetingOpt,
    /// Meeting objective sampled over the exposure grid.
    Curves,
    /// Evaluate and rank policy sets.
    PolicyCompare,
}

#[derive(Debug, Parser)]
#[command(name = "pandemic", version, about = "Game-theoretic pandemic scenario analysis")]
pub struct Cli {
    /// Analysis to run.
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Override [meeting].grid_steps.
    #[arg(long)]
    pub grid_steps: Option<usize>,
    /// Cross-check results against brute-force oracles.
    #[arg(long)]
    pub verify: bool,
    /// Decimals (table) or significant digits (csv).
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// Comma-separated statuses for the many-player mask game (mask-basic),
    /// e.g. `s,i,s`.
    #[arg(long, value_delimiter = ',')]
    pub statuses: Option<Vec<HealthStatus>>,
    /// Run sweeps on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    /// Rendered report.
    pub text: String,
    /// Cross-check results; empty unless `--verify` was given.
    pub checks: Checks,
}

/// Parses the scenario, runs the command and renders the report.
pub fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    let file = ScenarioFile::load(&cli.scenario)?;
    let ctx = commands::Context {
        file: &file,
        grid_steps: cli.grid_steps,
        statuses: cli.statuses.as_deref(),
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
        verify: cli.verify,
    };
    let mut checks = Checks::default();
    let report = match cli.command {
        Command::MaskBasic => commands::mask_basic(&ctx, &mut checks),
        Command::MaskBayesian => commands::mask_bayesian(&ctx, &mut checks),
        Command::MaskEfficiency => commands::mask_efficiency(&ctx, &mut checks),
        Command::Distancing => commands::distancing(&ctx, &mut checks),
        Command::MeetingOpt => commands::meeting_opt(&ctx, &mut checks),
        Command::Curves => commands::curves(&ctx, &mut checks),
        Command::PolicyCompare => commands::policy_compare(&ctx, &mut checks),
    }?;
    Ok(RunOutput {
        text: report.render(cli.format, cli.precision),
        checks,
    })
}
