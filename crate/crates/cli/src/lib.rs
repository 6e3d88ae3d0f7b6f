//! Scenario runner and invariant audits for `galimech-core`.
//!
//! The binary `galimech` is a thin wrapper around [`run`].

pub mod commands;
pub mod config;
pub mod expr;
pub mod output;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::{error, warn};

use commands::CommandError;
use config::ScenarioConfig;
use suites::{Family, Suite};

#[derive(Debug, Parser)]
#[command(name = "galimech", version, about = "Galilean mechanics: trajectories, boost audits and generating families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario config (JSON). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file, written atomically. Standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides the seed of the randomized suites.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the configured motion and print the trajectory as CSV.
    Simulate {
        /// Index into the configured frames.
        #[arg(long, default_value_t = 0, value_name = "N")]
        frame: usize,
    },
    /// Compare the motion across the configured frames.
    BoostCheck {
        /// Scale sigma by 1.01 inside the checks (negative control).
        #[arg(long, hide = true)]
        corrupt_sigma: bool,
    },
    /// Hessian ranks and generated covectors of one generating family.
    MorseCheck {
        #[arg(long, value_enum, value_name = "NAME")]
        family: Family,
    },
    /// Run a property suite and print a JSON report.
    Invariants {
        #[arg(long, value_enum, default_value = "all", value_name = "NAME")]
        suite: Suite,
    },
}

fn load(common: &Common) -> Result<ScenarioConfig, CommandError> {
    match &common.config {
        Some(path) => Ok(ScenarioConfig::load(path)?),
        None => Ok(ScenarioConfig::default()),
    }
}

fn execute(cli: &Cli) -> Result<bool, CommandError> {
    let config = load(&cli.common)?;
    let seed = cli.common.seed.unwrap_or(config.seed);
    let (text, passed) = match &cli.command {
        Command::Simulate { frame } => (commands::simulate(&config, *frame)?, true),
        Command::BoostCheck { corrupt_sigma } => {
            let r = commands::boost_check(&config, *corrupt_sigma)?;
            (r.to_json(), r.passed())
        }
        Command::MorseCheck { family } => {
            let r = commands::morse_check(&config, *family, seed)?;
            (r.to_json(), r.passed())
        }
        Command::Invariants { suite } => {
            let r = commands::invariants(&config, *suite, seed)?;
            for c in r.checks.iter().filter(|c| !c.passed()) {
                warn!("{} failed: max_err {:e} > tol {:e}", c.name, c.max_err, c.tol);
            }
            (r.to_json(), r.passed())
        }
    };
    output::emit(cli.common.out.as_deref(), &text)?;
    Ok(passed)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            error!("{e}");
            eprintln!("galimech: {e}");
            e.exit_code()
        }
    }
}
