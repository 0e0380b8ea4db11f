//! Command dispatch and the exit-code contract:
//! 0 success, 2 validation failure, 3 infeasible plan, 4 runtime failure.

mod commands;
mod opts;

use clap::Parser;

use opts::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Infeasible(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Infeasible(m) | CliError::Runtime(m) => m,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Region(common) => {
            let rc = opts::resolve(common, None, None)?;
            commands::cmd_region(&rc)
        }
        Command::Plan(plan) => {
            let rc = opts::resolve(&plan.common, Some(plan), None)?;
            commands::cmd_plan(&rc)
        }
        Command::Simulate(sim) => {
            let rc = opts::resolve(&sim.plan.common, Some(&sim.plan), Some(sim))?;
            commands::cmd_simulate(&rc)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
