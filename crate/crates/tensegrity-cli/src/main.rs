//! `tsg` — batch analysis of a one-degree-of-freedom planar tensegrity
//! mechanism (two crossed struts, three springs, prismatic base
//! actuator).
//!
//! Subcommands: `solve` (all equilibria at one parameter point), `sweep`
//! (1-D actuator sweep + operation range), `classify` (2-D parameter
//! slice region map), `repro` (full reproduction suite).
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver degeneracy,
//! 3 I/O error.

mod commands;
mod config;
mod errors;
mod output;
mod svg;

use clap::Parser;

use errors::{CliResult, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(
    name = "tsg",
    version,
    about = "Equilibrium analysis of a planar two-strut, three-spring tensegrity mechanism",
    long_about = "Finds every static equilibrium of a one-degree-of-freedom planar \
tensegrity mechanism (struts A1A3, A2A4; springs A1A4, A2A3, A3A4; prismatic \
actuator driving the base width rho), classifies stability from the energy \
Hessian, sweeps the actuator, and maps stable-solution counts over 2-D \
parameter slices.\n\nAll commands accept a flat key = value config file via \
--config; individual flags override file values. Exit codes: 0 success, \
1 configuration error, 2 solver degeneracy, 3 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand, Debug)]
enum Command {
    Solve(commands::solve::SolveArgs),
    Sweep(commands::sweep::SweepArgs),
    Classify(commands::classify::ClassifyArgs),
    Repro(commands::repro::ReproArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(args) => commands::solve::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Classify(args) => commands::classify::run(args),
        Command::Repro(args) => commands::repro::run(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // Help and version requests are not errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            // Usage errors are configuration errors (clap's own default
            // exit code would collide with the solver-degeneracy code).
            eprint!("{e}");
            std::process::exit(EXIT_CONFIG);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
