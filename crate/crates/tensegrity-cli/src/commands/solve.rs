//! `tsg solve` — all equilibria at a single parameter point.

use std::path::PathBuf;

use clap::Args;

use crate::config::{parse_format, ConfigDelta, JobConfig, OutputFormat};
use crate::errors::CliResult;
use crate::output::{solve_report, write_solve_json, write_solve_table};

use super::{build_geometry, build_loading, solve_point, MechanismFlags, Sink};

/// Solve the equilibrium problem at one parameter point and print every
/// equilibrium with its stability certificate.
#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Config file (flat key = value lines); flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub mech: MechanismFlags,
    /// Actuator input: base width A1A2 [default: 1]
    #[arg(long, value_name = "LEN", allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Output format: table or json [default: table]
    #[arg(long, value_name = "FMT")]
    pub format: Option<String>,
    /// Output path [default: stdout]
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Multistart seed-grid resolution per angle (l0 > 0 only)
    /// [default: 24]
    #[arg(long, value_name = "N")]
    pub seed_grid: Option<usize>,
    /// Multistart iteration cap per trajectory (l0 > 0 only)
    /// [default: 80]
    #[arg(long, value_name = "N")]
    pub max_iterations: Option<usize>,
}

impl SolveArgs {
    fn delta(&self) -> CliResult<ConfigDelta> {
        let mut d = self.mech.delta();
        d.rho = self.rho;
        d.format = self.format.as_deref().map(parse_format).transpose()?;
        d.output = self.output.clone();
        d.seed_grid = self.seed_grid;
        d.max_iterations = self.max_iterations;
        Ok(d)
    }
}

pub fn run(args: &SolveArgs) -> CliResult<()> {
    let cfg = JobConfig::resolve("solve", args.config.as_deref(), args.delta()?)?;
    let g = build_geometry(&cfg)?;
    let l = build_loading(&cfg)?;
    let (equilibria, multistart) = solve_point(&g, &l, cfg.rho, &cfg)?;
    let ms_ref = multistart.as_ref().map(|(s, r)| (s, *r));

    let mut sink = Sink::for_path(cfg.output.as_deref())?;
    match cfg.format {
        OutputFormat::Table => {
            write_solve_table(sink.writer(), &g, &l, cfg.rho, &equilibria, ms_ref)?
        }
        OutputFormat::Json => {
            let report = solve_report(&g, &l, cfg.rho, &equilibria, ms_ref);
            write_solve_json(sink.writer(), &report)?
        }
    }
    sink.finish()
}
