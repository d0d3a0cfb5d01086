//! `tsg sweep` — 1-D actuator sweep with per-branch CSV output and the
//! two-stable operation-range summary.

use std::path::PathBuf;

use clap::Args;

use tensegrity_solver::atlas::{AxisSpec, CellFlag, CellRecord, RhoSweep, SliceParam};
use tensegrity_solver::exec::par_map;
use tensegrity_solver::{Equilibrium, Error as SolverError, Stability};

use crate::config::{ConfigDelta, JobConfig};
use crate::errors::CliResult;
use crate::output::{intervals_text, mechanism_summary, write_sweep_csv};

use super::{build_geometry, build_loading, solve_point, MechanismFlags, Sink};

/// Sweep the actuator input over a range, writing one CSV row per
/// (rho, solution branch) and summarizing the 2-stable intervals.
#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Config file (flat key = value lines); flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub mech: MechanismFlags,
    /// Sweep start [default: 0.01]
    #[arg(long, value_name = "LEN", allow_negative_numbers = true)]
    pub rho_min: Option<f64>,
    /// Sweep end [default: 2]
    #[arg(long, value_name = "LEN", allow_negative_numbers = true)]
    pub rho_max: Option<f64>,
    /// Number of sweep nodes, endpoints included [default: 400]
    #[arg(long, value_name = "N")]
    pub rho_count: Option<usize>,
    /// CSV output path [default: stdout, summary then goes to stderr]
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

impl SweepArgs {
    fn delta(&self) -> ConfigDelta {
        let mut d = self.mech.delta();
        d.rho_min = self.rho_min;
        d.rho_max = self.rho_max;
        d.rho_count = self.rho_count;
        d.sweep_out = self.output.clone();
        d
    }
}

/// One sweep CSV row: the actuator value, the branch index at that
/// node, and the branch's equilibrium.
pub(crate) type SweepRow = (f64, usize, Equilibrium);

/// Solve every sweep node. Returns the CSV rows (branches in the
/// solver's deterministic order) and the per-node records feeding the
/// interval extraction. Nodes where parameters are invalid or the solver
/// degenerates become flagged cells instead of aborting the sweep.
pub(crate) fn run_sweep(
    cfg: &JobConfig,
    axis: &AxisSpec,
) -> CliResult<(Vec<SweepRow>, RhoSweep)> {
    let g = build_geometry(cfg)?;
    let l = build_loading(cfg)?;
    let nodes: Vec<f64> = (0..axis.count).map(|i| axis.value(i)).collect();
    let results = par_map(nodes.clone(), |rho| {
        solve_point(&g, &l, rho, cfg).map(|(eqs, _)| eqs)
    });

    let mut rows = Vec::new();
    let mut cells = Vec::with_capacity(axis.count);
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(equilibria) => {
                let stable_configs: Vec<_> = equilibria
                    .iter()
                    .filter(|e| e.stability == Stability::Stable)
                    .map(|e| e.config)
                    .collect();
                cells.push(CellRecord {
                    stable_count: stable_configs.len(),
                    total_count: equilibria.len(),
                    flag: CellFlag::Ok,
                    stable_configs,
                });
                for (branch, e) in equilibria.into_iter().enumerate() {
                    rows.push((nodes[i], branch, e));
                }
            }
            Err(SolverError::InvalidParameter(_)) => cells.push(CellRecord {
                stable_count: 0,
                total_count: 0,
                flag: CellFlag::InvalidParams,
                stable_configs: Vec::new(),
            }),
            Err(_) => cells.push(CellRecord {
                stable_count: 0,
                total_count: 0,
                flag: CellFlag::SolverFailed,
                stable_configs: Vec::new(),
            }),
        }
    }
    Ok((rows, RhoSweep { axis: *axis, cells }))
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let cfg = JobConfig::resolve("sweep", args.config.as_deref(), args.delta())?;
    let axis =
        AxisSpec::new(SliceParam::Rho, cfg.rho_min, cfg.rho_max, cfg.rho_count)?;
    let (rows, sweep) = run_sweep(&cfg, &axis)?;

    let g = build_geometry(&cfg)?;
    let l = build_loading(&cfg)?;
    let summary = format!(
        "sweep: {} nodes, rho in [{}, {}] | {} | {}",
        axis.count,
        axis.min,
        axis.max,
        mechanism_summary(&g, &l),
        intervals_text(&sweep)
    );

    let mut sink = Sink::for_path(cfg.sweep_out.as_deref())?;
    let to_file = sink.is_file();
    write_sweep_csv(sink.writer(), &rows)?;
    sink.finish()?;
    if to_file {
        println!("{summary}");
        println!("wrote {}", cfg.sweep_out.as_deref().unwrap().display());
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
