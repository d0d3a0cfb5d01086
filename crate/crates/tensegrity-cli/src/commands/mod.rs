//! The four batch commands: `solve`, `sweep`, `classify`, `repro`.

pub mod classify;
pub mod repro;
pub mod solve;
pub mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;

use tensegrity_solver::freelength::{
    solve_freelength_with, FreeLengthOptions, MultistartStats,
};
use tensegrity_solver::{Equilibrium, Geometry, Loading};

use crate::config::{ConfigDelta, JobConfig};
use crate::errors::{CliError, CliResult};

/// Mechanism parameters shared by every command; each flag overrides the
/// same-named config-file key.
#[derive(Args, Debug, Default, Clone)]
pub struct MechanismFlags {
    /// Length of strut A1A3 [default: 1]
    #[arg(long = "L1", value_name = "LEN", allow_negative_numbers = true)]
    pub l1: Option<f64>,
    /// Length of strut A2A4 [default: 1]
    #[arg(long = "L2", value_name = "LEN", allow_negative_numbers = true)]
    pub l2: Option<f64>,
    /// Stiffness shared by the three springs [default: 100]
    #[arg(long, value_name = "STIFFNESS", allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Spring free length; 0 selects the polynomial solver, positive
    /// values the multistart solver [default: 0]
    #[arg(long, value_name = "LEN", allow_negative_numbers = true)]
    pub l0: Option<f64>,
    /// Vertical force at node A3 (negative presses down) [default: 0]
    #[arg(long = "F3", value_name = "FORCE", allow_negative_numbers = true)]
    pub f3: Option<f64>,
    /// Vertical force at node A4 (negative presses down) [default: 0]
    #[arg(long = "F4", value_name = "FORCE", allow_negative_numbers = true)]
    pub f4: Option<f64>,
    /// Horizontal force at node A3 [default: 0]
    #[arg(long = "F3x", value_name = "FORCE", allow_negative_numbers = true)]
    pub f3x: Option<f64>,
    /// Horizontal force at node A4 [default: 0]
    #[arg(long = "F4x", value_name = "FORCE", allow_negative_numbers = true)]
    pub f4x: Option<f64>,
}

impl MechanismFlags {
    pub fn delta(&self) -> ConfigDelta {
        ConfigDelta {
            l1: self.l1,
            l2: self.l2,
            k: self.k,
            l0: self.l0,
            f3: self.f3,
            f4: self.f4,
            f3x: self.f3x,
            f4x: self.f4x,
            ..ConfigDelta::default()
        }
    }
}

pub(crate) fn build_geometry(cfg: &JobConfig) -> CliResult<Geometry> {
    Ok(Geometry::new(cfg.l1, cfg.l2, cfg.k, cfg.l0)?)
}

pub(crate) fn build_loading(cfg: &JobConfig) -> CliResult<Loading> {
    Ok(Loading::new(cfg.f3, cfg.f4, cfg.f3x, cfg.f4x)?)
}

/// Equilibria at one parameter point plus, when the multistart solver
/// ran, its campaign statistics and short-spring rejection count.
pub(crate) type PointSolution =
    (Vec<Equilibrium>, Option<(MultistartStats, usize)>);

/// Solve one parameter point, honoring the configured multistart
/// tunables when the free length routes to the multistart solver.
pub(crate) fn solve_point(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    cfg: &JobConfig,
) -> tensegrity_solver::Result<PointSolution> {
    if g.l0 > 0.0 {
        let opts = FreeLengthOptions {
            seed_grid: cfg.seed_grid,
            max_iterations: cfg.max_iterations,
            warm_start: true,
        };
        let r = solve_freelength_with(g, l, rho, &opts)?;
        Ok((r.equilibria, Some((r.multistart_stats, r.rejected_short_spring))))
    } else {
        Ok((tensegrity_solver::solve_equilibria(g, l, rho)?, None))
    }
}

/// Open `path` for buffered writing, mapping failures to the I/O exit
/// code with the offending path in the message.
pub(crate) fn create_file(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| CliError::io_at(path, e))?,
    ))
}

/// Either a file or stdout, chosen by the configured output path.
pub(crate) enum Sink {
    File(PathBuf, BufWriter<File>),
    Stdout(std::io::Stdout),
}

impl Sink {
    pub fn for_path(path: Option<&Path>) -> CliResult<Self> {
        match path {
            Some(p) => Ok(Sink::File(p.to_path_buf(), create_file(p)?)),
            None => Ok(Sink::Stdout(std::io::stdout())),
        }
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::File(_, f) => f,
            Sink::Stdout(s) => s,
        }
    }

    /// Flush, reporting the path on failure.
    pub fn finish(self) -> CliResult<()> {
        match self {
            Sink::File(path, mut f) => {
                f.flush().map_err(|e| CliError::io_at(&path, e))
            }
            Sink::Stdout(mut s) => Ok(s.flush()?),
        }
    }

    /// True when output goes to a file (summaries then print to stdout;
    /// otherwise they go to stderr to keep stdout parseable).
    pub fn is_file(&self) -> bool {
        matches!(self, Sink::File(..))
    }
}
