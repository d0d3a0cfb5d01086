//! CLI failure taxonomy and the process exit-code contract.

use std::fmt;

use tensegrity_solver::Error as SolverError;

/// Exit code for configuration problems (bad flags, bad config files,
/// invalid parameter values).
pub const EXIT_CONFIG: i32 = 1;
/// Exit code for solver degeneracies (the parameter point defeats the
/// numerical pipeline).
pub const EXIT_SOLVER: i32 = 2;
/// Exit code for I/O failures (unwritable output paths, unreadable
/// config files).
pub const EXIT_IO: i32 = 3;

/// Every way a CLI run can fail, each mapped to a stable exit code.
#[derive(Debug)]
pub enum CliError {
    /// The job configuration is unusable.
    Config(String),
    /// The solver hit a degenerate parameter point.
    Solver(String),
    /// Reading or writing a file failed.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }

    /// Annotate an I/O error with the path it concerns.
    pub fn io_at(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            // Parameter and slice validation reflect bad user input.
            SolverError::InvalidParameter(_) | SolverError::InvalidSlice(_) => {
                CliError::Config(e.to_string())
            }
            // Everything else is a genuine numerical failure at the
            // requested parameter point.
            SolverError::DegenerateSpring { .. }
            | SolverError::DegenerateLeadingCoefficient
            | SolverError::EliminationDegenerate
            | SolverError::InconsistentRoot { .. }
            | SolverError::DenominatorZero
            | SolverError::NotSymmetric(_) => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
