//! Job configuration: defaults, flat key=value config files, and CLI-flag
//! overrides.
//!
//! Precedence (lowest to highest): built-in defaults, config file given
//! with `--config`, individual command-line flags. Config files are plain
//! text, one `key = value` pair per line; `#` starts a comment; unknown
//! keys are rejected so typos cannot silently fall back to defaults.

use std::path::{Path, PathBuf};

use tensegrity_solver::atlas::SliceParam;

use crate::errors::{CliError, CliResult};

/// How `solve` serializes its equilibrium list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Human-readable table (angles in radians and degrees).
    Table,
    /// One JSON document (radians only).
    Json,
}

/// Whether `classify` checks detected boundaries against the built-in
/// boundary varieties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyVarieties {
    None,
    Builtin,
}

/// Fully resolved job configuration; every field has a documented default.
#[derive(Debug, Clone)]
pub struct JobConfig {
    // Geometry (defaults L1 = 1, k = 100 match the baseline mechanism).
    pub l1: f64,
    pub l2: f64,
    pub k: f64,
    pub l0: f64,
    // Loading.
    pub f3: f64,
    pub f4: f64,
    pub f3x: f64,
    pub f4x: f64,
    // Point solve.
    pub rho: f64,
    pub format: OutputFormat,
    /// Where `solve` writes its output; `None` = stdout.
    pub output: Option<PathBuf>,
    // 1-D actuator sweep.
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_count: usize,
    /// Where `sweep` writes its CSV; `None` = stdout (summary then goes
    /// to stderr so stdout stays parseable).
    pub sweep_out: Option<PathBuf>,
    // 2-D slice classification.
    pub axis1: SliceParam,
    pub axis1_min: f64,
    pub axis1_max: f64,
    pub axis1_count: usize,
    pub axis2: SliceParam,
    pub axis2_min: f64,
    pub axis2_max: f64,
    pub axis2_count: usize,
    pub csv_out: PathBuf,
    pub svg_out: PathBuf,
    pub verify_varieties: VerifyVarieties,
    // Multistart tunables (only used when l0 > 0).
    pub seed_grid: usize,
    pub max_iterations: usize,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            l1: 1.0,
            l2: 1.0,
            k: 100.0,
            l0: 0.0,
            f3: 0.0,
            f4: 0.0,
            f3x: 0.0,
            f4x: 0.0,
            rho: 1.0,
            format: OutputFormat::Table,
            output: None,
            rho_min: 0.01,
            rho_max: 2.0,
            rho_count: 400,
            sweep_out: None,
            axis1: SliceParam::Rho,
            axis1_min: 0.05,
            axis1_max: 2.0,
            axis1_count: 121,
            axis2: SliceParam::L2,
            axis2_min: 0.05,
            axis2_max: 3.0,
            axis2_count: 121,
            csv_out: PathBuf::from("classify.csv"),
            svg_out: PathBuf::from("classify.svg"),
            verify_varieties: VerifyVarieties::None,
            seed_grid: 24,
            max_iterations: 80,
        }
    }
}

/// A partial configuration: only the keys that were actually given.
/// Applied over the defaults (config file first, then CLI flags).
#[derive(Debug, Clone, Default)]
pub struct ConfigDelta {
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub k: Option<f64>,
    pub l0: Option<f64>,
    pub f3: Option<f64>,
    pub f4: Option<f64>,
    pub f3x: Option<f64>,
    pub f4x: Option<f64>,
    pub rho: Option<f64>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub rho_count: Option<usize>,
    pub sweep_out: Option<PathBuf>,
    pub axis1: Option<SliceParam>,
    pub axis1_min: Option<f64>,
    pub axis1_max: Option<f64>,
    pub axis1_count: Option<usize>,
    pub axis2: Option<SliceParam>,
    pub axis2_min: Option<f64>,
    pub axis2_max: Option<f64>,
    pub axis2_count: Option<usize>,
    pub csv_out: Option<PathBuf>,
    pub svg_out: Option<PathBuf>,
    pub verify_varieties: Option<VerifyVarieties>,
    pub seed_grid: Option<usize>,
    pub max_iterations: Option<usize>,
}

impl JobConfig {
    /// Overlay the given keys onto this configuration.
    pub fn apply(&mut self, d: ConfigDelta) {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = d.$field { self.$field = v; })*
            };
        }
        take!(
            l1, l2, k, l0, f3, f4, f3x, f4x, rho, format, rho_min, rho_max,
            rho_count, axis1, axis1_min, axis1_max, axis1_count, axis2,
            axis2_min, axis2_max, axis2_count, csv_out, svg_out,
            verify_varieties, seed_grid, max_iterations,
        );
        if d.output.is_some() {
            self.output = d.output;
        }
        if d.sweep_out.is_some() {
            self.sweep_out = d.sweep_out;
        }
    }

    /// Merge defaults, an optional config file, and CLI-flag overrides.
    pub fn resolve(
        command: &str,
        file: Option<&Path>,
        flags: ConfigDelta,
    ) -> CliResult<Self> {
        let mut cfg = JobConfig::default();
        if let Some(path) = file {
            cfg.apply(parse_config_file(path, command)?);
        }
        cfg.apply(flags);
        Ok(cfg)
    }
}

pub fn parse_format(s: &str) -> CliResult<OutputFormat> {
    match s {
        "table" => Ok(OutputFormat::Table),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::Config(format!(
            "unknown format `{other}` (expected `table` or `json`)"
        ))),
    }
}

pub fn parse_axis_param(s: &str) -> CliResult<SliceParam> {
    for p in [
        SliceParam::Rho,
        SliceParam::L2,
        SliceParam::F3,
        SliceParam::F4,
        SliceParam::F3F4,
    ] {
        if s == p.name() {
            return Ok(p);
        }
    }
    Err(CliError::Config(format!(
        "unknown axis parameter `{s}` (expected one of rho, L2, F3, F4, F3F4)"
    )))
}

pub fn parse_verify(s: &str) -> CliResult<VerifyVarieties> {
    match s {
        "none" => Ok(VerifyVarieties::None),
        "builtin" => Ok(VerifyVarieties::Builtin),
        other => Err(CliError::Config(format!(
            "unknown verify-varieties mode `{other}` (expected `none` or `builtin`)"
        ))),
    }
}

fn parse_f64(key: &str, value: &str) -> CliResult<f64> {
    let v: f64 = value.parse().map_err(|_| {
        CliError::Config(format!("key `{key}`: expected a number, got `{value}`"))
    })?;
    if !v.is_finite() {
        return Err(CliError::Config(format!(
            "key `{key}`: value must be finite, got `{value}`"
        )));
    }
    Ok(v)
}

fn parse_usize(key: &str, value: &str) -> CliResult<usize> {
    value.parse().map_err(|_| {
        CliError::Config(format!(
            "key `{key}`: expected a non-negative integer, got `{value}`"
        ))
    })
}

/// Parse a flat key=value config file. `command` is the subcommand being
/// run; a `command` key in the file, when present, must match it.
pub fn parse_config_file(path: &Path, command: &str) -> CliResult<ConfigDelta> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io_at(path, e))?;
    let mut d = ConfigDelta::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "command" => {
                if value != command {
                    return Err(CliError::Config(format!(
                        "config file is for command `{value}` but `{command}` was invoked"
                    )));
                }
            }
            "L1" => d.l1 = Some(parse_f64(key, value)?),
            "L2" => d.l2 = Some(parse_f64(key, value)?),
            "k" => d.k = Some(parse_f64(key, value)?),
            "l0" => d.l0 = Some(parse_f64(key, value)?),
            "F3" => d.f3 = Some(parse_f64(key, value)?),
            "F4" => d.f4 = Some(parse_f64(key, value)?),
            "F3x" => d.f3x = Some(parse_f64(key, value)?),
            "F4x" => d.f4x = Some(parse_f64(key, value)?),
            "rho" => d.rho = Some(parse_f64(key, value)?),
            "format" => d.format = Some(parse_format(value)?),
            "output" => d.output = Some(PathBuf::from(value)),
            "rho_min" => d.rho_min = Some(parse_f64(key, value)?),
            "rho_max" => d.rho_max = Some(parse_f64(key, value)?),
            "rho_count" => d.rho_count = Some(parse_usize(key, value)?),
            "sweep_out" => d.sweep_out = Some(PathBuf::from(value)),
            "axis1" => d.axis1 = Some(parse_axis_param(value)?),
            "axis1_min" => d.axis1_min = Some(parse_f64(key, value)?),
            "axis1_max" => d.axis1_max = Some(parse_f64(key, value)?),
            "axis1_count" => d.axis1_count = Some(parse_usize(key, value)?),
            "axis2" => d.axis2 = Some(parse_axis_param(value)?),
            "axis2_min" => d.axis2_min = Some(parse_f64(key, value)?),
            "axis2_max" => d.axis2_max = Some(parse_f64(key, value)?),
            "axis2_count" => d.axis2_count = Some(parse_usize(key, value)?),
            "csv_out" => d.csv_out = Some(PathBuf::from(value)),
            "svg_out" => d.svg_out = Some(PathBuf::from(value)),
            "verify_varieties" => d.verify_varieties = Some(parse_verify(value)?),
            "seed_grid" => d.seed_grid = Some(parse_usize(key, value)?),
            "max_iterations" => d.max_iterations = Some(parse_usize(key, value)?),
            other => {
                return Err(CliError::Config(format!(
                    "{}:{}: unknown config key `{other}`",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }
    Ok(d)
}
