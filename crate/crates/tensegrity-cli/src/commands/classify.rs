//! `tsg classify` — 2-D parameter-slice classification: how many stable
//! equilibria exist at each grid node, merged into constant-count
//! regions, written as CSV and as a color map SVG, with optional
//! alignment verification against the built-in boundary varieties.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use tensegrity_solver::atlas::{
    classify_slice, symmetric_sextics_variety, unloaded_lines_variety,
    verify_boundaries, AxisSpec, RegionMap, SliceParam, SliceSpec,
};

use crate::config::{
    parse_axis_param, parse_verify, ConfigDelta, JobConfig, VerifyVarieties,
};
use crate::errors::{CliError, CliResult};
use crate::output::{histogram_text, stable_histogram, write_map_csv};
use crate::svg::write_region_map_svg;

use super::{build_geometry, build_loading, create_file, MechanismFlags};

/// Classify a 2-D parameter slice by number of stable equilibria and
/// write the region map as CSV + SVG.
#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Config file (flat key = value lines); flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub mech: MechanismFlags,
    /// Fixed actuator value, used unless an axis varies rho [default: 1]
    #[arg(long, value_name = "LEN", allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// First (horizontal) axis parameter: rho, L2, F3, F4, or F3F4
    /// [default: rho]
    #[arg(long, value_name = "PARAM")]
    pub axis1: Option<String>,
    /// First-axis range start [default: 0.05]
    #[arg(long, value_name = "VAL", allow_negative_numbers = true)]
    pub axis1_min: Option<f64>,
    /// First-axis range end [default: 2]
    #[arg(long, value_name = "VAL", allow_negative_numbers = true)]
    pub axis1_max: Option<f64>,
    /// First-axis node count [default: 121]
    #[arg(long, value_name = "N")]
    pub axis1_count: Option<usize>,
    /// Second (vertical) axis parameter [default: L2]
    #[arg(long, value_name = "PARAM")]
    pub axis2: Option<String>,
    /// Second-axis range start [default: 0.05]
    #[arg(long, value_name = "VAL", allow_negative_numbers = true)]
    pub axis2_min: Option<f64>,
    /// Second-axis range end [default: 3]
    #[arg(long, value_name = "VAL", allow_negative_numbers = true)]
    pub axis2_max: Option<f64>,
    /// Second-axis node count [default: 121]
    #[arg(long, value_name = "N")]
    pub axis2_count: Option<usize>,
    /// Region-map CSV path [default: classify.csv]
    #[arg(long, value_name = "FILE")]
    pub csv_out: Option<PathBuf>,
    /// Region-map SVG path [default: classify.svg]
    #[arg(long, value_name = "FILE")]
    pub svg_out: Option<PathBuf>,
    /// Check detected boundaries against the built-in varieties:
    /// none or builtin [default: none]
    #[arg(long, value_name = "MODE")]
    pub verify_varieties: Option<String>,
}

impl ClassifyArgs {
    fn delta(&self) -> CliResult<ConfigDelta> {
        let mut d = self.mech.delta();
        d.rho = self.rho;
        d.axis1 = self.axis1.as_deref().map(parse_axis_param).transpose()?;
        d.axis1_min = self.axis1_min;
        d.axis1_max = self.axis1_max;
        d.axis1_count = self.axis1_count;
        d.axis2 = self.axis2.as_deref().map(parse_axis_param).transpose()?;
        d.axis2_min = self.axis2_min;
        d.axis2_max = self.axis2_max;
        d.axis2_count = self.axis2_count;
        d.csv_out = self.csv_out.clone();
        d.svg_out = self.svg_out.clone();
        d.verify_varieties =
            self.verify_varieties.as_deref().map(parse_verify).transpose()?;
        Ok(d)
    }
}

pub(crate) fn build_slice_spec(cfg: &JobConfig) -> CliResult<SliceSpec> {
    let spec = SliceSpec {
        axis1: AxisSpec::new(cfg.axis1, cfg.axis1_min, cfg.axis1_max, cfg.axis1_count)?,
        axis2: AxisSpec::new(cfg.axis2, cfg.axis2_min, cfg.axis2_max, cfg.axis2_count)?,
        geometry: build_geometry(cfg)?,
        loading: build_loading(cfg)?,
        rho: cfg.rho,
    };
    spec.validate()?;
    Ok(spec)
}

/// Pick the built-in boundary variety matching this slice, reordered so
/// it takes `(axis1 value, axis2 value)`. Errors when no built-in
/// variety covers the slice's parameter plane.
pub(crate) fn builtin_variety(
    spec: &SliceSpec,
) -> CliResult<Box<dyn Fn(f64, f64) -> f64 + Sync>> {
    let params = (spec.axis1.param, spec.axis2.param);
    let unloaded = spec.loading.is_unloaded() && spec.geometry.l0 == 0.0;
    let symmetric_geometry = spec.geometry.l1 == 1.0
        && spec.geometry.l2 == 1.0
        && spec.geometry.k == 100.0
        && spec.geometry.l0 == 0.0
        && spec.loading.f3x == 0.0
        && spec.loading.f4x == 0.0;

    match params {
        (SliceParam::Rho, SliceParam::L2) if unloaded && spec.geometry.l1 == 1.0 => {
            Ok(Box::new(unloaded_lines_variety))
        }
        (SliceParam::L2, SliceParam::Rho) if unloaded && spec.geometry.l1 == 1.0 => {
            Ok(Box::new(|l2, rho| unloaded_lines_variety(rho, l2)))
        }
        (SliceParam::Rho, SliceParam::F3F4) if symmetric_geometry => {
            Ok(Box::new(symmetric_sextics_variety))
        }
        (SliceParam::F3F4, SliceParam::Rho) if symmetric_geometry => {
            Ok(Box::new(|f4, rho| symmetric_sextics_variety(rho, f4)))
        }
        _ => Err(CliError::Config(
            "no built-in boundary variety for this slice; supported slices: \
             (rho, L2) unloaded with L1=1, l0=0, and (rho, F3F4) with \
             L1=L2=1, k=100, l0=0, vertical loads only"
                .into(),
        )),
    }
}

/// One-line classification summary: region count, stable-count
/// histogram, boundary-edge count, and (when verified) alignment.
pub(crate) fn summary_line(
    map: &RegionMap,
    variety: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
) -> String {
    let hist = stable_histogram(&map.cells);
    let mut line = format!(
        "regions: {} | stable-count histogram: {} | boundary edges: {}",
        map.regions.len(),
        histogram_text(&hist),
        map.boundary_edges.len()
    );
    if let Some(v) = variety {
        let report = verify_boundaries(map, v);
        line.push_str(&format!(
            " | alignment: {:.4} ({}/{} edges, worst {:.2} steps)",
            report.alignment_fraction,
            report.aligned_edges,
            report.total_edges,
            report.worst_distance_steps
        ));
    }
    line
}

pub fn run(args: &ClassifyArgs) -> CliResult<()> {
    let cfg = JobConfig::resolve("classify", args.config.as_deref(), args.delta()?)?;
    let spec = build_slice_spec(&cfg)?;
    let variety = match cfg.verify_varieties {
        VerifyVarieties::None => None,
        VerifyVarieties::Builtin => Some(builtin_variety(&spec)?),
    };

    let map = classify_slice(&spec)?;

    let mut csv = create_file(&cfg.csv_out)?;
    write_map_csv(&mut csv, &map)?;
    csv.flush().map_err(|e| CliError::io_at(&cfg.csv_out, e))?;
    let mut svg = create_file(&cfg.svg_out)?;
    write_region_map_svg(
        &mut svg,
        &map,
        variety.as_ref().map(|v| v.as_ref() as &dyn Fn(f64, f64) -> f64),
    )?;
    svg.flush().map_err(|e| CliError::io_at(&cfg.svg_out, e))?;

    println!("{}", summary_line(&map, variety.as_deref()));
    println!("wrote {} and {}", cfg.csv_out.display(), cfg.svg_out.display());
    Ok(())
}
