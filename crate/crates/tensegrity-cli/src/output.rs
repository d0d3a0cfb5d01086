//! Serialization of solver results: human tables, JSON documents, and
//! CSV files.
//!
//! Numeric fidelity contract: files carry angles in radians only, and
//! every float written to CSV uses 17 significant digits
//! ([`fmt_g17`]), which round-trips bit-exactly through `f64` parsing.
//! Human tables additionally show degrees at reduced precision.

use std::io::Write;

use serde::Serialize;

use tensegrity_solver::atlas::{CellFlag, RegionMap, RhoSweep};
use tensegrity_solver::freelength::MultistartStats;
use tensegrity_solver::model::node_coordinates;
use tensegrity_solver::{Equilibrium, Geometry, Loading, Stability};

use crate::errors::CliResult;

/// Format a float with 17 significant digits (scientific); parsing the
/// result back with `str::parse::<f64>()` recovers the identical bits.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn stability_label(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Marginal => "marginal",
    }
}

pub fn flag_label(f: CellFlag) -> &'static str {
    match f {
        CellFlag::Ok => "ok",
        CellFlag::InvalidParams => "invalid_params",
        CellFlag::SolverFailed => "solver_failed",
    }
}

/// One-line echo of geometry and loading (no actuator value).
pub fn mechanism_summary(g: &Geometry, l: &Loading) -> String {
    format!(
        "L1={} L2={} k={} l0={} F3={} F4={} F3x={} F4x={}",
        g.l1, g.l2, g.k, g.l0, l.f3, l.f4, l.f3x, l.f4x
    )
}

/// One-line parameter echo used at the top of tables and summaries.
pub fn param_summary(g: &Geometry, l: &Loading, rho: f64) -> String {
    format!("{} rho={}", mechanism_summary(g, l), rho)
}

// ---------------------------------------------------------------------------
// JSON document for `solve`
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct ParamBlock {
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    pub k: f64,
    pub l0: f64,
    #[serde(rename = "F3")]
    pub f3: f64,
    #[serde(rename = "F4")]
    pub f4: f64,
    #[serde(rename = "F3x")]
    pub f3x: f64,
    #[serde(rename = "F4x")]
    pub f4x: f64,
    pub rho: f64,
}

#[derive(Serialize)]
pub struct EquilibriumRecord {
    pub theta1: f64,
    pub theta2: f64,
    pub x3: f64,
    pub y3: f64,
    pub x4: f64,
    pub y4: f64,
    pub energy: f64,
    pub residual: f64,
    pub minor1: f64,
    pub det_h: f64,
    pub stability: &'static str,
    pub flat: bool,
}

#[derive(Serialize)]
pub struct MultistartBlock {
    pub seeds: usize,
    pub converged: usize,
    pub deduplicated: usize,
    pub abandoned: usize,
    pub rejected_short_spring: usize,
}

#[derive(Serialize)]
pub struct SolveReport {
    pub parameters: ParamBlock,
    pub equilibria: Vec<EquilibriumRecord>,
    pub stable_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multistart: Option<MultistartBlock>,
}

pub fn solve_report(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    equilibria: &[Equilibrium],
    multistart: Option<(&MultistartStats, usize)>,
) -> SolveReport {
    let records = equilibria
        .iter()
        .map(|e| {
            let n = node_coordinates(g, &e.config);
            EquilibriumRecord {
                theta1: e.config.theta1,
                theta2: e.config.theta2,
                x3: n.x3,
                y3: n.y3,
                x4: n.x4,
                y4: n.y4,
                energy: e.energy,
                residual: e.residual,
                minor1: e.minor1,
                det_h: e.det_h,
                stability: stability_label(e.stability),
                flat: e.flat,
            }
        })
        .collect();
    SolveReport {
        parameters: ParamBlock {
            l1: g.l1,
            l2: g.l2,
            k: g.k,
            l0: g.l0,
            f3: l.f3,
            f4: l.f4,
            f3x: l.f3x,
            f4x: l.f4x,
            rho,
        },
        equilibria: records,
        stable_count: equilibria
            .iter()
            .filter(|e| e.stability == Stability::Stable)
            .count(),
        multistart: multistart.map(|(s, rejected)| MultistartBlock {
            seeds: s.seeds,
            converged: s.converged,
            deduplicated: s.deduplicated,
            abandoned: s.abandoned,
            rejected_short_spring: rejected,
        }),
    }
}

pub fn write_solve_json<W: Write + ?Sized>(
    w: &mut W,
    report: &SolveReport,
) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, report)
        .map_err(|e| crate::errors::CliError::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Human-readable table for `solve`
// ---------------------------------------------------------------------------

pub fn write_solve_table<W: Write + ?Sized>(
    w: &mut W,
    g: &Geometry,
    l: &Loading,
    rho: f64,
    equilibria: &[Equilibrium],
    multistart: Option<(&MultistartStats, usize)>,
) -> CliResult<()> {
    writeln!(w, "mechanism: {}", param_summary(g, l, rho))?;
    let stable = equilibria
        .iter()
        .filter(|e| e.stability == Stability::Stable)
        .count();
    writeln!(w, "equilibria: {} ({} stable)", equilibria.len(), stable)?;
    writeln!(w)?;
    writeln!(
        w,
        "{:>3}  {:>16}  {:>10}  {:>16}  {:>10}  {:>9}  {:>9}  {:>9}  {:>9}  {:>13}  {:>12}  {:>12}  {:<9}",
        "#",
        "theta1 [rad]",
        "[deg]",
        "theta2 [rad]",
        "[deg]",
        "x3",
        "y3",
        "x4",
        "y4",
        "energy",
        "H(1,1)",
        "det H",
        "stability"
    )?;
    for (i, e) in equilibria.iter().enumerate() {
        let n = node_coordinates(g, &e.config);
        writeln!(
            w,
            "{:>3}  {:>16.12}  {:>10.5}  {:>16.12}  {:>10.5}  {:>9.5}  {:>9.5}  {:>9.5}  {:>9.5}  {:>13.6}  {:>12.5e}  {:>12.5e}  {:<9}{}",
            i + 1,
            e.config.theta1,
            e.config.theta1.to_degrees(),
            e.config.theta2,
            e.config.theta2.to_degrees(),
            n.x3,
            n.y3,
            n.x4,
            n.y4,
            e.energy,
            e.minor1,
            e.det_h,
            stability_label(e.stability),
            if e.flat { "  (flat)" } else { "" }
        )?;
    }
    if let Some((s, rejected)) = multistart {
        writeln!(w)?;
        writeln!(
            w,
            "multistart: seeds={} converged={} deduplicated={} abandoned={} rejected-short-spring={}",
            s.seeds, s.converged, s.deduplicated, s.abandoned, rejected
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV for `sweep`
// ---------------------------------------------------------------------------

/// All equilibria found along an actuator sweep, one row per
/// (actuator value, solution branch). Branch numbering restarts at 0 on
/// every row group and follows the deterministic solver ordering
/// (ascending `theta1`, then `theta2`).
pub fn write_sweep_csv<W: Write>(
    w: W,
    rows: &[(f64, usize, Equilibrium)],
) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "rho",
        "branch",
        "theta1",
        "theta2",
        "energy",
        "residual",
        "minor1",
        "det_h",
        "stability",
        "flat",
    ])
    .map_err(csv_err)?;
    for (rho, branch, e) in rows {
        wtr.write_record([
            fmt_g17(*rho),
            branch.to_string(),
            fmt_g17(e.config.theta1),
            fmt_g17(e.config.theta2),
            fmt_g17(e.energy),
            fmt_g17(e.residual),
            fmt_g17(e.minor1),
            fmt_g17(e.det_h),
            stability_label(e.stability).to_string(),
            e.flat.to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV for `classify`
// ---------------------------------------------------------------------------

/// One row per grid node: axis values, solution counts, cell flag, and
/// the merged-region id (empty for flagged cells).
pub fn write_map_csv<W: Write>(w: W, map: &RegionMap) -> CliResult<()> {
    let spec = &map.spec;
    let (n1, n2) = (spec.axis1.count, spec.axis2.count);
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        spec.axis1.param.name(),
        spec.axis2.param.name(),
        "stable_count",
        "total_count",
        "flag",
        "region_id",
    ])
    .map_err(csv_err)?;
    for i in 0..n1 {
        for j in 0..n2 {
            let cell = map.cell(i, j);
            let (v1, v2) = map.node_values(i, j);
            let region = map.region_ids[i * n2 + j]
                .map(|r| r.to_string())
                .unwrap_or_default();
            wtr.write_record([
                fmt_g17(v1),
                fmt_g17(v2),
                cell.stable_count.to_string(),
                cell.total_count.to_string(),
                flag_label(cell.flag).to_string(),
                region,
            ])
            .map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::errors::CliError {
    crate::errors::CliError::Io(e.to_string())
}

/// Histogram of stable counts over unflagged cells, as sorted
/// `count:cells` pairs.
pub fn stable_histogram(cells: &[tensegrity_solver::atlas::CellRecord]) -> Vec<(usize, usize)> {
    let mut hist = std::collections::BTreeMap::new();
    for c in cells {
        if c.flag == CellFlag::Ok {
            *hist.entry(c.stable_count).or_insert(0usize) += 1;
        }
    }
    hist.into_iter().collect()
}

pub fn histogram_text(hist: &[(usize, usize)]) -> String {
    hist.iter()
        .map(|(count, cells)| format!("{count}:{cells}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Summary text for a sweep's two-stable intervals.
pub fn intervals_text(sweep: &RhoSweep) -> String {
    let intervals = tensegrity_solver::atlas::intervals_from_sweep(sweep);
    if intervals.is_empty() {
        return "2-stable intervals: none".to_string();
    }
    let parts: Vec<String> = intervals
        .iter()
        .map(|iv| {
            format!("[{:.6}, {:.6}] width {:.6}", iv.lo, iv.hi, iv.width)
        })
        .collect();
    format!("2-stable intervals: {}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_round_trips_bit_exactly() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            -1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            -2.2250738585072014e-308,
            1.7976931348623157e308,
            21093.75,
            -0.812755561368661,
        ] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "round-trip failed for {s}");
        }
    }

    #[test]
    fn labels_are_stable_identifiers() {
        assert_eq!(stability_label(Stability::Stable), "stable");
        assert_eq!(stability_label(Stability::Marginal), "marginal");
        assert_eq!(flag_label(CellFlag::InvalidParams), "invalid_params");
    }
}
