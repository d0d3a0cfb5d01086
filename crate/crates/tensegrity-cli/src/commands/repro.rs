//! `tsg repro` — one-command reproduction suite.
//!
//! Runs the canonical analysis battery (point solves, actuator sweeps,
//! and parameter-slice classifications covering the unloaded, symmetric,
//! and general loading regimes), writes every artifact into one output
//! directory, and summarizes the results in `report.txt`. All scenario
//! parameters are fixed, so two runs produce byte-identical artifacts.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;

use tensegrity_solver::atlas::{
    classify_slice, reverse_configuration_check, AxisSpec, CellFlag, RegionMap,
    SliceParam, SliceSpec,
};
use tensegrity_solver::model::node_coordinates;
use tensegrity_solver::{Equilibrium, Geometry, Loading, Stability};

use crate::config::JobConfig;
use crate::errors::{CliError, CliResult};
use crate::output::{
    intervals_text, mechanism_summary, solve_report, write_map_csv,
    write_solve_json, write_sweep_csv,
};
use crate::svg::write_region_map_svg;

use super::classify::summary_line;
use super::create_file;
use super::sweep::run_sweep;

/// Run the full reproduction suite and write a report.
#[derive(Args, Debug)]
pub struct ReproArgs {
    /// Output directory for all artifacts
    #[arg(long, value_name = "DIR", default_value = "repro-out")]
    pub out_dir: PathBuf,
    /// Nodes per map axis; maps are resolution x resolution grids
    #[arg(long, value_name = "N", default_value_t = 150)]
    pub resolution: usize,
    /// Nodes per 1-D actuator sweep
    #[arg(long, value_name = "N", default_value_t = 400)]
    pub sweep_count: usize,
}

fn stability_counts(eqs: &[Equilibrium]) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for e in eqs {
        match e.stability {
            Stability::Stable => counts.0 += 1,
            Stability::Unstable => counts.1 += 1,
            Stability::Marginal => counts.2 += 1,
        }
    }
    counts
}

fn equilibrium_lines(eqs: &[Equilibrium]) -> String {
    let mut s = String::new();
    for e in eqs {
        let _ = writeln!(
            s,
            "  theta1={:+.12} theta2={:+.12} energy={:+.6} {}{}",
            e.config.theta1,
            e.config.theta2,
            e.energy,
            crate::output::stability_label(e.stability),
            if e.flat { " (flat)" } else { "" }
        );
    }
    s
}

/// Stable-count values over unflagged cells that do not touch a detected
/// boundary (cells on a transition can sit exactly on the boundary
/// variety, where merging solutions turn marginal and counts dip).
fn interior_count_values(map: &RegionMap) -> Vec<usize> {
    let n2 = map.spec.axis2.count;
    let mut on_boundary = vec![false; map.cells.len()];
    for e in &map.boundary_edges {
        on_boundary[e.a.0 * n2 + e.a.1] = true;
        on_boundary[e.b.0 * n2 + e.b.1] = true;
    }
    let mut values = BTreeSet::new();
    for (at, cell) in map.cells.iter().enumerate() {
        if cell.flag == CellFlag::Ok && !on_boundary[at] {
            values.insert(cell.stable_count);
        }
    }
    values.into_iter().collect()
}

fn count_values_text(values: &[usize]) -> String {
    let inner = values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    format!("{{{inner}}}")
}

fn write_point_json(
    dir: &Path,
    name: &str,
    g: &Geometry,
    l: &Loading,
    rho: f64,
    eqs: &[Equilibrium],
) -> CliResult<()> {
    let path = dir.join(name);
    let mut f = create_file(&path)?;
    write_solve_json(&mut f, &solve_report(g, l, rho, eqs, None))?;
    f.flush().map_err(|e| CliError::io_at(&path, e))
}

fn write_map_files(
    dir: &Path,
    stem: &str,
    map: &RegionMap,
    variety: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
) -> CliResult<()> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut csv = create_file(&csv_path)?;
    write_map_csv(&mut csv, map)?;
    csv.flush().map_err(|e| CliError::io_at(&csv_path, e))?;

    let svg_path = dir.join(format!("{stem}.svg"));
    let mut svg = create_file(&svg_path)?;
    write_region_map_svg(
        &mut svg,
        map,
        variety.map(|v| v as &dyn Fn(f64, f64) -> f64),
    )?;
    svg.flush().map_err(|e| CliError::io_at(&svg_path, e))
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

fn point_unloaded(dir: &Path) -> CliResult<String> {
    let g = Geometry::zero_free_length(1.0, 1.5, 100.0)?;
    let l = Loading::UNLOADED;
    let rho = 1.0;
    let eqs = tensegrity_solver::solve_equilibria(&g, &l, rho)?;
    write_point_json(dir, "point-unloaded.json", &g, &l, rho, &eqs)?;

    let (stable, unstable, marginal) = stability_counts(&eqs);
    let stable_eqs: Vec<&Equilibrium> =
        eqs.iter().filter(|e| e.stability == Stability::Stable).collect();
    let mut s = String::new();
    let _ = writeln!(s, "== point-unloaded ==");
    let _ = writeln!(s, "parameters: {} rho={rho}", mechanism_summary(&g, &l));
    let _ = writeln!(
        s,
        "equilibria: {} (stable {stable}, unstable {unstable}, marginal {marginal})",
        eqs.len()
    );
    s.push_str(&equilibrium_lines(&eqs));
    if let [a, b] = stable_eqs.as_slice() {
        let mirror_dev = (a.config.theta1 + b.config.theta1)
            .abs()
            .max((a.config.theta2 + b.config.theta2).abs());
        let _ = writeln!(s, "stable pair mirror deviation: {mirror_dev:.3e}");
        let mut para_dev: f64 = 0.0;
        let mut width_dev: f64 = 0.0;
        for e in &stable_eqs {
            let n = node_coordinates(&g, &e.config);
            para_dev = para_dev.max((n.y3 - n.y4).abs());
            width_dev = width_dev.max(((n.x3 - n.x4).abs() - rho).abs());
        }
        let _ = writeln!(
            s,
            "parallelogram deviation: |y3-y4| <= {para_dev:.3e}, ||x3-x4|-rho| <= {width_dev:.3e}"
        );
    }
    let _ = writeln!(s, "files: point-unloaded.json");
    Ok(s)
}

fn sweep_unloaded(dir: &Path, sweep_count: usize) -> CliResult<String> {
    let mut s = String::new();
    let _ = writeln!(s, "== sweep-unloaded ==");
    for (stem, l2) in [("sweep-unloaded", 1.5), ("sweep-unloaded-short", 0.5)] {
        let cfg = JobConfig { l2, ..JobConfig::default() };
        let axis = AxisSpec::new(SliceParam::Rho, 0.01, 2.0, sweep_count)?;
        let (rows, sweep) = run_sweep(&cfg, &axis)?;
        let path = dir.join(format!("{stem}.csv"));
        let mut f = create_file(&path)?;
        write_sweep_csv(&mut f, &rows)?;
        f.flush().map_err(|e| CliError::io_at(&path, e))?;
        let _ = writeln!(
            s,
            "L2={l2}: {} over {} nodes, rho in [{}, {}]",
            intervals_text(&sweep),
            axis.count,
            axis.min,
            axis.max
        );
    }
    let _ = writeln!(s, "files: sweep-unloaded.csv, sweep-unloaded-short.csv");
    Ok(s)
}

fn map_unloaded(dir: &Path, res: usize) -> CliResult<String> {
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, res)?,
        axis2: AxisSpec::new(SliceParam::L2, 0.05, 3.0, res)?,
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0)?,
        loading: Loading::UNLOADED,
        rho: 1.0,
    };
    spec.validate()?;
    let map = classify_slice(&spec)?;
    let variety = tensegrity_solver::atlas::unloaded_lines_variety;
    write_map_files(dir, "map-unloaded", &map, Some(&variety))?;

    let mut s = String::new();
    let _ = writeln!(s, "== map-unloaded ==");
    let _ = writeln!(
        s,
        "slice: rho in [0.05, 2] x L2 in [0.05, 3], {res}x{res} nodes, unloaded"
    );
    let _ = writeln!(s, "{}", summary_line(&map, Some(&variety)));
    let _ = writeln!(
        s,
        "stable-count values away from boundaries: {}",
        count_values_text(&interior_count_values(&map))
    );
    let _ = writeln!(s, "files: map-unloaded.csv, map-unloaded.svg");
    Ok(s)
}

fn point_symmetric(dir: &Path) -> CliResult<String> {
    let g = Geometry::zero_free_length(1.0, 1.0, 100.0)?;
    let l = Loading::vertical(-10.0, -10.0);
    let rho = 0.75;
    let eqs = tensegrity_solver::solve_equilibria(&g, &l, rho)?;
    write_point_json(dir, "point-symmetric.json", &g, &l, rho, &eqs)?;

    let (stable, unstable, marginal) = stability_counts(&eqs);
    let distinct: Vec<&Equilibrium> = eqs
        .iter()
        .filter(|e| (e.config.theta1 - e.config.theta2).abs() > 1e-9)
        .collect();
    let distinct_unstable =
        distinct.iter().all(|e| e.stability != Stability::Stable);
    let mut s = String::new();
    let _ = writeln!(s, "== point-symmetric ==");
    let _ = writeln!(s, "parameters: {} rho={rho}", mechanism_summary(&g, &l));
    let _ = writeln!(
        s,
        "equilibria: {} (stable {stable}, unstable {unstable}, marginal {marginal})",
        eqs.len()
    );
    s.push_str(&equilibrium_lines(&eqs));
    let _ = writeln!(
        s,
        "distinct-angle branches: {} (all non-stable: {})",
        distinct.len(),
        if distinct_unstable { "yes" } else { "NO" }
    );
    let _ = writeln!(s, "files: point-symmetric.json");
    Ok(s)
}

fn map_symmetric(dir: &Path, res: usize) -> CliResult<String> {
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.01, 1.2, res)?,
        axis2: AxisSpec::new(SliceParam::F3F4, -30.0, -0.2, res)?,
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0)?,
        loading: Loading::UNLOADED,
        rho: 1.0,
    };
    spec.validate()?;
    let map = classify_slice(&spec)?;
    let variety = tensegrity_solver::atlas::symmetric_sextics_variety;
    write_map_files(dir, "map-symmetric", &map, Some(&variety))?;
    let reverse = reverse_configuration_check(&map)?;

    let mut s = String::new();
    let _ = writeln!(s, "== map-symmetric ==");
    let _ = writeln!(
        s,
        "slice: rho in [0.01, 1.2] x F3=F4 in [-30, -0.2], {res}x{res} nodes, L1=L2=1 k=100"
    );
    let _ = writeln!(s, "{}", summary_line(&map, Some(&variety)));
    let _ = writeln!(
        s,
        "stable-count values away from boundaries: {}",
        count_values_text(&interior_count_values(&map))
    );
    let _ = writeln!(
        s,
        "reverse configuration (y3 < 0 and y4 < 0) in 1-stable cells: {}/{}",
        reverse.reverse_count, reverse.applicable
    );
    let _ = writeln!(s, "files: map-symmetric.csv, map-symmetric.svg");
    Ok(s)
}

fn point_general(dir: &Path) -> CliResult<String> {
    let g = Geometry::zero_free_length(1.0, 1.5, 100.0)?;
    let l = Loading::vertical(-10.0, -10.0);
    let rho = 0.7;
    let eqs = tensegrity_solver::solve_equilibria(&g, &l, rho)?;
    write_point_json(dir, "point-general.json", &g, &l, rho, &eqs)?;

    let (stable, unstable, marginal) = stability_counts(&eqs);
    let mut s = String::new();
    let _ = writeln!(s, "== point-general ==");
    let _ = writeln!(s, "parameters: {} rho={rho}", mechanism_summary(&g, &l));
    let _ = writeln!(
        s,
        "equilibria: {} (stable {stable}, unstable {unstable}, marginal {marginal})",
        eqs.len()
    );
    s.push_str(&equilibrium_lines(&eqs));
    let _ = writeln!(s, "files: point-general.json");
    Ok(s)
}

fn map_general(dir: &Path, res: usize) -> CliResult<String> {
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, res)?,
        axis2: AxisSpec::new(SliceParam::L2, 0.05, 2.0, res)?,
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0)?,
        loading: Loading::vertical(-10.0, -10.0),
        rho: 1.0,
    };
    spec.validate()?;
    let map = classify_slice(&spec)?;
    write_map_files(dir, "map-general", &map, None)?;

    let mut s = String::new();
    let _ = writeln!(s, "== map-general ==");
    let _ = writeln!(
        s,
        "slice: rho in [0.05, 2] x L2 in [0.05, 2], {res}x{res} nodes, F3=F4=-10"
    );
    let _ = writeln!(s, "{}", summary_line(&map, None));
    let _ = writeln!(
        s,
        "stable-count values away from boundaries: {}",
        count_values_text(&interior_count_values(&map))
    );
    let _ = writeln!(
        s,
        "connected 2-stable regions: {}",
        map.regions_with_stable_count(2)
    );
    let _ = writeln!(s, "files: map-general.csv, map-general.svg");
    Ok(s)
}

fn maps_pressing(dir: &Path, res: usize) -> CliResult<String> {
    let mut s = String::new();
    let _ = writeln!(s, "== maps-pressing ==");
    for (stem, f3, l2) in
        [("map-pressing-a", -10.0, 1.5), ("map-pressing-b", -30.0, 1.0)]
    {
        let spec = SliceSpec {
            axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, res)?,
            axis2: AxisSpec::new(SliceParam::F4, -30.0, 0.0, res)?,
            geometry: Geometry::zero_free_length(1.0, l2, 100.0)?,
            loading: Loading::vertical(f3, 0.0),
            rho: 1.0,
        };
        spec.validate()?;
        let map = classify_slice(&spec)?;
        write_map_files(dir, stem, &map, None)?;
        let _ = writeln!(
            s,
            "{stem} (F3={f3}, L2={l2}, rho x F4): {} | stable-count values away from boundaries: {}",
            summary_line(&map, None),
            count_values_text(&interior_count_values(&map))
        );
    }
    let _ = writeln!(
        s,
        "files: map-pressing-a.csv, map-pressing-a.svg, map-pressing-b.csv, map-pressing-b.svg"
    );
    Ok(s)
}

fn discrepancy_note() -> String {
    let mut s = String::new();
    let _ = writeln!(s, "== note: deep-pressing slice parameterization ==");
    let _ = writeln!(
        s,
        "Two parameterizations circulate for the deep-pressing (rho, F4)\n\
         partition: variant A fixes F3 = -10 with L2 = 3/2, variant B fixes\n\
         F3 = -30 with L2 = 1. The suite computes both (map-pressing-a and\n\
         map-pressing-b above). The discrepancy between the circulated\n\
         parameter sets is recorded here rather than resolved by choosing\n\
         one of them."
    );
    s
}

pub fn run(args: &ReproArgs) -> CliResult<()> {
    if args.resolution < 2 {
        return Err(CliError::Config(format!(
            "resolution must be at least 2, got {}",
            args.resolution
        )));
    }
    if args.sweep_count < 2 {
        return Err(CliError::Config(format!(
            "sweep-count must be at least 2, got {}",
            args.sweep_count
        )));
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::io_at(&args.out_dir, e))?;
    let dir = args.out_dir.as_path();
    let res = args.resolution;

    let mut report = String::new();
    let _ = writeln!(report, "equilibrium-analysis reproduction suite");
    let _ = writeln!(report, "=======================================");
    let _ = writeln!(
        report,
        "map grids: {res}x{res} nodes; sweeps: {} nodes",
        args.sweep_count
    );
    let _ = writeln!(report);

    let sections = [
        point_unloaded(dir)?,
        sweep_unloaded(dir, args.sweep_count)?,
        map_unloaded(dir, res)?,
        point_symmetric(dir)?,
        map_symmetric(dir, res)?,
        point_general(dir)?,
        map_general(dir, res)?,
        maps_pressing(dir, res)?,
        discrepancy_note(),
    ];
    for section in &sections {
        report.push_str(section);
        report.push('\n');
        // Progress: first line of each completed section.
        if let Some(head) = section.lines().next() {
            println!("{head} done");
        }
    }

    let report_path = dir.join("report.txt");
    let mut f = create_file(&report_path)?;
    f.write_all(report.as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| CliError::io_at(&report_path, e))?;
    println!("wrote {}", report_path.display());
    Ok(())
}
