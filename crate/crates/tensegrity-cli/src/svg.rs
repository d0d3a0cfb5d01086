//! Vector-graphics rendering of classified parameter-space maps.
//!
//! Each grid node paints one cell, colored by its stable-solution count
//! (white/dark for invalid/failed nodes). Detected count-change
//! boundaries are drawn as solid black separators between cells, and an
//! optional analytic boundary variety is overlaid as a dashed white
//! zero-level contour (marching squares over the node grid), so the
//! agreement between the empirical and analytic boundaries is visible
//! directly.

use std::io::Write;

use tensegrity_solver::atlas::{CellFlag, RegionMap, SliceParam};

use crate::errors::CliResult;
use crate::output::stable_histogram;

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 640.0;
const ML: f64 = 70.0;
const MT: f64 = 42.0;
const MR: f64 = 150.0;
const MB: f64 = 56.0;

fn cell_color(cell: &tensegrity_solver::atlas::CellRecord) -> &'static str {
    match cell.flag {
        CellFlag::InvalidParams => "#ffffff",
        CellFlag::SolverFailed => "#404040",
        CellFlag::Ok => match cell.stable_count {
            0 => "#bfbfbf",
            1 => "#6699cc",
            2 => "#cc5555",
            3 => "#77aa55",
            _ => "#aa77cc",
        },
    }
}

fn count_label(n: usize) -> String {
    match n {
        0 => "0 stable".to_string(),
        1 => "1 stable".to_string(),
        2 => "2 stable".to_string(),
        n => format!("{n} stable"),
    }
}

struct PixelGrid {
    n1: usize,
    n2: usize,
    cw: f64,
    ch: f64,
}

impl PixelGrid {
    fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2, cw: PLOT_W / n1 as f64, ch: PLOT_H / n2 as f64 }
    }

    /// Top-left corner of cell `(i, j)` (axis2 increases upward).
    fn corner(&self, i: usize, j: usize) -> (f64, f64) {
        (ML + i as f64 * self.cw, MT + (self.n2 - 1 - j) as f64 * self.ch)
    }

    /// Center of cell `(i, j)`.
    fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let (x, y) = self.corner(i, j);
        (x + 0.5 * self.cw, y + 0.5 * self.ch)
    }
}

/// Marching-squares zero-contour segments of `values` (node-indexed
/// `i * n2 + j`), in pixel coordinates over cell centers. Saddle squares
/// pair crossings in fixed edge order, which keeps output deterministic.
fn contour_segments(
    values: &[f64],
    grid: &PixelGrid,
) -> Vec<((f64, f64), (f64, f64))> {
    let (n1, n2) = (grid.n1, grid.n2);
    let v = |i: usize, j: usize| values[i * n2 + j];
    let mut segments = Vec::new();
    for i in 0..n1.saturating_sub(1) {
        for j in 0..n2.saturating_sub(1) {
            let corners = [
                (i, j),
                (i + 1, j),
                (i + 1, j + 1),
                (i, j + 1),
            ];
            if corners.iter().any(|&(a, b)| !v(a, b).is_finite()) {
                continue;
            }
            // The four square edges in fixed order.
            let edges = [
                (corners[0], corners[1]),
                (corners[1], corners[2]),
                (corners[2], corners[3]),
                (corners[3], corners[0]),
            ];
            let mut points = Vec::new();
            for (a, b) in edges {
                let (va, vb) = (v(a.0, a.1), v(b.0, b.1));
                // Zero values count as positive so a node exactly on the
                // variety produces one crossing, not two coincident ones.
                let (sa, sb) = (va >= 0.0, vb >= 0.0);
                if sa == sb {
                    continue;
                }
                let t = va / (va - vb);
                let (pa, pb) = (grid.center(a.0, a.1), grid.center(b.0, b.1));
                points.push((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)));
            }
            match points.len() {
                2 => segments.push((points[0], points[1])),
                4 => {
                    segments.push((points[0], points[1]));
                    segments.push((points[2], points[3]));
                }
                _ => {}
            }
        }
    }
    segments
}

fn fixed_parameter_text(map: &RegionMap) -> String {
    let spec = &map.spec;
    let varied = [spec.axis1.param, spec.axis2.param];
    let has = |p: SliceParam| varied.contains(&p);
    let f3_varied = has(SliceParam::F3) || has(SliceParam::F3F4);
    let f4_varied = has(SliceParam::F4) || has(SliceParam::F3F4);
    let mut parts = vec![format!("L1={}", spec.geometry.l1)];
    if !has(SliceParam::L2) {
        parts.push(format!("L2={}", spec.geometry.l2));
    }
    parts.push(format!("k={}", spec.geometry.k));
    if spec.geometry.l0 != 0.0 {
        parts.push(format!("l0={}", spec.geometry.l0));
    }
    if !f3_varied {
        parts.push(format!("F3={}", spec.loading.f3));
    }
    if !f4_varied {
        parts.push(format!("F4={}", spec.loading.f4));
    }
    if spec.loading.f3x != 0.0 {
        parts.push(format!("F3x={}", spec.loading.f3x));
    }
    if spec.loading.f4x != 0.0 {
        parts.push(format!("F4x={}", spec.loading.f4x));
    }
    if !has(SliceParam::Rho) {
        parts.push(format!("rho={}", spec.rho));
    }
    parts.join("  ")
}

/// Render a classified map as a standalone SVG document.
///
/// `variety` (when given) is evaluated on the node grid as
/// `variety(axis1_value, axis2_value)` and its zero contour is overlaid.
pub fn write_region_map_svg<W: Write>(
    w: &mut W,
    map: &RegionMap,
    variety: Option<&dyn Fn(f64, f64) -> f64>,
) -> CliResult<()> {
    let spec = &map.spec;
    let (n1, n2) = (spec.axis1.count, spec.axis2.count);
    let grid = PixelGrid::new(n1, n2);
    let width = ML + PLOT_W + MR;
    let height = MT + PLOT_H + MB;

    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )?;
    writeln!(
        w,
        r##"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff"/>"##
    )?;
    writeln!(
        w,
        r#"<text x="{:.2}" y="24" font-family="monospace" font-size="13">stable-equilibrium count over ({}, {})   {}</text>"#,
        ML,
        spec.axis1.param.name(),
        spec.axis2.param.name(),
        fixed_parameter_text(map)
    )?;

    // Cells, merged into vertical runs of constant color per column.
    for i in 0..n1 {
        let mut j = 0;
        while j < n2 {
            let color = cell_color(map.cell(i, j));
            let mut j_end = j + 1;
            while j_end < n2 && cell_color(map.cell(i, j_end)) == color {
                j_end += 1;
            }
            // The run covers cells j..j_end; topmost drawn cell is j_end-1.
            let (x, y) = grid.corner(i, j_end - 1);
            let run_h = (j_end - j) as f64 * grid.ch;
            writeln!(
                w,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{run_h:.2}" fill="{color}"/>"#,
                grid.cw
            )?;
            j = j_end;
        }
    }

    // Empirical boundaries: separators between neighboring cells whose
    // stable count differs.
    for edge in &map.boundary_edges {
        let (ai, aj) = edge.a;
        let (bi, bj) = edge.b;
        if bi == ai + 1 && bj == aj {
            // Horizontal neighbors: vertical separator on the shared edge.
            let (x, y) = grid.corner(bi, aj);
            writeln!(
                w,
                r##"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
                y + grid.ch
            )?;
        } else if bi == ai && bj == aj + 1 {
            // Vertical neighbors: horizontal separator (top edge of cell aj).
            let (x, y) = grid.corner(ai, aj);
            writeln!(
                w,
                r##"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000000" stroke-width="1"/>"##,
                x + grid.cw
            )?;
        }
    }

    // Analytic variety zero contour.
    let mut drew_contour = false;
    if let Some(f) = variety {
        let mut values = vec![0.0f64; n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                let (v1, v2) = map.node_values(i, j);
                values[i * n2 + j] = f(v1, v2);
            }
        }
        let segments = contour_segments(&values, &grid);
        drew_contour = !segments.is_empty();
        for ((x1, y1), (x2, y2)) in segments {
            writeln!(
                w,
                r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#ffffff" stroke-width="1.5" stroke-dasharray="5 3"/>"##
            )?;
        }
    }

    // Frame and axis annotation.
    writeln!(
        w,
        r##"<rect x="{ML:.2}" y="{MT:.2}" width="{PLOT_W:.2}" height="{PLOT_H:.2}" fill="none" stroke="#000000" stroke-width="1"/>"##
    )?;
    let x_label_y = MT + PLOT_H + 34.0;
    writeln!(
        w,
        r#"<text x="{:.2}" y="{x_label_y:.2}" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
        ML + PLOT_W / 2.0,
        spec.axis1.param.name()
    )?;
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ML - 46.0,
        MT + PLOT_H / 2.0,
        ML - 46.0,
        MT + PLOT_H / 2.0,
        spec.axis2.param.name()
    )?;
    let tick_y = MT + PLOT_H + 16.0;
    writeln!(
        w,
        r#"<text x="{ML:.2}" y="{tick_y:.2}" font-family="monospace" font-size="11">{}</text>"#,
        spec.axis1.min
    )?;
    writeln!(
        w,
        r#"<text x="{:.2}" y="{tick_y:.2}" font-family="monospace" font-size="11" text-anchor="end">{}</text>"#,
        ML + PLOT_W,
        spec.axis1.max
    )?;
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="end">{}</text>"#,
        ML - 6.0,
        MT + PLOT_H,
        spec.axis2.min
    )?;
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="end">{}</text>"#,
        ML - 6.0,
        MT + 11.0,
        spec.axis2.max
    )?;

    // Legend: stable counts present, any flagged states, overlays.
    let mut entries: Vec<(String, &'static str)> = stable_histogram(&map.cells)
        .iter()
        .map(|&(count, _)| {
            let probe = tensegrity_solver::atlas::CellRecord {
                stable_count: count,
                total_count: count,
                flag: CellFlag::Ok,
                stable_configs: Vec::new(),
            };
            (count_label(count), cell_color(&probe))
        })
        .collect();
    if map.cells.iter().any(|c| c.flag == CellFlag::InvalidParams) {
        entries.push(("invalid params".to_string(), "#ffffff"));
    }
    if map.cells.iter().any(|c| c.flag == CellFlag::SolverFailed) {
        entries.push(("solver failed".to_string(), "#404040"));
    }
    let legend_x = ML + PLOT_W + 18.0;
    let mut legend_y = MT + 8.0;
    for (label, color) in &entries {
        writeln!(
            w,
            r##"<rect x="{legend_x:.2}" y="{legend_y:.2}" width="14" height="14" fill="{color}" stroke="#000000" stroke-width="0.5"/>"##
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{label}</text>"#,
            legend_x + 20.0,
            legend_y + 11.0
        )?;
        legend_y += 22.0;
    }
    if !map.boundary_edges.is_empty() {
        writeln!(
            w,
            r##"<line x1="{legend_x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
            legend_y + 7.0,
            legend_x + 14.0,
            legend_y + 7.0
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">count change</text>"#,
            legend_x + 20.0,
            legend_y + 11.0
        )?;
        legend_y += 22.0;
    }
    if drew_contour {
        writeln!(
            w,
            r##"<line x1="{legend_x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999" stroke-width="1.5" stroke-dasharray="5 3"/>"##,
            legend_y + 7.0,
            legend_x + 14.0,
            legend_y + 7.0
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">variety zero set</text>"#,
            legend_x + 20.0,
            legend_y + 11.0
        )?;
    }

    writeln!(w, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_of_linear_field_is_vertical_line() {
        // v(i, j) = i - 1.5 on a 4x3 node grid: zero set between i=1 and
        // i=2, crossing every row band exactly twice (bottom and top
        // edges of each square in the i=1 column).
        let (n1, n2) = (4usize, 3usize);
        let grid = PixelGrid::new(n1, n2);
        let mut values = vec![0.0; n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                values[i * n2 + j] = i as f64 - 1.5;
            }
        }
        let segments = contour_segments(&values, &grid);
        // One segment per square row in the crossing column.
        assert_eq!(segments.len(), n2 - 1);
        let expect_x = grid.center(1, 0).0 + 0.5 * grid.cw;
        for ((x1, _), (x2, _)) in segments {
            assert!((x1 - expect_x).abs() < 1e-9);
            assert!((x2 - expect_x).abs() < 1e-9);
        }
    }

    #[test]
    fn contour_skips_non_finite_nodes() {
        let (n1, n2) = (2usize, 2usize);
        let grid = PixelGrid::new(n1, n2);
        let values = vec![f64::NAN, 1.0, -1.0, 1.0];
        assert!(contour_segments(&values, &grid).is_empty());
    }
}
