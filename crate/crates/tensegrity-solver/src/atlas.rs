//! Parameter-space classification: dense-grid maps of the number of
//! stable equilibria over 2-D parameter slices, empirical region-boundary
//! extraction with flood-fill region merging, alignment checks of the
//! detected boundaries against known boundary varieties, operation-range
//! extraction along the actuator axis, and the reverse-configuration sign
//! check for pressing loads.
//!
//! This replaces a symbolic discriminant-variety / cylindrical-algebraic
//! decomposition with numerics: the solver classifies every grid node,
//! transitions in the stable-solution count mark empirical boundaries,
//! and the known closed-form varieties (three lines for the unloaded
//! slice, two degree-6 curves for the symmetric slice, both with
//! `L1 = 1`, `k = 100` baked in) serve as independent oracles for those
//! boundaries.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dksp::{stable_count, Equilibrium};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{node_coordinates, Configuration, Geometry, Loading};

/// Parameter that a slice axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceParam {
    /// Actuator length `ρ`.
    Rho,
    /// Strut length `L2`.
    L2,
    /// Vertical load at `A3`.
    F3,
    /// Vertical load at `A4`.
    F4,
    /// Both vertical loads varied together (`F3 = F4`), the symmetric
    /// loading axis.
    F3F4,
}

impl SliceParam {
    /// Stable identifier used in file formats and CLI arguments.
    pub fn name(self) -> &'static str {
        match self {
            SliceParam::Rho => "rho",
            SliceParam::L2 => "L2",
            SliceParam::F3 => "F3",
            SliceParam::F4 => "F4",
            SliceParam::F3F4 => "F3F4",
        }
    }

    fn overlaps(self, other: SliceParam) -> bool {
        if self == other {
            return true;
        }
        matches!(
            (self, other),
            (SliceParam::F3F4, SliceParam::F3)
                | (SliceParam::F3F4, SliceParam::F4)
                | (SliceParam::F3, SliceParam::F3F4)
                | (SliceParam::F4, SliceParam::F3F4)
        )
    }
}

/// One slice axis: the varied parameter, its inclusive range, and the
/// number of grid nodes (both endpoints are nodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub param: SliceParam,
    pub min: f64,
    pub max: f64,
    /// Grid resolution along this axis (≥ 2).
    pub count: usize,
}

impl AxisSpec {
    pub fn new(param: SliceParam, min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Self { param, min, max, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidSlice(format!(
                "axis {} needs at least 2 nodes, got {}",
                self.param.name(),
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidSlice(format!(
                "axis {} needs a finite range with min < max, got [{}, {}]",
                self.param.name(),
                self.min,
                self.max
            )));
        }
        if self.param == SliceParam::Rho && self.min <= 0.0 {
            return Err(Error::InvalidSlice(format!(
                "rho axis must be strictly positive, got min {}",
                self.min
            )));
        }
        Ok(())
    }

    /// Grid node value (exact endpoints at the first and last node).
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    /// Grid spacing.
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

/// A 2-D parameter slice: two varied axes plus fixed values for every
/// other parameter. The conventional defaults fix `L1 = 1`, `k = 100`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    /// Fixed geometry; entries overridden by a geometry axis.
    pub geometry: Geometry,
    /// Fixed loading; entries overridden by a force axis.
    pub loading: Loading,
    /// Fixed actuator length, used unless some axis varies `rho`.
    pub rho: f64,
}

impl SliceSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        if self.axis1.param.overlaps(self.axis2.param) {
            return Err(Error::InvalidSlice(format!(
                "axes must vary independent parameters, got {} and {}",
                self.axis1.param.name(),
                self.axis2.param.name()
            )));
        }
        // Re-validate fixed values (public fields may have been edited).
        Geometry::new(self.geometry.l1, self.geometry.l2, self.geometry.k, self.geometry.l0)?;
        Loading::new(self.loading.f3, self.loading.f4, self.loading.f3x, self.loading.f4x)?;
        let rho_varied = self.axis1.param == SliceParam::Rho
            || self.axis2.param == SliceParam::Rho;
        if !rho_varied && !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidSlice(format!(
                "fixed rho must be positive, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Concrete parameters at grid node `(i, j)`; errors when the node
    /// values violate model validity (e.g. `L2 = 0`), which the
    /// classifier records as a flagged cell.
    pub fn params_at(&self, i: usize, j: usize) -> Result<(Geometry, Loading, f64)> {
        let l1 = self.geometry.l1;
        let mut l2 = self.geometry.l2;
        let mut f3 = self.loading.f3;
        let mut f4 = self.loading.f4;
        let mut rho = self.rho;
        let mut apply = |param: SliceParam, v: f64| match param {
            SliceParam::Rho => rho = v,
            SliceParam::L2 => l2 = v,
            SliceParam::F3 => f3 = v,
            SliceParam::F4 => f4 = v,
            SliceParam::F3F4 => {
                f3 = v;
                f4 = v;
            }
        };
        apply(self.axis1.param, self.axis1.value(i));
        apply(self.axis2.param, self.axis2.value(j));
        let g = Geometry::new(l1, l2, self.geometry.k, self.geometry.l0)?;
        let l = Loading::new(f3, f4, self.loading.f3x, self.loading.f4x)?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive, got {rho}"
            )));
        }
        Ok((g, l, rho))
    }
}

/// Why a cell carries no solution counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellFlag {
    /// Node solved normally.
    Ok,
    /// Node parameters are outside the model's domain.
    InvalidParams,
    /// The solver signalled a degeneracy at this node.
    SolverFailed,
}

/// Classification record for one grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    /// Number of stable equilibria.
    pub stable_count: usize,
    /// Number of equilibria of any stability.
    pub total_count: usize,
    pub flag: CellFlag,
    /// Configurations of the stable equilibria (for downstream sign
    /// checks and plotting).
    pub stable_configs: Vec<Configuration>,
}

/// A grid edge between two adjacent nodes whose stable counts differ — an
/// empirical region-boundary crossing. Node indices are `(i, j)` pairs
/// into the slice grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

/// A maximal connected set of solved cells sharing one stable count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: usize,
    pub stable_count: usize,
    /// Number of grid cells in the region.
    pub cells: usize,
}

/// Dense-grid classification of a 2-D parameter slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    /// The slice this map was computed from.
    pub spec: SliceSpec,
    /// Per-node records, row-major with `axis1` as the outer index:
    /// node `(i, j)` lives at `i * axis2.count + j`.
    pub cells: Vec<CellRecord>,
    /// Edges where the stable count changes between solved nodes.
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Flood-fill merge of same-count connected cells.
    pub regions: Vec<Region>,
    /// Region id per node (`None` for flagged cells), aligned with
    /// `cells`.
    pub region_ids: Vec<Option<usize>>,
}

impl RegionMap {
    /// Record at node `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> &CellRecord {
        &self.cells[i * self.spec.axis2.count + j]
    }

    /// Parameter-space coordinates of node `(i, j)`.
    pub fn node_values(&self, i: usize, j: usize) -> (f64, f64) {
        (self.spec.axis1.value(i), self.spec.axis2.value(j))
    }

    /// Midpoints of the boundary edges in parameter units.
    pub fn boundary_midpoints(&self) -> Vec<(f64, f64)> {
        self.boundary_edges
            .iter()
            .map(|e| {
                let (x1, y1) = self.node_values(e.a.0, e.a.1);
                let (x2, y2) = self.node_values(e.b.0, e.b.1);
                (0.5 * (x1 + x2), 0.5 * (y1 + y2))
            })
            .collect()
    }

    /// Number of merged regions with the given stable count.
    pub fn regions_with_stable_count(&self, n: usize) -> usize {
        self.regions.iter().filter(|r| r.stable_count == n).count()
    }
}

/// Classify every node of the slice (parallel under the `parallel`
/// feature; output is identical to [`classify_slice_seq`] either way).
pub fn classify_slice(spec: &SliceSpec) -> Result<RegionMap> {
    classify_impl(spec, true)
}

/// Strictly sequential variant of [`classify_slice`] (benchmark baseline
/// and a determinism cross-check).
pub fn classify_slice_seq(spec: &SliceSpec) -> Result<RegionMap> {
    classify_impl(spec, false)
}

fn classify_node(spec: &SliceSpec, i: usize, j: usize) -> CellRecord {
    let (g, l, rho) = match spec.params_at(i, j) {
        Ok(p) => p,
        Err(_) => {
            return CellRecord {
                stable_count: 0,
                total_count: 0,
                flag: CellFlag::InvalidParams,
                stable_configs: Vec::new(),
            }
        }
    };
    match crate::solve_equilibria(&g, &l, rho) {
        Ok(sols) => CellRecord {
            stable_count: stable_count(&sols),
            total_count: sols.len(),
            flag: CellFlag::Ok,
            stable_configs: sols
                .iter()
                .filter(|e| e.stability == crate::dksp::Stability::Stable)
                .map(|e| e.config)
                .collect(),
        },
        Err(Error::InvalidParameter(_)) => CellRecord {
            stable_count: 0,
            total_count: 0,
            flag: CellFlag::InvalidParams,
            stable_configs: Vec::new(),
        },
        Err(_) => CellRecord {
            stable_count: 0,
            total_count: 0,
            flag: CellFlag::SolverFailed,
            stable_configs: Vec::new(),
        },
    }
}

fn classify_impl(spec: &SliceSpec, parallel: bool) -> Result<RegionMap> {
    spec.validate()?;
    let (n1, n2) = (spec.axis1.count, spec.axis2.count);
    let nodes: Vec<(usize, usize)> =
        (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    let cells = if parallel {
        exec::par_map(nodes, |(i, j)| classify_node(spec, i, j))
    } else {
        exec::seq_map(nodes, |(i, j)| classify_node(spec, i, j))
    };

    let idx = |i: usize, j: usize| i * n2 + j;
    let mut boundary_edges = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let here = &cells[idx(i, j)];
            if here.flag != CellFlag::Ok {
                continue;
            }
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni >= n1 || nj >= n2 {
                    continue;
                }
                let there = &cells[idx(ni, nj)];
                if there.flag == CellFlag::Ok && there.stable_count != here.stable_count
                {
                    boundary_edges.push(BoundaryEdge { a: (i, j), b: (ni, nj) });
                }
            }
        }
    }

    // Flood-fill merge of connected same-count cells (4-connectivity),
    // scanning row-major so region ids are deterministic.
    let mut region_ids: Vec<Option<usize>> = vec![None; cells.len()];
    let mut regions: Vec<Region> = Vec::new();
    for start in 0..cells.len() {
        if region_ids[start].is_some() || cells[start].flag != CellFlag::Ok {
            continue;
        }
        let id = regions.len();
        let want = cells[start].stable_count;
        let mut size = 0usize;
        let mut queue = VecDeque::from([start]);
        region_ids[start] = Some(id);
        while let Some(at) = queue.pop_front() {
            size += 1;
            let (i, j) = (at / n2, at % n2);
            let mut push = |ni: usize, nj: usize| {
                let n = idx(ni, nj);
                if region_ids[n].is_none()
                    && cells[n].flag == CellFlag::Ok
                    && cells[n].stable_count == want
                {
                    region_ids[n] = Some(id);
                    queue.push_back(n);
                }
            };
            if i + 1 < n1 {
                push(i + 1, j);
            }
            if i > 0 {
                push(i - 1, j);
            }
            if j + 1 < n2 {
                push(i, j + 1);
            }
            if j > 0 {
                push(i, j - 1);
            }
        }
        regions.push(Region { id, stable_count: want, cells: size });
    }

    Ok(RegionMap { spec: spec.clone(), cells, boundary_edges, regions, region_ids })
}

/// How well the empirically detected boundary edges line up with a
/// candidate boundary variety.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub total_edges: usize,
    pub aligned_edges: usize,
    /// `aligned_edges / total_edges` (1.0 for an empty edge set).
    pub alignment_fraction: f64,
    /// Worst estimated distance from a boundary edge to the variety zero
    /// set, in grid steps (0 when the variety changes sign across every
    /// edge).
    pub worst_distance_steps: f64,
}

/// Check every detected boundary edge of the map against a variety
/// `v(axis1_value, axis2_value)`.
///
/// An edge is *aligned* when the variety changes sign between the edge's
/// endpoints, or when its magnitude at an endpoint is within twice the
/// local one-step variation of `v` (a scale-free proximity test — the
/// built-in degree-6 varieties reach magnitudes of 10¹², so absolute
/// thresholds would be meaningless). The worst-case distance estimate
/// `min(|v|) / (local one-step variation)` is reported in grid steps.
pub fn verify_boundaries<F>(map: &RegionMap, variety: F) -> AlignmentReport
where
    F: Fn(f64, f64) -> f64,
{
    let (n1, n2) = (map.spec.axis1.count, map.spec.axis2.count);
    let mut values = vec![0.0f64; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            let (x, y) = map.node_values(i, j);
            values[i * n2 + j] = variety(x, y);
        }
    }
    let at = |i: usize, j: usize| values[i * n2 + j];
    // Largest one-step change of the variety around a node, probing all
    // four axis neighbors (robust even for edges running parallel to the
    // zero contour).
    let local_scale = |i: usize, j: usize| {
        let v = at(i, j);
        let mut s = 0.0f64;
        if i + 1 < n1 {
            s = s.max((at(i + 1, j) - v).abs());
        }
        if i > 0 {
            s = s.max((at(i - 1, j) - v).abs());
        }
        if j + 1 < n2 {
            s = s.max((at(i, j + 1) - v).abs());
        }
        if j > 0 {
            s = s.max((at(i, j - 1) - v).abs());
        }
        s
    };

    let mut aligned = 0usize;
    let mut worst = 0.0f64;
    for e in &map.boundary_edges {
        let va = at(e.a.0, e.a.1);
        let vb = at(e.b.0, e.b.1);
        if va == 0.0 || vb == 0.0 || (va < 0.0) != (vb < 0.0) {
            aligned += 1;
            continue;
        }
        let scale = local_scale(e.a.0, e.a.1).max(local_scale(e.b.0, e.b.1));
        let distance = if scale > 0.0 {
            va.abs().min(vb.abs()) / scale
        } else {
            f64::INFINITY
        };
        if distance <= 2.0 {
            aligned += 1;
        }
        worst = worst.max(distance);
    }
    let total = map.boundary_edges.len();
    AlignmentReport {
        total_edges: total,
        aligned_edges: aligned,
        alignment_fraction: if total == 0 {
            1.0
        } else {
            aligned as f64 / total as f64
        },
        worst_distance_steps: worst,
    }
}

/// Zero set bounding the unloaded 2-stable band in the `(ρ, L2)` plane
/// with `L1 = 1`: the product of the three lines `2ρ − L2 − 1`,
/// `2ρ − L2 + 1` (active for `L2 > 1`) and `2ρ + L2 − 1` (active for
/// `L2 < 1`). The inactive halves of the latter two lines fall at
/// `ρ < 0`, outside any valid map.
pub fn unloaded_lines_variety(rho: f64, l2: f64) -> f64 {
    (2.0 * rho - l2 - 1.0) * (2.0 * rho - l2 + 1.0) * (2.0 * rho + l2 - 1.0)
}

/// First degree-6 boundary curve of the symmetric slice in the `(ρ, F4)`
/// plane (`L1 = L2 = 1`, `k = 100` baked into the coefficients); its zero
/// set carries the inner edge of the 2-stable band.
pub fn symmetric_sextic_inner(rho: f64, f4: f64) -> f64 {
    let (r2, f2) = (rho * rho, f4 * f4);
    let f4p = f2 * f2;
    f2 * f4p + 12e4 * f4p * r2 + 48e8 * f2 * r2 * r2 + 64e12 * r2 * r2 * r2
        - 16e8 * f2 * r2
}

/// Second degree-6 boundary curve of the symmetric slice (outer edge of
/// the 2-stable band), same conventions as [`symmetric_sextic_inner`].
pub fn symmetric_sextic_outer(rho: f64, f4: f64) -> f64 {
    let (r2, f2) = (rho * rho, f4 * f4);
    let f4p = f2 * f2;
    f2 * f4p + 12e4 * f4p * r2 + 48e8 * f2 * r2 * r2 + 64e12 * r2 * r2 * r2
        - 12e4 * f4p
        + 336e8 * f2 * r2
        - 192e12 * r2 * r2
        + 48e8 * f2
        + 192e12 * r2
        - 64e12
}

/// Product of both symmetric-slice sextics: vanishes on the full 2-stable
/// band boundary in the `(ρ, F4)` plane.
pub fn symmetric_sextics_variety(rho: f64, f4: f64) -> f64 {
    symmetric_sextic_inner(rho, f4) * symmetric_sextic_outer(rho, f4)
}

/// A 1-D sweep of the solver along the actuator axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSweep {
    pub axis: AxisSpec,
    /// Per-node records, in axis order.
    pub cells: Vec<CellRecord>,
}

/// Classify every node of a 1-D sweep over `ρ` with geometry and loading
/// fixed.
pub fn sweep_rho(g: &Geometry, l: &Loading, axis: &AxisSpec) -> Result<RhoSweep> {
    axis.validate()?;
    if axis.param != SliceParam::Rho {
        return Err(Error::InvalidSlice(format!(
            "operation-range sweeps vary rho, got axis {}",
            axis.param.name()
        )));
    }
    let nodes: Vec<f64> = (0..axis.count).map(|i| axis.value(i)).collect();
    let cells = exec::par_map(nodes, |rho| match crate::solve_equilibria(g, l, rho) {
        Ok(sols) => CellRecord {
            stable_count: stable_count(&sols),
            total_count: sols.len(),
            flag: CellFlag::Ok,
            stable_configs: sols
                .iter()
                .filter(|e| e.stability == crate::dksp::Stability::Stable)
                .map(|e| e.config)
                .collect(),
        },
        Err(Error::InvalidParameter(_)) => CellRecord {
            stable_count: 0,
            total_count: 0,
            flag: CellFlag::InvalidParams,
            stable_configs: Vec::new(),
        },
        Err(_) => CellRecord {
            stable_count: 0,
            total_count: 0,
            flag: CellFlag::SolverFailed,
            stable_configs: Vec::new(),
        },
    });
    Ok(RhoSweep { axis: *axis, cells })
}

/// A maximal `ρ` interval with exactly two stable equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationInterval {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

/// Maximal `ρ` intervals over which the mechanism has two stable
/// equilibria (the usable bistable actuation range).
///
/// Interval endpoints interior to the sweep are placed at the midpoint
/// between the last 2-stable node and its non-2-stable neighbor, so they
/// carry half-a-grid-step uncertainty; endpoints at the sweep border are
/// clamped to the axis range.
pub fn operation_range(
    g: &Geometry,
    l: &Loading,
    axis: &AxisSpec,
) -> Result<Vec<OperationInterval>> {
    let sweep = sweep_rho(g, l, axis)?;
    Ok(intervals_from_sweep(&sweep))
}

/// Extract the 2-stable intervals from an existing sweep.
pub fn intervals_from_sweep(sweep: &RhoSweep) -> Vec<OperationInterval> {
    let axis = &sweep.axis;
    let two_stable =
        |c: &CellRecord| c.flag == CellFlag::Ok && c.stable_count == 2;
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=sweep.cells.len() {
        let inside = i < sweep.cells.len() && two_stable(&sweep.cells[i]);
        match (run_start, inside) {
            (None, true) => run_start = Some(i),
            (Some(s), false) => {
                let lo = if s == 0 {
                    axis.min
                } else {
                    0.5 * (axis.value(s - 1) + axis.value(s))
                };
                let hi = if i == sweep.cells.len() {
                    axis.max
                } else {
                    0.5 * (axis.value(i - 1) + axis.value(i))
                };
                out.push(OperationInterval { lo, hi, width: hi - lo });
                run_start = None;
            }
            _ => {}
        }
    }
    out
}

/// Outcome of [`reverse_configuration_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseCheck {
    /// Per-node flag, aligned with the map cells: `Some(true)` when the
    /// unique stable solution hangs in the reverse configuration
    /// (`y3 < 0` and `y4 < 0`), `Some(false)` when it does not, `None`
    /// where the check does not apply (flagged cell, stable count ≠ 1, or
    /// zero vertical load at the node).
    pub flags: Vec<Option<bool>>,
    /// Free-node heights `(y3, y4)` of the unique stable solution where
    /// applicable.
    pub stable_heights: Vec<Option<(f64, f64)>>,
    /// Number of applicable cells.
    pub applicable: usize,
    /// Applicable cells in the reverse configuration.
    pub reverse_count: usize,
}

/// For every 1-stable cell of a symmetric-loading map, check whether the
/// unique stable solution hangs below the base line (`y3 < 0` and
/// `y4 < 0`) — the expected posture under pressing loads. Errors unless
/// the map's loading is symmetric (`F3 = F4` everywhere, no horizontal
/// components); nodes whose vertical load is zero are skipped.
pub fn reverse_configuration_check(map: &RegionMap) -> Result<ReverseCheck> {
    let spec = &map.spec;
    let axes_symmetric = !matches!(spec.axis1.param, SliceParam::F3 | SliceParam::F4)
        && !matches!(spec.axis2.param, SliceParam::F3 | SliceParam::F4);
    let fixed_forces_used = spec.axis1.param != SliceParam::F3F4
        && spec.axis2.param != SliceParam::F3F4;
    let fixed_symmetric = !fixed_forces_used || spec.loading.f3 == spec.loading.f4;
    if !axes_symmetric
        || !fixed_symmetric
        || spec.loading.f3x != 0.0
        || spec.loading.f4x != 0.0
    {
        return Err(Error::InvalidSlice(
            "reverse-configuration check requires a symmetric vertical loading (F3 = F4)"
                .into(),
        ));
    }

    let (n1, n2) = (spec.axis1.count, spec.axis2.count);
    let mut flags = vec![None; map.cells.len()];
    let mut heights = vec![None; map.cells.len()];
    let mut applicable = 0usize;
    let mut reverse_count = 0usize;
    for i in 0..n1 {
        for j in 0..n2 {
            let cell = map.cell(i, j);
            if cell.flag != CellFlag::Ok || cell.stable_count != 1 {
                continue;
            }
            let Ok((g, l, _rho)) = spec.params_at(i, j) else { continue };
            if l.f4 == 0.0 {
                continue;
            }
            let config = cell.stable_configs[0];
            let n = node_coordinates(&g, &config);
            let is_reverse = n.y3 < 0.0 && n.y4 < 0.0;
            let at = i * n2 + j;
            flags[at] = Some(is_reverse);
            heights[at] = Some((n.y3, n.y4));
            applicable += 1;
            if is_reverse {
                reverse_count += 1;
            }
        }
    }
    Ok(ReverseCheck { flags, stable_heights: heights, applicable, reverse_count })
}

/// Solutions at one node of a map (re-solved on demand; used by output
/// writers that need full equilibrium data rather than counts).
pub fn solutions_at(spec: &SliceSpec, i: usize, j: usize) -> Result<Vec<Equilibrium>> {
    let (g, l, rho) = spec.params_at(i, j)?;
    crate::solve_equilibria(&g, &l, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unloaded_slice(n1: usize, n2: usize) -> SliceSpec {
        SliceSpec {
            axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, n1).unwrap(),
            axis2: AxisSpec::new(SliceParam::L2, 0.0, 3.0, n2).unwrap(),
            geometry: Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap(),
            loading: Loading::UNLOADED,
            rho: 1.0,
        }
    }

    #[test]
    fn axis_and_slice_validation() {
        assert!(AxisSpec::new(SliceParam::Rho, 0.1, 2.0, 1).is_err());
        assert!(AxisSpec::new(SliceParam::Rho, 0.0, 2.0, 10).is_err());
        assert!(AxisSpec::new(SliceParam::Rho, -0.5, 2.0, 10).is_err());
        assert!(AxisSpec::new(SliceParam::L2, 2.0, 1.0, 10).is_err());
        assert!(AxisSpec::new(SliceParam::L2, 0.0, f64::INFINITY, 10).is_err());
        assert!(AxisSpec::new(SliceParam::L2, 0.0, 3.0, 10).is_ok());

        let mut s = unloaded_slice(8, 8);
        assert!(s.validate().is_ok());
        s.axis2.param = SliceParam::Rho;
        assert!(s.validate().is_err()); // duplicate parameter
        s.axis2.param = SliceParam::F3F4;
        s.axis1.param = SliceParam::F4;
        s.axis1.min = -5.0;
        assert!(s.validate().is_err()); // overlapping force axes

        let mut s = unloaded_slice(8, 8);
        s.axis1 = AxisSpec::new(SliceParam::F3F4, -10.0, 0.0, 8).unwrap();
        s.rho = -1.0;
        assert!(s.validate().is_err()); // fixed rho must be positive
    }

    #[test]
    fn axis_values_hit_endpoints_exactly() {
        let a = AxisSpec::new(SliceParam::L2, 0.1, 0.7, 7).unwrap();
        assert_eq!(a.value(0), 0.1);
        assert_eq!(a.value(6), 0.7);
        assert!((a.step() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn unloaded_map_structure() {
        let spec = unloaded_slice(24, 25);
        let map = classify_slice(&spec).unwrap();
        assert_eq!(map.cells.len(), 24 * 25);
        // L2 = 0 column is flagged invalid, never solved.
        for i in 0..24 {
            assert_eq!(map.cell(i, 0).flag, CellFlag::InvalidParams);
        }
        // Cells on a detected transition are excluded from the count-range
        // assertion: a node may sit exactly on the boundary variety, where
        // the merging solutions are marginal and the stable count dips.
        let mut on_boundary = vec![false; map.cells.len()];
        for e in &map.boundary_edges {
            on_boundary[e.a.0 * 25 + e.a.1] = true;
            on_boundary[e.b.0 * 25 + e.b.1] = true;
        }
        let mut seen_two = false;
        for (at, cell) in map.cells.iter().enumerate() {
            assert!(cell.stable_count <= cell.total_count);
            assert!(cell.total_count <= 6);
            if cell.flag == CellFlag::Ok {
                assert_eq!(cell.stable_configs.len(), cell.stable_count);
                if !on_boundary[at] {
                    assert!(cell.stable_count >= 1 && cell.stable_count <= 2);
                }
                seen_two |= cell.stable_count == 2;
            }
        }
        assert!(seen_two, "slice must intersect the 2-stable band");
        assert!(!map.boundary_edges.is_empty());
        assert!(map.regions_with_stable_count(2) >= 1);
        let solved = map.cells.iter().filter(|c| c.flag == CellFlag::Ok).count();
        let merged: usize = map.regions.iter().map(|r| r.cells).sum();
        assert_eq!(solved, merged);
    }

    #[test]
    fn parallel_and_sequential_maps_are_identical() {
        let spec = unloaded_slice(10, 11);
        let par = classify_slice(&spec).unwrap();
        let seq = classify_slice_seq(&spec).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn boundary_alignment_positive_and_negative_controls() {
        let spec = unloaded_slice(60, 61);
        let map = classify_slice(&spec).unwrap();
        let good = verify_boundaries(&map, unloaded_lines_variety);
        assert!(
            good.alignment_fraction >= 0.95,
            "line variety should explain the boundary, got {}",
            good.alignment_fraction
        );
        // Deliberately wrong variety: a line through the band interior.
        let bad = verify_boundaries(&map, |rho, l2| 2.0 * rho - l2);
        assert!(
            bad.alignment_fraction < 0.5,
            "negative control aligned too well: {}",
            bad.alignment_fraction
        );
        assert!(bad.worst_distance_steps > good.worst_distance_steps);
    }

    #[test]
    fn operation_range_unloaded_band() {
        let g = Geometry::zero_free_length(1.0, 1.5, 100.0).unwrap();
        let axis = AxisSpec::new(SliceParam::Rho, 0.01, 1.6, 319).unwrap();
        let ranges = operation_range(&g, &Loading::UNLOADED, &axis).unwrap();
        assert_eq!(ranges.len(), 1);
        let r = &ranges[0];
        let step = axis.step();
        assert!((r.lo - 0.25).abs() <= step);
        assert!((r.hi - 1.25).abs() <= step);
        assert!((r.width - 1.0).abs() <= 2.0 * step);
    }

    #[test]
    fn operation_range_requires_rho_axis(){
        let g = Geometry::zero_free_length(1.0, 1.5, 100.0).unwrap();
        let axis = AxisSpec::new(SliceParam::L2, 0.1, 1.6, 20).unwrap();
        assert!(operation_range(&g, &Loading::UNLOADED, &axis).is_err());
    }

    #[test]
    fn reverse_check_pressing_versus_pulling() {
        let g = Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap();
        let pressing = SliceSpec {
            axis1: AxisSpec::new(SliceParam::Rho, 0.1, 1.8, 18).unwrap(),
            axis2: AxisSpec::new(SliceParam::F3F4, -10.0, -2.0, 5).unwrap(),
            geometry: g,
            loading: Loading::UNLOADED,
            rho: 1.0,
        };
        let map = classify_slice(&pressing).unwrap();
        let check = reverse_configuration_check(&map).unwrap();
        assert!(check.applicable > 0);
        assert_eq!(check.applicable, check.reverse_count);

        let pulling = SliceSpec {
            axis2: AxisSpec::new(SliceParam::F3F4, 2.0, 10.0, 5).unwrap(),
            ..pressing.clone()
        };
        let map = classify_slice(&pulling).unwrap();
        let check = reverse_configuration_check(&map).unwrap();
        assert!(check.applicable > 0);
        assert_eq!(check.reverse_count, 0);
        for h in check.stable_heights.iter().flatten() {
            assert!(h.0 > 0.0 && h.1 > 0.0);
        }
    }

    #[test]
    fn reverse_check_rejects_asymmetric_maps() {
        let g = Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap();
        let spec = SliceSpec {
            axis1: AxisSpec::new(SliceParam::Rho, 0.1, 1.8, 6).unwrap(),
            axis2: AxisSpec::new(SliceParam::F4, -10.0, -2.0, 4).unwrap(),
            geometry: g,
            loading: Loading::UNLOADED,
            rho: 1.0,
        };
        let map = classify_slice(&spec).unwrap();
        assert!(matches!(
            reverse_configuration_check(&map),
            Err(Error::InvalidSlice(_))
        ));
    }

    #[test]
    fn sextic_varieties_vanish_at_known_band_edges() {
        // For the unit-strut symmetric mechanism under F4 = 0, the band
        // edges sit at rho = 0 and rho = 1; the outer sextic reduces to
        // 64e12·(rho² − 1)³.
        let v = symmetric_sextic_outer(1.0, 0.0);
        assert_eq!(v, 0.0);
        // Scale-free near-zero checks at the F4 = −10 edges.
        let near = |rho: f64| {
            let inner = symmetric_sextic_inner(rho, -10.0);
            let outer = symmetric_sextic_outer(rho, -10.0);
            inner.abs().min(outer.abs())
        };
        assert!(near(0.2152) < 1e-2 * 64e12);
        assert!(near(0.8049) < 1e-2 * 64e12);
    }
}
