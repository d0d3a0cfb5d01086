//! Integration tests for parameter-space classification: grid-refinement
//! stability of the detected boundaries, operation-range behavior under
//! load, and parallel/sequential equivalence.

mod common;

use tensegrity_solver::atlas::{
    classify_slice, classify_slice_seq, intervals_from_sweep, sweep_rho, AxisSpec,
    SliceParam, SliceSpec,
};
use tensegrity_solver::{Geometry, Loading};

fn unloaded_spec(n1: usize, n2: usize) -> SliceSpec {
    SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, n1).unwrap(),
        axis2: AxisSpec::new(SliceParam::L2, 0.05, 3.0, n2).unwrap(),
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap(),
        loading: Loading::UNLOADED,
        rho: 1.0,
    }
}

/// Halving the grid step must not move the detected region boundaries:
/// every coarse boundary midpoint stays within one coarse step of some
/// fine boundary midpoint (distances measured in step units per axis).
#[test]
fn boundaries_are_stable_under_grid_refinement() {
    let coarse = classify_slice(&unloaded_spec(61, 61)).unwrap();
    let fine = classify_slice(&unloaded_spec(121, 121)).unwrap();
    let s1 = coarse.spec.axis1.step();
    let s2 = coarse.spec.axis2.step();
    let fine_mids = fine.boundary_midpoints();
    assert!(!fine_mids.is_empty());
    let mut worst = 0.0f64;
    for (x, y) in coarse.boundary_midpoints() {
        let d = fine_mids
            .iter()
            .map(|(fx, fy)| ((x - fx) / s1).hypot((y - fy) / s2))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    assert!(
        worst <= 1.0,
        "a coarse boundary point drifted {worst:.3} coarse steps from the refined boundary"
    );
}

/// Pressing harder shrinks the bistable actuation range of the symmetric
/// mechanism, and the range stays strictly inside the unloaded band.
#[test]
fn operation_range_shrinks_under_symmetric_pressing() {
    let g = Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap();
    let axis = AxisSpec::new(SliceParam::Rho, 0.01, 1.6, 319).unwrap();
    let width_at = |f: f64| {
        let sweep = sweep_rho(&g, &Loading::vertical(f, f), &axis).unwrap();
        let intervals = intervals_from_sweep(&sweep);
        assert_eq!(intervals.len(), 1, "F={f}: expected one bistable interval");
        intervals[0]
    };
    let light = width_at(-1.0);
    let heavy = width_at(-10.0);
    assert!(light.width > heavy.width, "{} vs {}", light.width, heavy.width);
    // Unloaded band for equal struts is (0, 1); both loaded ranges must
    // sit strictly inside it.
    assert!(light.lo > 0.0 && light.hi < 1.0);
    assert!(heavy.lo > light.lo && heavy.hi < light.hi);
    // Frozen endpoints for the strong-pressing case (two grid steps).
    let step = axis.step();
    assert!((heavy.lo - 0.2152).abs() < 2.0 * step, "lo = {}", heavy.lo);
    assert!((heavy.hi - 0.8049).abs() < 2.0 * step, "hi = {}", heavy.hi);
}

/// Parallel and sequential classification produce identical maps.
#[test]
fn parallel_and_sequential_classification_agree() {
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.01, 1.2, 41).unwrap(),
        axis2: AxisSpec::new(SliceParam::F3F4, -30.0, -0.2, 43).unwrap(),
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap(),
        loading: Loading::UNLOADED,
        rho: 1.0,
    };
    let par = classify_slice(&spec).unwrap();
    let seq = classify_slice_seq(&spec).unwrap();
    assert_eq!(par, seq);
}

/// Cells outside the model domain are flagged, not treated as zero-stable
/// regions, and never join a merged region.
#[test]
fn out_of_domain_cells_are_flagged_and_excluded_from_regions() {
    use tensegrity_solver::atlas::CellFlag;
    // An L2 axis that starts at 0 puts the first column outside the
    // model's domain.
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.1, 1.5, 15).unwrap(),
        axis2: AxisSpec::new(SliceParam::L2, 0.0, 2.0, 21).unwrap(),
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap(),
        loading: Loading::UNLOADED,
        rho: 1.0,
    };
    let map = classify_slice(&spec).unwrap();
    for i in 0..15 {
        let idx = i * 21; // j = 0 is the L2 = 0 column
        assert_eq!(map.cells[idx].flag, CellFlag::InvalidParams);
        assert_eq!(map.region_ids[idx], None);
        assert_eq!(map.cell(i, 1).flag, CellFlag::Ok);
    }
}
