//! Acceptance gate: one test per acceptance criterion, each reported as a
//! single pass/fail line by the test harness.
//!
//! The criteria pin the library against frozen reference behavior: the
//! canonical operating points, the boundary varieties of the two slices
//! with printed closed forms, the degree-6 structure of the eliminant,
//! brute-force energy-descent oracles, finite-difference derivative
//! checks, and the ideal-spring limit of the free-length solver.
//!
//! Count assertions over classified maps exclude cells incident to a
//! detected count transition: exactly at a region boundary the root
//! structure is multiple and the count is ill-defined on a grid.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::*;
use rand::Rng;
use tensegrity_solver::atlas::{
    classify_slice, intervals_from_sweep, sweep_rho, AxisSpec, CellFlag, RegionMap,
    SliceParam, SliceSpec,
};
use tensegrity_solver::dksp::{solve_dksp, stable_count, Stability};
use tensegrity_solver::freelength::{self, FreeLengthOptions};
use tensegrity_solver::model;
use tensegrity_solver::poly::roots::deflate_circular_factor;
use tensegrity_solver::poly::sylvester::sylvester_resultant;
use tensegrity_solver::poly::{build_tanhalf_system, Var};
use tensegrity_solver::{solve_equilibria, special, Geometry, Loading};

/// Stable-count values over solved cells that are not incident to a
/// detected count-transition edge.
fn interior_count_values(map: &RegionMap) -> BTreeSet<usize> {
    let n2 = map.spec.axis2.count;
    let mut near_boundary = vec![false; map.cells.len()];
    for e in &map.boundary_edges {
        near_boundary[e.a.0 * n2 + e.a.1] = true;
        near_boundary[e.b.0 * n2 + e.b.1] = true;
    }
    map.cells
        .iter()
        .enumerate()
        .filter(|(i, c)| c.flag == CellFlag::Ok && !near_boundary[*i])
        .map(|(_, c)| c.stable_count)
        .collect()
}

/// Criterion 1 — unloaded reference point: exactly two stable equilibria,
/// mirror-symmetric, both in a parallelogram pose; solved in under a
/// second.
#[test]
fn acceptance_01_unloaded_point_two_stable_mirror_parallelogram() {
    let start = Instant::now();
    let g = Geometry::zero_free_length(1.0, 1.5, 100.0).unwrap();
    let rho = 1.0;
    let sols = solve_equilibria(&g, &Loading::UNLOADED, rho).unwrap();
    let stable: Vec<_> =
        sols.iter().filter(|e| e.stability == Stability::Stable).collect();
    assert_eq!(stable.len(), 2, "expected exactly 2 stable equilibria");
    let (a, b) = (stable[0], stable[1]);
    assert!(
        (a.config.theta1 + b.config.theta1).abs() < 1e-8
            && (a.config.theta2 + b.config.theta2).abs() < 1e-8,
        "stable pair is not mirror-symmetric: {:?} vs {:?}",
        a.config,
        b.config
    );
    for e in &stable {
        let n = model::node_coordinates(&g, &e.config);
        assert!((n.y3 - n.y4).abs() < 1e-9, "parallelogram height check");
        assert!(
            ((n.x3 - n.x4).abs() - rho).abs() < 1e-9,
            "parallelogram width check"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "runtime budget exceeded");
}

/// Criterion 2 — unloaded operation range: the bistable interval at
/// L2 = 3/2 ends at ρ = 0.25 and ρ = 1.25 within one grid step of 0.005
/// with width 1.0 ± 0.01; at L2 = 0.5 the width is 0.5 ± 0.01.
#[test]
fn acceptance_02_unloaded_operation_range_boundaries() {
    let axis = AxisSpec::new(SliceParam::Rho, 0.005, 2.0, 400).unwrap();
    let step = axis.step();
    assert!((step - 0.005).abs() < 1e-12);

    let start = Instant::now();
    let g = Geometry::zero_free_length(1.0, 1.5, 100.0).unwrap();
    let sweep = sweep_rho(&g, &Loading::UNLOADED, &axis).unwrap();
    let intervals = intervals_from_sweep(&sweep);
    assert_eq!(intervals.len(), 1, "expected a single bistable interval");
    let iv = intervals[0];
    assert!((iv.lo - 0.25).abs() <= step, "lo = {}", iv.lo);
    assert!((iv.hi - 1.25).abs() <= step, "hi = {}", iv.hi);
    assert!((iv.width - 1.0).abs() <= 0.01, "width = {}", iv.width);
    assert!(start.elapsed().as_secs_f64() < 30.0, "runtime budget exceeded");

    let start = Instant::now();
    let g = Geometry::zero_free_length(1.0, 0.5, 100.0).unwrap();
    let sweep = sweep_rho(&g, &Loading::UNLOADED, &axis).unwrap();
    let intervals = intervals_from_sweep(&sweep);
    assert_eq!(intervals.len(), 1, "expected a single bistable interval");
    assert!(
        (intervals[0].width - 0.5).abs() <= 0.01,
        "width = {}",
        intervals[0].width
    );
    assert!(start.elapsed().as_secs_f64() < 30.0, "runtime budget exceeded");
}

/// Criterion 3 — symmetric reference point and slice: two stable
/// equilibria at ρ = 3/4, F = −10, and the region boundary of the
/// 200×200 (ρ, F) slice crosses the zero set of the two printed sextics
/// (strict sign change between edge endpoints) on at least 98% of the
/// detected boundary edges.
#[test]
fn acceptance_03_symmetric_point_and_sextic_alignment() {
    let g = Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap();
    let sols = solve_equilibria(&g, &Loading::vertical(-10.0, -10.0), 0.75).unwrap();
    assert_eq!(stable_count(&sols), 2, "expected exactly 2 stable equilibria");

    let start = Instant::now();
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.01, 1.2, 200).unwrap(),
        axis2: AxisSpec::new(SliceParam::F3F4, -30.0, -0.2, 200).unwrap(),
        geometry: g,
        loading: Loading::UNLOADED,
        rho: 1.0,
    };
    let map = classify_slice(&spec).unwrap();
    let edges = &map.boundary_edges;
    assert!(!edges.is_empty(), "no boundary detected");
    let mut sign_changes = 0usize;
    for e in edges {
        let (xa, ya) = map.node_values(e.a.0, e.a.1);
        let (xb, yb) = map.node_values(e.b.0, e.b.1);
        let va = tensegrity_solver::atlas::symmetric_sextics_variety(xa, ya);
        let vb = tensegrity_solver::atlas::symmetric_sextics_variety(xb, yb);
        if va == 0.0 || vb == 0.0 || (va < 0.0) != (vb < 0.0) {
            sign_changes += 1;
        }
    }
    let fraction = sign_changes as f64 / edges.len() as f64;
    assert!(
        fraction >= 0.98,
        "sextic sign-change alignment {fraction:.4} ({sign_changes}/{})",
        edges.len()
    );
    assert!(start.elapsed().as_secs_f64() < 600.0, "runtime budget exceeded");
}

/// Criterion 4 — general reference point and slice: two stable equilibria
/// at L2 = 3/2, ρ = 7/10, F = −10, and the (ρ, L2) slice under that load
/// shows a single connected 2-stable region whose complement is 1-stable.
#[test]
fn acceptance_04_general_point_and_single_bistable_region() {
    let g = Geometry::zero_free_length(1.0, 1.5, 100.0).unwrap();
    let sols = solve_equilibria(&g, &Loading::vertical(-10.0, -10.0), 0.7).unwrap();
    assert_eq!(stable_count(&sols), 2, "expected exactly 2 stable equilibria");

    let start = Instant::now();
    let spec = SliceSpec {
        axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, 200).unwrap(),
        axis2: AxisSpec::new(SliceParam::L2, 0.05, 2.0, 200).unwrap(),
        geometry: Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap(),
        loading: Loading::vertical(-10.0, -10.0),
        rho: 1.0,
    };
    let map = classify_slice(&spec).unwrap();
    assert_eq!(
        map.regions_with_stable_count(2),
        1,
        "expected one connected 2-stable region"
    );
    let values = interior_count_values(&map);
    assert_eq!(
        values,
        BTreeSet::from([1usize, 2]),
        "interior count structure should be exactly {{1, 2}}"
    );
    assert!(start.elapsed().as_secs_f64() < 600.0, "runtime budget exceeded");
}

/// Criterion 5 — deep-pressing slices: two parameterizations circulate
/// for the (ρ, F4) partition (F3 = −10 with L2 = 3/2 per one source
/// passage, F3 = −30 with L2 = 1 per the other). Both must show exactly
/// the count values {1, 2}; the discrepancy itself is recorded by the
/// reproduction report, not resolved here.
#[test]
fn acceptance_05_deep_pressing_slices_show_counts_one_and_two() {
    for (f3, l2) in [(-10.0, 1.5), (-30.0, 1.0)] {
        let spec = SliceSpec {
            axis1: AxisSpec::new(SliceParam::Rho, 0.05, 2.0, 200).unwrap(),
            axis2: AxisSpec::new(SliceParam::F4, -30.0, 0.0, 200).unwrap(),
            geometry: Geometry::zero_free_length(1.0, l2, 100.0).unwrap(),
            loading: Loading::vertical(f3, 0.0),
            rho: 1.0,
        };
        let map = classify_slice(&spec).unwrap();
        let values = interior_count_values(&map);
        assert_eq!(
            values,
            BTreeSet::from([1usize, 2]),
            "variant F3={f3}, L2={l2}: interior count structure"
        );
    }
}

/// Criterion 6 — degree-6 structure: across 10⁴ random parameter samples
/// the deflated eliminant has degree ≤ 6, and the solver returns ≤ 6
/// equilibria, each certified by a trigonometric residual < 1e−8.
#[test]
fn acceptance_06_eliminant_degree_and_solution_count_bounds() {
    let mut r = rng(0xACC_0006);
    for trial in 0..10_000 {
        let g = Geometry::zero_free_length(
            r.gen_range(0.3..2.5),
            r.gen_range(0.3..2.5),
            r.gen_range(20.0..400.0),
        )
        .unwrap();
        let horizontals = r.gen_bool(0.3);
        let l = Loading::new(
            r.gen_range(-50.0..50.0),
            r.gen_range(-50.0..50.0),
            if horizontals { r.gen_range(-20.0..20.0) } else { 0.0 },
            if horizontals { r.gen_range(-20.0..20.0) } else { 0.0 },
        )
        .unwrap();
        let rho = r.gen_range(0.05..2.5);

        let (p1, p2) = build_tanhalf_system(&g, &l, rho)
            .unwrap_or_else(|e| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {e}"));
        let eliminant = sylvester_resultant(&p1, &p2, Var::T2)
            .unwrap_or_else(|e| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {e}"));
        let (deflated, _removed) = deflate_circular_factor(&eliminant);
        let degree = deflated.degree().unwrap_or(0);
        assert!(
            degree <= 6,
            "trial {trial}: deflated eliminant degree {degree} (g={g:?}, l={l:?}, rho={rho})"
        );

        let sols = solve_dksp(&g, &l, rho)
            .unwrap_or_else(|e| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {e}"));
        assert!(
            sols.len() <= 6,
            "trial {trial}: {} equilibria (g={g:?}, l={l:?}, rho={rho})",
            sols.len()
        );
        for e in &sols {
            assert!(
                e.residual < 1e-8,
                "trial {trial}: residual {} (g={g:?}, l={l:?}, rho={rho})",
                e.residual
            );
        }
    }
}

/// Criterion 7 — stability oracle equivalence: on 100 random parameter
/// points the stable solutions of the polynomial solver equal the local
/// minima found by the dense-grid energy-descent oracle (same count,
/// paired within 1e−4 rad).
#[test]
fn acceptance_07_stable_solutions_equal_descent_oracle() {
    let mut r = rng(0xACC_0007);
    for trial in 0..100 {
        let g = random_geometry(&mut r);
        let horizontals = r.gen_bool(0.3);
        let l = random_loading(&mut r, horizontals);
        let rho = random_rho(&mut r);
        let sols = solve_dksp(&g, &l, rho)
            .unwrap_or_else(|e| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {e}"));
        let oracle = descent_stable_set(&g, &l, rho, 400);
        match_pair_sets(&stable_pairs(&sols), &oracle, 1e-4).unwrap_or_else(|m| {
            panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {m}")
        });
    }
}

/// Criterion 8 — symmetric-case theory: every distinct-angle solution has
/// det(H) < 0, the closed-form determinant matches the numerical one to
/// 1e−8 relative over 10³ samples carrying the branch, and in the
/// unloaded case at least 3 of the 4 flat poses are unstable in every
/// sample.
#[test]
fn acceptance_08_symmetric_theory_checks() {
    let mut r = rng(0xACC_0008);
    let mut with_branch = 0usize;
    let mut attempts = 0usize;
    while with_branch < 1000 {
        attempts += 1;
        assert!(attempts <= 5000, "draw scheme starves the distinct-angle branch");
        let strut = r.gen_range(0.4..2.2);
        let g = Geometry::zero_free_length(strut, strut, r.gen_range(20.0..400.0)).unwrap();
        let sign = if r.gen_bool(0.8) { -1.0 } else { 1.0 };
        let f4 = sign * r.gen_range(0.5..50.0);
        let rho = r.gen_range(0.1..1.9) * strut;
        let branches = special::solve_symmetric(&g, f4, rho).unwrap();
        if branches.distinct_angle.is_empty() {
            continue;
        }
        with_branch += 1;
        for e in &branches.distinct_angle {
            assert!(
                e.det_h < 0.0,
                "distinct-angle solution not unstable: det(H) = {} (L={strut}, f4={f4}, rho={rho})",
                e.det_h
            );
            assert_eq!(e.stability, Stability::Unstable);
            let t2 = (e.config.theta2 / 2.0).tan();
            let closed = special::det_h_distinct_angle(&g, f4, rho, t2)
                .unwrap_or_else(|err| panic!("closed form failed at t2={t2}: {err}"));
            let rel = (closed - e.det_h).abs() / e.det_h.abs().max(closed.abs());
            assert!(
                rel < 1e-8,
                "closed form {closed} vs numeric {} (rel {rel:.3e}, L={strut}, f4={f4}, rho={rho})",
                e.det_h
            );
        }
    }

    for trial in 0..1000 {
        let l1: f64 = r.gen_range(0.4..2.2);
        let l2 = r.gen_range(0.4..2.2);
        let g = Geometry::zero_free_length(l1, l2, r.gen_range(20.0..400.0)).unwrap();
        let rho = r.gen_range(0.05..0.7 * (l1 + l2));
        let sols = special::solve_unloaded(&g, rho).unwrap();
        let flats: Vec<_> = sols.iter().filter(|e| e.flat).collect();
        assert_eq!(flats.len(), 4, "trial {trial}: expected 4 flat poses");
        let unstable = flats
            .iter()
            .filter(|e| e.stability == Stability::Unstable)
            .count();
        assert!(
            unstable >= 3,
            "trial {trial}: only {unstable} of 4 flat poses unstable (g={g:?}, rho={rho})"
        );
    }
}

/// Criterion 9 — derivative correctness: analytic gradient and Hessian
/// agree with central finite differences to 1e−6 / 1e−5 relative over 10³
/// random poses, covering zero and positive free length, with and without
/// horizontal force components.
#[test]
fn acceptance_09_derivatives_match_finite_differences() {
    let mut r = rng(0xACC_0009);
    for block in 0..4 {
        let free_length = block >= 2;
        let horizontals = block % 2 == 1;
        for trial in 0..250 {
            let l1: f64 = r.gen_range(0.4..2.2);
            let l2 = r.gen_range(0.4..2.2);
            let l0 = if free_length {
                r.gen_range(0.05..0.45) * l1.min(l2)
            } else {
                0.0
            };
            let g = Geometry::new(l1, l2, r.gen_range(20.0..400.0), l0).unwrap();
            let l = random_loading(&mut r, horizontals);
            let rho = random_rho(&mut r);
            // Keep the finite-difference stencil away from collapsed
            // springs (the model rejects them as degenerate).
            let mut pose = random_pose(&mut r, rho);
            let mut guard = 0;
            while model::spring_lengths(&g, &pose).iter().any(|&li| li < 1e-3) {
                pose = random_pose(&mut r, rho);
                guard += 1;
                assert!(guard < 200, "could not draw a non-degenerate pose");
            }

            let ga = model::gradient(&g, &l, &pose).unwrap();
            let gf = fd_gradient(&g, &l, &pose);
            let gscale = gf[0].abs().max(gf[1].abs()).max(1.0);
            let gerr = (ga[0] - gf[0]).abs().max((ga[1] - gf[1]).abs()) / gscale;
            assert!(
                gerr < 1e-6,
                "block {block} trial {trial}: gradient rel err {gerr:.3e} (g={g:?}, l={l:?}, pose={pose:?})"
            );

            let ha = model::hessian(&g, &l, &pose).unwrap();
            let hf = fd_hessian(&g, &l, &pose);
            let mut hscale = 1.0f64;
            let mut herr = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    hscale = hscale.max(hf[i][j].abs());
                    herr = herr.max((ha[i][j] - hf[i][j]).abs());
                }
            }
            let herr = herr / hscale;
            assert!(
                herr < 1e-5,
                "block {block} trial {trial}: Hessian rel err {herr:.3e} (g={g:?}, l={l:?}, pose={pose:?})"
            );
        }
    }
}

/// Criterion 10 — free-length properties: the l0 → 0⁺ solutions coincide
/// with the ideal-spring solver within 1e−5 rad (away from poses with a
/// collapsing spring, where admissibility rightly removes solutions); no
/// campaign sample ever yields more than 6 accepted equilibria; and on 20
/// samples the accepted stable set is complete against a 500×500 descent
/// oracle. The high-degree symbolic eliminant for l0 > 0 is out of scope,
/// so no claim beyond these empirical bounds is made.
#[test]
fn acceptance_10_free_length_limit_campaign_completeness() {
    // (a) Ideal-spring limit at the canonical points plus random loaded
    // draws.
    let mut points: Vec<(Geometry, Loading, f64)> = vec![
        (
            Geometry::zero_free_length(1.0, 1.5, 100.0).unwrap(),
            Loading::vertical(-10.0, -10.0),
            0.7,
        ),
        (
            Geometry::zero_free_length(1.0, 1.0, 100.0).unwrap(),
            Loading::vertical(-10.0, -10.0),
            0.75,
        ),
    ];
    let mut r = rng(0xACC_0010);
    for _ in 0..8 {
        points.push((random_geometry(&mut r), random_loading(&mut r, false), random_rho(&mut r)));
    }
    for (i, (g, l, rho)) in points.iter().enumerate() {
        let ideal = solve_equilibria(g, l, *rho)
            .unwrap_or_else(|e| panic!("point {i}: ideal solve failed: {e}"));
        // Solutions with a near-zero spring are inadmissible for any
        // positive free length; the limit statement excludes them.
        let expected: Vec<(f64, f64)> = ideal
            .iter()
            .filter(|e| {
                model::spring_lengths(g, &e.config)
                    .iter()
                    .all(|&li| li > 1e-6)
            })
            .map(|e| (e.config.theta1, e.config.theta2))
            .collect();
        let tiny = Geometry::new(g.l1, g.l2, g.k, 1e-8).unwrap();
        let limit = freelength::solve_freelength(&tiny, l, *rho)
            .unwrap_or_else(|e| panic!("point {i}: free-length solve failed: {e}"));
        match_pair_sets(&all_pairs(&limit.equilibria), &expected, 1e-5)
            .unwrap_or_else(|m| panic!("point {i} (g={g:?}, l={l:?}, rho={rho}): {m}"));
    }

    // (b) 500-sample campaign: accepted count never exceeds the
    // ideal-spring bound of 6. A violation panics with the sample, which
    // is the required log.
    for trial in 0..500 {
        let l1: f64 = r.gen_range(0.4..2.2);
        let l2 = r.gen_range(0.4..2.2);
        let l0 = r.gen_range(0.02..0.4) * l1.min(l2);
        let g = Geometry::new(l1, l2, r.gen_range(20.0..400.0), l0).unwrap();
        let horizontals = r.gen_bool(0.3);
        let l = random_loading(&mut r, horizontals);
        let rho = random_rho(&mut r);
        let res = freelength::solve_freelength(&g, &l, rho)
            .unwrap_or_else(|e| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {e}"));
        assert!(
            res.equilibria.len() <= 6,
            "counterexample: {} accepted equilibria at g={g:?}, l={l:?}, rho={rho}",
            res.equilibria.len()
        );
    }

    // (c) Completeness of the stable set against the 500×500 descent
    // oracle on 20 samples.
    for trial in 0..20 {
        let l1: f64 = r.gen_range(0.6..1.8);
        let l2 = r.gen_range(0.6..1.8);
        let l0 = r.gen_range(0.05..0.3) * l1.min(l2);
        let g = Geometry::new(l1, l2, r.gen_range(50.0..200.0), l0).unwrap();
        let l = random_loading(&mut r, false);
        let rho = r.gen_range(0.3..1.6);
        let res = freelength::solve_freelength_with(
            &g,
            &l,
            rho,
            &FreeLengthOptions::default(),
        )
        .unwrap_or_else(|e| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {e}"));
        let oracle = descent_stable_set(&g, &l, rho, 500);
        match_pair_sets(&stable_pairs(&res.equilibria), &oracle, 1e-4).unwrap_or_else(
            |m| panic!("trial {trial} (g={g:?}, l={l:?}, rho={rho}): {m}"),
        );
    }

    // Guard the limit statement itself: a representative admissible point
    // keeps all six solutions at l0 = 1e−8.
    let g = Geometry::new(1.0, 1.5, 100.0, 1e-8).unwrap();
    let res =
        freelength::solve_freelength(&g, &Loading::vertical(-10.0, -10.0), 0.7).unwrap();
    assert_eq!(res.equilibria.len(), 6);
}
