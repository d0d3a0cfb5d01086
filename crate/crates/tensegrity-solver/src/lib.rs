//! Equilibrium analysis of a one-degree-of-freedom planar tensegrity
//! mechanism: two rigid struts pinned at sliding base anchors `A1 = (0, 0)`
//! and `A2 = (rho, 0)`, crossed and coupled by three zero-free-length
//! springs (`A1A4`, `A2A3`, `A3A4`), with a prismatic actuator driving the
//! base width `rho` and optional external forces at the free nodes.
//!
//! The crate answers three questions:
//!
//! 1. **Direct kinetostatics** ([`dksp::solve_dksp`]): for a given geometry,
//!    loading, and actuator input, find *every* configuration where the
//!    elastic potential is stationary, and classify each as a stable,
//!    unstable, or marginal equilibrium via the Hessian's leading principal
//!    minors. The trigonometric stationarity conditions are rationalized
//!    with the tan-half-angle substitution, reduced to a single univariate
//!    polynomial of degree at most six by Sylvester-resultant elimination,
//!    and rooted with companion-matrix eigenvalues plus Newton polishing.
//! 2. **Closed-form branches** ([`special`]): the unloaded mechanism
//!    (parallelogram pair + four flat poses) and the fully symmetric
//!    mechanism (equal-angle quartic + distinct-angle quadratic) admit
//!    reduced solves that double as independent cross-checks of the
//!    general pipeline, including an exact determinant formula proving the
//!    distinct-angle branch is never stable.
//! 3. **Parameter-space structure** ([`atlas`]): dense grids over 2-D
//!    parameter slices record how many stable equilibria exist where,
//!    merge constant-count regions, extract empirical region boundaries,
//!    and verify them against independently known boundary varieties
//!    (three lines for the unloaded slice, two sextics for the symmetric
//!    slice). 1-D sweeps report the actuator operation range (the
//!    two-stable-solution interval).
//!
//! Springs with non-zero free length make the polynomial route intractable;
//! [`freelength::solve_freelength`] covers that regime with deterministic
//! multistart Newton iteration on the analytic gradient plus admissibility
//! filtering (every spring longer than its free length).
//!
//! Grid classification, sweeps, and multistart campaigns run data-parallel
//! under the default `parallel` feature (rayon) and fall back to sequential
//! execution without it; both paths produce bit-identical results.

pub mod atlas;
pub mod dksp;
pub mod error;
pub mod exec;
pub mod freelength;
pub mod model;
pub mod poly;
pub mod special;

pub use dksp::{solve_dksp, Equilibrium, Stability};
pub use error::{Error, Result};
pub use model::{Configuration, Geometry, Loading};

use dksp::EliminationOrder;

/// Solve for all equilibria, routing to the cheapest applicable method.
///
/// Dispatch: non-zero free length goes to the multistart solver; the
/// unloaded and fully symmetric zero-free-length cases use their
/// closed-form/reduced solvers; everything else runs the general
/// elimination pipeline. All paths return the same `Equilibrium` records,
/// sorted by `theta1` ascending.
pub fn solve_equilibria(
    g: &Geometry,
    l: &Loading,
    rho: f64,
) -> Result<Vec<Equilibrium>> {
    if g.l0 > 0.0 {
        return Ok(freelength::solve_freelength(g, l, rho)?.equilibria);
    }
    if l.is_unloaded() {
        return special::solve_unloaded(g, rho);
    }
    if g.l1 == g.l2 && l.f3 == l.f4 && l.f3x == 0.0 && l.f4x == 0.0 {
        return special::solve_symmetric_equilibria(g, l.f4, rho);
    }
    dksp::solve_dksp_ordered(g, l, rho, EliminationOrder::T1First)
}
