//! Closed-form and reduced-degree solvers for two structured cases — the
//! unloaded mechanism and the fully symmetric loaded mechanism — plus the
//! closed-form stability determinant on the symmetric distinct-angle
//! branch.
//!
//! These serve both as fast paths (the dispatcher in [`crate`] routes to
//! them automatically) and as independent cross-checks of the general
//! elimination solver: they derive from hand factorizations of the
//! equilibrium system rather than from resultants.

use serde::{Deserialize, Serialize};

use crate::dksp::{
    self, make_equilibrium, polish_candidate, push_dedup, Equilibrium,
};
use crate::error::{Error, Result};
use crate::model::{self, angle_distance, normalize_angle, Configuration, Geometry, Loading};
use crate::poly::roots::real_roots;
use crate::poly::Poly;

/// Relative tolerance for the symmetry preconditions (`L1 = L2`).
pub const SYMMETRY_TOL_REL: f64 = 1e-12;

/// Solutions of the fully symmetric case, split by branch.
///
/// The equilibrium system factors when `L1 = L2 = L` and the loading is a
/// common vertical force `F` at both free nodes: one factor forces
/// `θ1 = θ2` (a quartic in the shared tan-half variable, up to 4
/// solutions), the other couples the two tan-half variables through an
/// involution and reduces to a quadratic (up to 2 solutions with
/// `θ1 ≠ θ2`, always appearing as the swap pair `(θa, θb)`, `(θb, θa)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCaseSolutions {
    /// Solutions with `θ1 = θ2`, ordered by `θ1`.
    pub equal_angle: Vec<Equilibrium>,
    /// Solutions with `θ1 ≠ θ2`, stored as a swap pair, ordered by `θ1`.
    pub distinct_angle: Vec<Equilibrium>,
}

/// The open interval of actuator lengths for which the unloaded mechanism
/// has non-flat equilibria: `(|L2 − L1|/2, (L1 + L2)/2)`.
///
/// Inside it the two non-flat mirror equilibria exist (both stable);
/// at the ends they merge into flat poses.
pub fn unloaded_band(g: &Geometry) -> (f64, f64) {
    (0.5 * (g.l2 - g.l1).abs(), 0.5 * (g.l1 + g.l2))
}

/// All equilibria of the unloaded (`F3 = F4 = 0`) zero-free-length
/// mechanism, by closed form.
///
/// The four flat poses `θi ∈ {0, π}` are equilibria for every `ρ` (every
/// gradient term carries a sine factor). Inside [`unloaded_band`] there is
/// additionally a mirror pair of non-flat equilibria with
/// `cos θ1 = (4ρ² + L1² − L2²)/(4ρL1)`, `L2·sin θ2 = L1·sin θ1`,
/// `L2·cos θ2 = 2ρ − L1·cos θ1` (an exact point on the unit circle — the
/// identity `sin² + cos² = 1` reduces to the `cos θ1` formula). The
/// closed-form values seed a Newton polish so the reported residuals are
/// at round-off level. Output ordering and certification match
/// [`crate::dksp::solve_dksp`].
pub fn solve_unloaded(g: &Geometry, rho: f64) -> Result<Vec<Equilibrium>> {
    if g.l0 != 0.0 {
        return Err(Error::InvalidParameter(
            "unloaded closed form requires zero free length".into(),
        ));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let l = Loading::UNLOADED;
    let mut out: Vec<Equilibrium> = Vec::new();

    let cos1 = (4.0 * rho * rho + g.l1 * g.l1 - g.l2 * g.l2) / (4.0 * rho * g.l1);
    if cos1.abs() <= 1.0 {
        let sin1 = (1.0 - cos1 * cos1).max(0.0).sqrt();
        let cos2 = (2.0 * rho - g.l1 * cos1) / g.l2;
        let sin2 = (g.l1 / g.l2) * sin1;
        let th1 = sin1.atan2(cos1);
        let th2 = sin2.atan2(cos2);
        for (a, b) in [(th1, th2), (-th1, -th2)] {
            if let Some(e) = polish_candidate(g, &l, rho, a, b)? {
                push_dedup(&mut out, e);
            }
        }
    }

    let pi = std::f64::consts::PI;
    for a in [0.0, pi] {
        for b in [0.0, pi] {
            accept_direct(g, &l, rho, a, b, &mut out)?;
        }
    }
    sort_by_angles(&mut out);
    Ok(out)
}

/// Solve the fully symmetric case (`L1 = L2 = L`, vertical loads
/// `F3 = F4 = f4`), returning the two branches separately.
///
/// The equal-angle branch solves the quartic
/// `f4·t⁴ + 4k(L+ρ)·t³ + 4k(ρ−L)·t + (−f4) = 0` in `t = tan(θ/2)`
/// (ascending coefficients `[−f4, 4k(ρ−L), 0, 4k(L+ρ), f4]`). The
/// distinct-angle branch solves the quadratic
/// `a·t2² + b·t2 + c = 0` with
/// `a = f4³ + 4f4k²ρ(L+ρ)`, `b = 16k³ρ³ + 4f4²kρ`,
/// `c = −f4³ + 4f4k²ρ(L−ρ)`, and recovers the partner variable through
/// the involution `t1 = (f4·t2 + 2kρ)/(2kρ·t2 − f4)`, which exchanges the
/// two quadratic roots — hence the swap-pair structure. For `f4 = 0` the
/// quadratic degenerates (`a = c = 0`, root `t2 = 0` only) and the
/// unloaded closed form covers the case instead, partitioned by branch.
///
/// Every candidate is Newton-polished and residual-checked against the
/// full equilibrium conditions before being accepted.
pub fn solve_symmetric(g: &Geometry, f4: f64, rho: f64) -> Result<SymmetricCaseSolutions> {
    check_symmetric(g)?;
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    if !f4.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "vertical load must be finite, got {f4}"
        )));
    }

    if f4 == 0.0 {
        // Degenerate loading: the distinct-angle quadratic collapses to
        // `16k³ρ³·t2 = 0`; the unloaded closed form covers the case.
        let all = solve_unloaded(g, rho)?;
        let (equal, distinct): (Vec<_>, Vec<_>) = all
            .into_iter()
            .partition(|e| angle_distance(e.config.theta1, e.config.theta2) < 1e-9);
        return Ok(SymmetricCaseSolutions { equal_angle: equal, distinct_angle: distinct });
    }

    let l = Loading::vertical(f4, f4);
    let (k, big_l) = (g.k, g.l1);

    let mut equal: Vec<Equilibrium> = Vec::new();
    let quartic = Poly::new(vec![
        -f4,
        4.0 * k * (rho - big_l),
        0.0,
        4.0 * k * (big_l + rho),
        f4,
    ]);
    for root in real_roots(&quartic, None)? {
        let th = 2.0 * root.value.atan();
        if let Some(e) = polish_candidate(g, &l, rho, th, th)? {
            push_dedup(&mut equal, e);
        }
    }

    let mut distinct: Vec<Equilibrium> = Vec::new();
    let a = f4.powi(3) + 4.0 * f4 * k * k * rho * (big_l + rho);
    let b = 16.0 * k.powi(3) * rho.powi(3) + 4.0 * f4 * f4 * k * rho;
    let c = -f4.powi(3) + 4.0 * f4 * k * k * rho * (big_l - rho);
    for root in real_roots(&Poly::new(vec![c, b, a]), None)? {
        let t2 = root.value;
        let denom = 2.0 * k * rho * t2 - f4;
        let th1 = if denom.abs() > 1e-10 * (k * rho * (1.0 + t2.abs()) + f4.abs()) {
            2.0 * ((f4 * t2 + 2.0 * k * rho) / denom).atan()
        } else {
            // Partner variable at infinity: the other strut lies flat.
            std::f64::consts::PI
        };
        let th2 = 2.0 * t2.atan();
        if let Some(e) = polish_candidate(g, &l, rho, th1, th2)? {
            push_dedup(&mut distinct, e);
        }
    }

    sort_by_angles(&mut equal);
    sort_by_angles(&mut distinct);
    Ok(SymmetricCaseSolutions { equal_angle: equal, distinct_angle: distinct })
}

/// Union of both symmetric branches as a single deduplicated solution
/// list, ordered like [`crate::dksp::solve_dksp`] output (used by the
/// top-level dispatcher).
pub fn solve_symmetric_equilibria(
    g: &Geometry,
    f4: f64,
    rho: f64,
) -> Result<Vec<Equilibrium>> {
    let branches = solve_symmetric(g, f4, rho)?;
    let mut out = Vec::new();
    for e in branches.equal_angle.into_iter().chain(branches.distinct_angle) {
        push_dedup(&mut out, e);
    }
    sort_by_angles(&mut out);
    Ok(out)
}

/// Closed-form Hessian determinant on the symmetric distinct-angle
/// branch, as a function of the branch parameter `t2 = tan(θ2/2)`:
///
/// ```text
/// det(H) = −4L²·(kρ·t2² − f4·t2 − kρ)² / (1 + t2²)²
/// ```
///
/// This is non-positive for every real `t2`, which is the closed-form
/// proof that the distinct-angle equilibria are never stable. It agrees
/// with the numerically evaluated Hessian determinant at the
/// corresponding configuration (a tested invariant). A widely used
/// denominator-cleared variant of this expression multiplies it by the
/// positive factor `(1+t1²)²(1+t2²)²/L²` (with `t1` the involution
/// partner), which preserves the sign analysis but not the numeric value;
/// the proportionality is also covered by tests.
///
/// Signals [`Error::DenominatorZero`] when `|2kρ·t2 − f4|` falls below
/// `1e−10` of its natural scale: there the partner variable `t1` diverges
/// and the branch parameterization breaks down.
pub fn det_h_distinct_angle(g: &Geometry, f4: f64, rho: f64, t2: f64) -> Result<f64> {
    check_symmetric(g)?;
    if !(rho.is_finite() && rho > 0.0) || !f4.is_finite() || !t2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite f4, t2 and positive rho; got f4={f4}, rho={rho}, t2={t2}"
        )));
    }
    let k = g.k;
    let denom = 2.0 * k * rho * t2 - f4;
    if denom.abs() < 1e-10 * (k * rho * (1.0 + t2.abs()) + f4.abs()) {
        return Err(Error::DenominatorZero);
    }
    let u = k * rho * t2 * t2 - f4 * t2 - k * rho;
    let circ = 1.0 + t2 * t2;
    Ok(-4.0 * g.l1 * g.l1 * (u / circ) * (u / circ))
}

fn check_symmetric(g: &Geometry) -> Result<()> {
    if g.l0 != 0.0 {
        return Err(Error::NotSymmetric(format!(
            "free length must be zero, got l0={}",
            g.l0
        )));
    }
    if (g.l1 - g.l2).abs() > SYMMETRY_TOL_REL * g.strut_scale() {
        return Err(Error::NotSymmetric(format!(
            "strut lengths must match, got L1={}, L2={}",
            g.l1, g.l2
        )));
    }
    Ok(())
}

/// Accept a candidate pose by direct residual evaluation, without Newton
/// polishing (used for the flat poses, which are exact by construction —
/// polishing a non-equilibrium flat seed could wander to an unrelated
/// solution).
fn accept_direct(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    th1: f64,
    th2: f64,
    out: &mut Vec<Equilibrium>,
) -> Result<()> {
    let config = Configuration {
        theta1: normalize_angle(th1),
        theta2: normalize_angle(th2),
        rho,
    };
    let r = model::residual_norm(g, l, &config)?;
    if r < dksp::RESIDUAL_ACCEPT {
        push_dedup(out, make_equilibrium(g, l, &config, r)?);
    }
    Ok(())
}

fn sort_by_angles(list: &mut [Equilibrium]) {
    list.sort_by(|a, b| {
        a.config
            .theta1
            .total_cmp(&b.config.theta1)
            .then(a.config.theta2.total_cmp(&b.config.theta2))
    });
}
