//! Direct kinetostatic problem (DKSP) solver for zero free-length
//! springs: every real equilibrium configuration for a given geometry,
//! loading, and actuator input, with stability classification.
//!
//! Pipeline: rationalize the stationarity conditions with the tan-half
//! substitution ([`crate::poly::build_tanhalf_system`]), eliminate one
//! variable by Sylvester resultant, deflate the spurious `(1+t²)` factors
//! (leaving degree ≤ 6), extract real roots, back-substitute for the
//! partner variable, map to angles, Newton-polish on the trigonometric
//! residuals (uniform conditioning on the torus, unlike the tan-half
//! coordinates near `|t| → ∞`), residual-filter, append the flat poses the
//! substitution cannot represent, deduplicate, classify, and sort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, angle_distance, normalize_angle, Configuration, Geometry, Loading,
};
use crate::poly::roots::{deflate_circular_factor, real_roots};
use crate::poly::sylvester::sylvester_resultant;
use crate::poly::{build_tanhalf_system, BivariatePoly, Var};

/// Residual acceptance threshold: a candidate is an equilibrium only if
/// its dimensionless trigonometric residual max-norm is below this.
pub const RESIDUAL_ACCEPT: f64 = 1e-8;

/// Solutions closer than this (radians, in both angles) are duplicates.
pub const DEDUP_RADIUS: f64 = 1e-6;

/// Relative factor for the stability tolerance `τ = 1e−7·k·max(L1,L2)²`.
pub const STABILITY_TOL_REL: f64 = 1e-7;

/// Stability label from the Hessian's leading principal minors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    /// Both leading principal minors exceed the tolerance: strict local
    /// minimum of the potential.
    Stable,
    /// Some minor is negative beyond tolerance.
    Unstable,
    /// A minor sits within tolerance of zero: boundary/tangency case.
    Marginal,
}

/// One equilibrium configuration with its certification data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    /// The pose (angles normalized to `(−π, π]`, plus the actuator input).
    pub config: Configuration,
    /// Dimensionless trigonometric residual max-norm (always `< 1e−8`).
    pub residual: f64,
    /// Potential energy at the pose.
    pub energy: f64,
    /// First leading principal minor `H(1,1)`.
    pub minor1: f64,
    /// Determinant of the 2×2 Hessian.
    pub det_h: f64,
    /// Stability label derived from the minors.
    pub stability: Stability,
    /// Both angles within tolerance of `0` or `π`.
    pub flat: bool,
}

/// Which variable the resultant step eliminates first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationOrder {
    /// Eliminate `t1`; root the eliminant in `t2` (default).
    T1First,
    /// Eliminate `t2`; root the eliminant in `t1`.
    T2First,
}

/// Stability tolerance `τ` for the given geometry.
pub fn stability_tolerance(g: &Geometry) -> f64 {
    STABILITY_TOL_REL * g.k * g.strut_scale() * g.strut_scale()
}

/// Hessian leading principal minors and the resulting stability label.
///
/// The caller is expected to pass an equilibrium configuration (residual
/// below [`RESIDUAL_ACCEPT`]); the classification itself is well-defined
/// for any pose.
pub fn classify_stability(
    g: &Geometry,
    l: &Loading,
    c: &Configuration,
) -> Result<(f64, f64, Stability)> {
    let h = model::hessian(g, l, c)?;
    let minor1 = h[0][0];
    let det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let tau = stability_tolerance(g);
    let label = if minor1.abs() <= tau || det_h.abs() <= tau {
        Stability::Marginal
    } else if minor1 > tau && det_h > tau {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    Ok((minor1, det_h, label))
}

/// Recover the eliminated-variable candidates for one eliminant root.
///
/// Substituting the root into both biquadratics leaves two quadratics in
/// `t1`; the combination `a2·P1 − a1·P2` cancels the quadratic terms and
/// is solved linearly. When that combination degenerates (coefficients
/// below `1e−10` of the local scale), falls back to solving both
/// quadratics directly and intersecting their real root sets within
/// `1e−6`. Returns [`Error::InconsistentRoot`] when nothing satisfies both
/// polynomials (a spurious eliminant root, discarded by the caller).
pub fn back_substitute(
    root_t2: f64,
    p: &BivariatePoly,
    q: &BivariatePoly,
) -> Result<Vec<f64>> {
    back_substitute_in(root_t2, p, q, Var::T1)
}

/// [`back_substitute`] generalized to either variable: `recover` names the
/// variable being solved for, with the eliminant root bound to the other.
pub fn back_substitute_in(
    root: f64,
    p: &BivariatePoly,
    q: &BivariatePoly,
    recover: Var,
) -> Result<Vec<f64>> {
    let [c1, b1, a1] = {
        let u = p.univariate_in(recover, root);
        [u[0], u[1], u[2]]
    };
    let [c2, b2, a2] = {
        let u = q.univariate_in(recover, root);
        [u[0], u[1], u[2]]
    };
    let scale = p
        .max_norm()
        .max(q.max_norm())
        .max(1e-300)
        * root.abs().max(1.0).powi(2);

    let mut candidates: Vec<f64> = Vec::new();
    let lin_b = a2 * b1 - a1 * b2;
    let lin_c = a2 * c1 - a1 * c2;
    if lin_b.abs() > 1e-10 * scale {
        candidates.push(-lin_c / lin_b);
    } else {
        // Degenerate cancellation: intersect the real roots of the two
        // quadratics directly.
        let r1 = quadratic_real_roots(a1, b1, c1, scale);
        let r2 = quadratic_real_roots(a2, b2, c2, scale);
        for x in &r1 {
            for y in &r2 {
                if (x - y).abs() <= 1e-6 * x.abs().max(1.0) {
                    candidates.push(0.5 * (x + y));
                }
            }
        }
    }

    // Keep only candidates consistent with BOTH quadratics.
    let consistent = |t: f64| {
        let tol = 1e-6 * scale * t.abs().max(1.0).powi(2);
        let v1 = (a1 * t + b1) * t + c1;
        let v2 = (a2 * t + b2) * t + c2;
        v1.abs() <= tol && v2.abs() <= tol
    };
    candidates.retain(|&t| t.is_finite() && consistent(t));
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    if candidates.is_empty() {
        return Err(Error::InconsistentRoot { value: root });
    }
    Ok(candidates)
}

fn quadratic_real_roots(a: f64, b: f64, c: f64, scale: f64) -> Vec<f64> {
    if a.abs() <= 1e-13 * scale {
        if b.abs() <= 1e-13 * scale {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Newton-polish a candidate pose on the trigonometric residuals.
/// Returns the polished configuration and its residual max-norm.
fn polish(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    mut th1: f64,
    mut th2: f64,
) -> (f64, f64, f64) {
    // Residual magnitudes are bounded by this scale; convergence targets
    // far below RESIDUAL_ACCEPT so accepted solutions are fully converged.
    let scale = g.l1 + g.l2 + 2.0 * rho
        + (l.f3.abs() + l.f4.abs() + l.f3x.abs() + l.f4x.abs()) / g.k;
    let target = 1e-14 * scale;
    let mut best = (th1, th2, f64::INFINITY);
    for _ in 0..60 {
        let c = Configuration { theta1: th1, theta2: th2, rho };
        let r = match model::equilibrium_residuals(g, l, &c) {
            Ok(r) => r,
            Err(_) => break,
        };
        let norm = r[0].abs().max(r[1].abs());
        if norm < best.2 {
            best = (th1, th2, norm);
        }
        if norm <= target {
            break;
        }
        let j = match model::residual_jacobian(g, l, &c) {
            Ok(j) => j,
            Err(_) => break,
        };
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let mut d1 = (-r[0] * j[1][1] + r[1] * j[0][1]) / det;
        let mut d2 = (-r[1] * j[0][0] + r[0] * j[1][0]) / det;
        let step = d1.abs().max(d2.abs());
        if step > 0.3 {
            d1 *= 0.3 / step;
            d2 *= 0.3 / step;
        }
        th1 += d1;
        th2 += d2;
        if step < 1e-16 {
            break;
        }
    }
    (best.0, best.1, best.2)
}

/// Solve the DKSP with the default elimination order (`t1` first).
///
/// Returns every real equilibrium: at most 6, each with residual below
/// [`RESIDUAL_ACCEPT`], deduplicated within [`DEDUP_RADIUS`] and ordered
/// by `θ1` ascending. Flat poses (`θi ∈ {0, π}`) are enumerated
/// explicitly because the tan-half substitution cannot represent `θ = π`.
pub fn solve_dksp(g: &Geometry, l: &Loading, rho: f64) -> Result<Vec<Equilibrium>> {
    solve_dksp_ordered(g, l, rho, EliminationOrder::T1First)
}

/// [`solve_dksp`] with an explicit elimination order; both orders must
/// produce the same solution set (exercised as a property test).
pub fn solve_dksp_ordered(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    order: EliminationOrder,
) -> Result<Vec<Equilibrium>> {
    let (p1, p2) = build_tanhalf_system(g, l, rho)?;
    let (eliminate, survive) = match order {
        EliminationOrder::T1First => (Var::T1, Var::T2),
        EliminationOrder::T2First => (Var::T2, Var::T1),
    };

    let mut poses: Vec<(f64, f64)> = Vec::new();
    match sylvester_resultant(&p1, &p2, eliminate) {
        Ok(eliminant) => {
            let (deflated, _circle_factors) = deflate_circular_factor(&eliminant);
            for root in real_roots(&deflated, None)? {
                let partners =
                    match back_substitute_in(root.value, &p1, &p2, eliminate) {
                        Ok(ts) => ts,
                        Err(Error::InconsistentRoot { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                for t_elim in partners {
                    let (t1, t2) = match survive {
                        Var::T2 => (t_elim, root.value),
                        Var::T1 => (root.value, t_elim),
                    };
                    poses.push((2.0 * t1.atan(), 2.0 * t2.atan()));
                }
            }
        }
        // A degenerate leading coefficient in *both* variables means the
        // system is effectively univariate; the flat sweep below still
        // covers the representable solutions of such edge inputs.
        Err(Error::DegenerateLeadingCoefficient) => {}
        Err(e) => return Err(e),
    }

    // Flat candidates: the four sign combinations of θi ∈ {0, π}.
    let pi = std::f64::consts::PI;
    for a in [0.0, pi] {
        for b in [0.0, pi] {
            poses.push((a, b));
        }
    }

    let mut out: Vec<Equilibrium> = Vec::new();
    for (th1_raw, th2_raw) in poses {
        let (th1, th2, residual) = polish(g, l, rho, th1_raw, th2_raw);
        if residual.is_nan() || residual >= RESIDUAL_ACCEPT {
            continue;
        }
        let config = Configuration {
            theta1: normalize_angle(th1),
            theta2: normalize_angle(th2),
            rho,
        };
        let duplicate = out.iter().position(|e| {
            angle_distance(e.config.theta1, config.theta1) < DEDUP_RADIUS
                && angle_distance(e.config.theta2, config.theta2) < DEDUP_RADIUS
        });
        match duplicate {
            Some(i) => {
                if residual < out[i].residual {
                    out[i] = make_equilibrium(g, l, &config, residual)?;
                }
            }
            None => out.push(make_equilibrium(g, l, &config, residual)?),
        }
    }
    out.sort_by(|a, b| {
        a.config
            .theta1
            .total_cmp(&b.config.theta1)
            .then(a.config.theta2.total_cmp(&b.config.theta2))
    });
    Ok(out)
}

/// Tolerance (radians) within which an angle counts as 0 or π for the
/// flat-pose flag.
const FLAT_ANGLE_TOL: f64 = 1e-7;

pub(crate) fn make_equilibrium(
    g: &Geometry,
    l: &Loading,
    config: &Configuration,
    residual: f64,
) -> Result<Equilibrium> {
    let (minor1, det_h, stability) = classify_stability(g, l, config)?;
    let near_axis = |a: f64| {
        angle_distance(a, 0.0) < FLAT_ANGLE_TOL
            || angle_distance(a, std::f64::consts::PI) < FLAT_ANGLE_TOL
    };
    Ok(Equilibrium {
        config: *config,
        residual,
        energy: model::potential_energy(g, l, config),
        minor1,
        det_h,
        stability,
        flat: near_axis(config.theta1) && near_axis(config.theta2),
    })
}

/// Polish a seed pose and accept it as an equilibrium if its residual
/// converges below [`RESIDUAL_ACCEPT`]. Shared by the closed-form branch
/// solvers, which generate their own seeds.
pub(crate) fn polish_candidate(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    th1: f64,
    th2: f64,
) -> Result<Option<Equilibrium>> {
    let (th1, th2, residual) = polish(g, l, rho, th1, th2);
    if residual.is_nan() || residual >= RESIDUAL_ACCEPT {
        return Ok(None);
    }
    let config = Configuration {
        theta1: normalize_angle(th1),
        theta2: normalize_angle(th2),
        rho,
    };
    Ok(Some(make_equilibrium(g, l, &config, residual)?))
}

/// Insert while deduplicating within [`DEDUP_RADIUS`] (keeps the lower
/// residual of a duplicate pair). Shared with the closed-form solvers.
pub(crate) fn push_dedup(out: &mut Vec<Equilibrium>, e: Equilibrium) {
    match out.iter().position(|x| {
        angle_distance(x.config.theta1, e.config.theta1) < DEDUP_RADIUS
            && angle_distance(x.config.theta2, e.config.theta2) < DEDUP_RADIUS
    }) {
        Some(i) => {
            if e.residual < out[i].residual {
                out[i] = e;
            }
        }
        None => out.push(e),
    }
}

/// Number of stable equilibria in a solution list.
pub fn stable_count(equilibria: &[Equilibrium]) -> usize {
    equilibria
        .iter()
        .filter(|e| e.stability == Stability::Stable)
        .count()
}
