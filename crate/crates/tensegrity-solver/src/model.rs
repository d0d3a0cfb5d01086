//! Mechanism description, node kinematics, elastic potential energy, and
//! exact analytic first/second derivatives.
//!
//! # Coordinate convention
//!
//! The base anchors sit at `A1 = (0, 0)` and `A2 = (rho, 0)`. Strut 1
//! (length `L1`) pins `A1` to the free node `A3`; strut 2 (length `L2`)
//! pins `A2` to `A4`. The strut angles are measured so that
//!
//! ```text
//! A3 = (L1·cos θ1,        L1·sin θ1)
//! A4 = (rho − L2·cos θ2,  L2·sin θ2)
//! ```
//!
//! i.e. `θ2` opens from the *negative* x-direction at `A2`, mirroring `θ1`.
//! This is the unique convention (up to a global mirror) under which the
//! spring-length square sum expands to
//! `3ρ² + 2L1² + 2L2² − 4L1ρcosθ1 − 4L2ρcosθ2 + 2L1L2cos(θ1+θ2)`,
//! with the `cos(θ1+θ2)` coupling term that the whole elimination pipeline
//! relies on.
//!
//! Springs (all stiffness `k`, common free length `l0`):
//! spring 1 = `A1A4`, spring 2 = `A2A3`, spring 3 = `A3A4`.
//!
//! # Load convention
//!
//! `f3`, `f4` are vertical forces at `A3`, `A4` (negative = pressing
//! down). Horizontal forces are measured mirror-symmetrically: `f3x` is
//! positive toward +x at `A3`, while `f4x` is positive toward −x at `A4`
//! (from `A2` toward `A1`). With this pairing the potential is
//!
//! ```text
//! U = (k/2)·Σ (li − l0)²  −  f3·y3 − f4·y4  −  f3x·L1·cosθ1 − f4x·L2·cosθ2
//! ```
//!
//! and the swap `(θ1, L1, f3, f3x) ↔ (θ2, L2, f4, f4x)` is an exact
//! symmetry of the model — the property that pins the convention.
//!
//! Derivatives are derived from the node coordinates by the chain rule
//! (valid for any `l0 ≥ 0`); the trigonometric residual forms
//! ([`equilibrium_residuals`]) are an independent closed-form derivation
//! used for polishing and as a cross-check of the gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Poses where some spring is shorter than this are rejected as degenerate
/// whenever the free length is non-zero (the energy gradient direction
/// `(li − l0)/li · di` is undefined at `li = 0`).
pub const MIN_SPRING_LENGTH: f64 = 1e-9;

/// Fixed mechanism description: strut lengths, spring stiffness, and the
/// common spring free length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Length of strut `A1A3`.
    pub l1: f64,
    /// Length of strut `A2A4`.
    pub l2: f64,
    /// Stiffness shared by all three springs.
    pub k: f64,
    /// Common spring free length (`0` for ideal zero-free-length springs).
    pub l0: f64,
}

impl Geometry {
    /// Validated constructor: `l1, l2, k > 0`, `l0 ≥ 0`, all finite.
    pub fn new(l1: f64, l2: f64, k: f64, l0: f64) -> Result<Self> {
        let all_finite =
            l1.is_finite() && l2.is_finite() && k.is_finite() && l0.is_finite();
        if !all_finite || l1 <= 0.0 || l2 <= 0.0 || k <= 0.0 || l0 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "geometry requires L1, L2, k > 0 and l0 >= 0, all finite; \
                 got L1={l1}, L2={l2}, k={k}, l0={l0}"
            )));
        }
        Ok(Self { l1, l2, k, l0 })
    }

    /// Convenience constructor for ideal zero-free-length springs.
    pub fn zero_free_length(l1: f64, l2: f64, k: f64) -> Result<Self> {
        Self::new(l1, l2, k, 0.0)
    }

    /// The longer strut length; the natural length scale for tolerances.
    pub fn strut_scale(&self) -> f64 {
        self.l1.max(self.l2)
    }
}

/// External forces applied at the free nodes. See the module docs for the
/// sign conventions (`f4x` positive toward −x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Loading {
    /// Vertical force at `A3`.
    pub f3: f64,
    /// Vertical force at `A4`.
    pub f4: f64,
    /// Horizontal force at `A3`, positive toward +x.
    pub f3x: f64,
    /// Horizontal force at `A4`, positive toward −x (mirror of `f3x`).
    pub f4x: f64,
}

impl Loading {
    /// No external forces.
    pub const UNLOADED: Loading = Loading { f3: 0.0, f4: 0.0, f3x: 0.0, f4x: 0.0 };

    /// Validated constructor (finiteness only; any signs are physical).
    pub fn new(f3: f64, f4: f64, f3x: f64, f4x: f64) -> Result<Self> {
        if !(f3.is_finite() && f4.is_finite() && f3x.is_finite() && f4x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "loading components must be finite; got F3={f3}, F4={f4}, \
                 F3x={f3x}, F4x={f4x}"
            )));
        }
        Ok(Self { f3, f4, f3x, f4x })
    }

    /// Vertical forces only.
    pub fn vertical(f3: f64, f4: f64) -> Self {
        Self { f3, f4, f3x: 0.0, f4x: 0.0 }
    }

    /// True when every component is exactly zero.
    pub fn is_unloaded(&self) -> bool {
        self.f3 == 0.0 && self.f4 == 0.0 && self.f3x == 0.0 && self.f4x == 0.0
    }
}

/// One mechanism pose: the two strut angles plus the actuated base width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    /// Strut-1 angle at `A1`, radians, normalized to `(−π, π]`.
    pub theta1: f64,
    /// Strut-2 angle at `A2`, radians, normalized to `(−π, π]`.
    pub theta2: f64,
    /// Actuator length `|A1A2|`.
    pub rho: f64,
}

impl Configuration {
    /// Validated constructor; normalizes both angles into `(−π, π]`.
    pub fn new(theta1: f64, theta2: f64, rho: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite()) || !rho.is_finite() || rho <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "configuration requires finite angles and rho > 0; \
                 got theta1={theta1}, theta2={theta2}, rho={rho}"
            )));
        }
        Ok(Self {
            theta1: normalize_angle(theta1),
            theta2: normalize_angle(theta2),
            rho,
        })
    }
}

/// Wrap an angle into `(−π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a % two_pi;
    if w > std::f64::consts::PI {
        w -= two_pi;
    } else if w <= -std::f64::consts::PI {
        w += two_pi;
    }
    w
}

/// Distance between two angles on the circle (always in `[0, π]`).
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// Positions of the two free nodes for a pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeCoordinates {
    pub x3: f64,
    pub y3: f64,
    pub x4: f64,
    pub y4: f64,
}

/// Free-node positions given geometry and pose.
pub fn node_coordinates(g: &Geometry, c: &Configuration) -> NodeCoordinates {
    NodeCoordinates {
        x3: g.l1 * c.theta1.cos(),
        y3: g.l1 * c.theta1.sin(),
        x4: c.rho - g.l2 * c.theta2.cos(),
        y4: g.l2 * c.theta2.sin(),
    }
}

/// Current lengths of springs `A1A4`, `A2A3`, `A3A4` (in that order).
pub fn spring_lengths(g: &Geometry, c: &Configuration) -> [f64; 3] {
    let n = node_coordinates(g, c);
    [
        (n.x4 * n.x4 + n.y4 * n.y4).sqrt(),
        ((n.x3 - c.rho) * (n.x3 - c.rho) + n.y3 * n.y3).sqrt(),
        ((n.x4 - n.x3) * (n.x4 - n.x3) + (n.y4 - n.y3) * (n.y4 - n.y3)).sqrt(),
    ]
}

/// Total potential energy of the pose (springs minus work of the loads).
pub fn potential_energy(g: &Geometry, l: &Loading, c: &Configuration) -> f64 {
    let n = node_coordinates(g, c);
    let lengths = spring_lengths(g, c);
    let mut spring = 0.0;
    for li in lengths {
        let e = li - g.l0;
        spring += e * e;
    }
    0.5 * g.k * spring
        - l.f3 * n.y3
        - l.f4 * n.y4
        - l.f3x * g.l1 * c.theta1.cos()
        - l.f4x * g.l2 * c.theta2.cos()
}

/// Spring difference vectors `di` and their angle partials, shared by
/// [`gradient`] and [`hessian`]. Entries: value, ∂/∂θ1, ∂/∂θ2, ∂²/∂θ1²,
/// ∂²/∂θ2² (the mixed second partial is zero for every spring).
struct SpringKinematics {
    d: [[f64; 2]; 3],
    d_t1: [[f64; 2]; 3],
    d_t2: [[f64; 2]; 3],
    d_t1t1: [[f64; 2]; 3],
    d_t2t2: [[f64; 2]; 3],
}

fn spring_kinematics(g: &Geometry, c: &Configuration) -> SpringKinematics {
    let (s1, c1) = c.theta1.sin_cos();
    let (s2, c2) = c.theta2.sin_cos();
    let (l1, l2) = (g.l1, g.l2);
    let rho = c.rho;
    // d1 = A4 - A1, d2 = A3 - A2, d3 = A4 - A3.
    SpringKinematics {
        d: [
            [rho - l2 * c2, l2 * s2],
            [l1 * c1 - rho, l1 * s1],
            [rho - l2 * c2 - l1 * c1, l2 * s2 - l1 * s1],
        ],
        d_t1: [
            [0.0, 0.0],
            [-l1 * s1, l1 * c1],
            [l1 * s1, -l1 * c1],
        ],
        d_t2: [
            [l2 * s2, l2 * c2],
            [0.0, 0.0],
            [l2 * s2, l2 * c2],
        ],
        d_t1t1: [
            [0.0, 0.0],
            [-l1 * c1, -l1 * s1],
            [l1 * c1, l1 * s1],
        ],
        d_t2t2: [
            [l2 * c2, -l2 * s2],
            [0.0, 0.0],
            [l2 * c2, -l2 * s2],
        ],
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Per-spring weights `(1 − l0/li)` and inverse cubes used by the chain
/// rule. For `l0 = 0` the weight is exactly 1 with no division, so poses
/// with a zero-length spring are fine; for `l0 > 0` a collapsed spring is
/// an error.
fn spring_weights(g: &Geometry, kin: &SpringKinematics) -> Result<[(f64, f64); 3]> {
    let mut out = [(1.0, 0.0); 3];
    if g.l0 == 0.0 {
        return Ok(out);
    }
    for (i, d) in kin.d.iter().enumerate() {
        let li = dot(*d, *d).sqrt();
        if li < MIN_SPRING_LENGTH {
            return Err(Error::DegenerateSpring { spring: i + 1, length: li });
        }
        out[i] = (1.0 - g.l0 / li, g.l0 / (li * li * li));
    }
    Ok(out)
}

/// Analytic gradient `(∂U/∂θ1, ∂U/∂θ2)` of [`potential_energy`].
///
/// Errors with [`Error::DegenerateSpring`] when `l0 > 0` and some spring
/// length is below [`MIN_SPRING_LENGTH`].
pub fn gradient(g: &Geometry, l: &Loading, c: &Configuration) -> Result<[f64; 2]> {
    let kin = spring_kinematics(g, c);
    let w = spring_weights(g, &kin)?;
    let (s1, c1) = c.theta1.sin_cos();
    let (s2, c2) = c.theta2.sin_cos();
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (i, &(weight, _)) in w.iter().enumerate() {
        g1 += g.k * weight * dot(kin.d[i], kin.d_t1[i]);
        g2 += g.k * weight * dot(kin.d[i], kin.d_t2[i]);
    }
    g1 += -l.f3 * g.l1 * c1 + l.f3x * g.l1 * s1;
    g2 += -l.f4 * g.l2 * c2 + l.f4x * g.l2 * s2;
    Ok([g1, g2])
}

/// Analytic symmetric 2×2 Hessian of [`potential_energy`] with respect to
/// `(θ1, θ2)`. Errors as [`gradient`].
pub fn hessian(g: &Geometry, l: &Loading, c: &Configuration) -> Result<[[f64; 2]; 2]> {
    let kin = spring_kinematics(g, c);
    let w = spring_weights(g, &kin)?;
    let (s1, c1) = c.theta1.sin_cos();
    let (s2, c2) = c.theta2.sin_cos();
    let mut h11 = 0.0;
    let mut h12 = 0.0;
    let mut h22 = 0.0;
    for (i, &(weight, l0_over_li3)) in w.iter().enumerate() {
        let p1 = dot(kin.d[i], kin.d_t1[i]);
        let p2 = dot(kin.d[i], kin.d_t2[i]);
        h11 += g.k
            * (weight * (dot(kin.d_t1[i], kin.d_t1[i]) + dot(kin.d[i], kin.d_t1t1[i]))
                + l0_over_li3 * p1 * p1);
        h12 += g.k * (weight * dot(kin.d_t1[i], kin.d_t2[i]) + l0_over_li3 * p1 * p2);
        h22 += g.k
            * (weight * (dot(kin.d_t2[i], kin.d_t2[i]) + dot(kin.d[i], kin.d_t2t2[i]))
                + l0_over_li3 * p2 * p2);
    }
    h11 += l.f3 * g.l1 * s1 + l.f3x * g.l1 * c1;
    h22 += l.f4 * g.l2 * s2 + l.f4x * g.l2 * c2;
    Ok([[h11, h12], [h12, h22]])
}

/// Dimensionless equilibrium residuals `(R_a, R_b)`; both vanish exactly at
/// an equilibrium.
///
/// For `l0 = 0` these are the closed trigonometric forms
///
/// ```text
/// R_a = L2·sin(θ1+θ2) − 2ρ·sinθ1 + (f3/k)·cosθ1 − (f3x/k)·sinθ1
/// R_b = L1·sin(θ1+θ2) − 2ρ·sinθ2 + (f4/k)·cosθ2 − (f4x/k)·sinθ2
/// ```
///
/// which relate to the energy gradient by `∂U/∂θ1 = −k·L1·R_a` and
/// `∂U/∂θ2 = −k·L2·R_b` (an independently derived identity, exercised as a
/// cross-check in tests). For `l0 > 0` the residuals are the gradient
/// scaled the same way, `(−g1/(k·L1), −g2/(k·L2))`.
pub fn equilibrium_residuals(g: &Geometry, l: &Loading, c: &Configuration) -> Result<[f64; 2]> {
    if g.l0 == 0.0 {
        let (s1, c1) = c.theta1.sin_cos();
        let (s2, c2) = c.theta2.sin_cos();
        let s12 = (c.theta1 + c.theta2).sin();
        let ra = g.l2 * s12 - 2.0 * c.rho * s1 + (l.f3 * c1 - l.f3x * s1) / g.k;
        let rb = g.l1 * s12 - 2.0 * c.rho * s2 + (l.f4 * c2 - l.f4x * s2) / g.k;
        Ok([ra, rb])
    } else {
        let grad = gradient(g, l, c)?;
        Ok([-grad[0] / (g.k * g.l1), -grad[1] / (g.k * g.l2)])
    }
}

/// Max-norm of the dimensionless equilibrium residuals.
pub fn residual_norm(g: &Geometry, l: &Loading, c: &Configuration) -> Result<f64> {
    let r = equilibrium_residuals(g, l, c)?;
    Ok(r[0].abs().max(r[1].abs()))
}

/// Jacobian of [`equilibrium_residuals`] with respect to `(θ1, θ2)`:
/// the Hessian with rows scaled by `−1/(k·L1)` and `−1/(k·L2)`. Used by
/// Newton polishing of equilibrium candidates.
pub(crate) fn residual_jacobian(
    g: &Geometry,
    l: &Loading,
    c: &Configuration,
) -> Result<[[f64; 2]; 2]> {
    let h = hessian(g, l, c)?;
    Ok([
        [-h[0][0] / (g.k * g.l1), -h[0][1] / (g.k * g.l1)],
        [-h[1][0] / (g.k * g.l2), -h[1][1] / (g.k * g.l2)],
    ])
}
