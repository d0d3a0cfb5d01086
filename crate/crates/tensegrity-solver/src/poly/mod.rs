//! Polynomial layer: dense univariate polynomials with real coefficients,
//! the biquadratic bivariate system produced by the tan-half-angle
//! substitution, Sylvester-resultant elimination, and real-root
//! extraction.

pub mod roots;
pub mod sylvester;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Geometry, Loading};

/// Relative magnitude floor below which a coefficient is treated as zero
/// when determining the effective degree (double-precision noise level).
pub const COEFF_FLOOR_REL: f64 = 1e-12;

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Build from ascending coefficients `c0 + c1·t + c2·t² + …`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Self { coeffs }
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// Ascending coefficient slice (raw; may carry sub-floor noise at the top).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Effective degree: index of the highest coefficient above the
    /// relative floor, or `None` for a (numerically) zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let floor = COEFF_FLOOR_REL * self.max_norm();
        self.coeffs
            .iter()
            .rposition(|c| c.abs() > floor && *c != 0.0)
    }

    /// Copy truncated to the effective degree, so the leading coefficient
    /// is above the floor. A numerically zero polynomial stays `[0.0]`.
    pub fn normalized(&self) -> Poly {
        match self.degree() {
            Some(d) => Poly::new(self.coeffs[..=d].to_vec()),
            None => Poly::zero(),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Horner evaluation plus a running round-off bound: the result cannot
    /// be distinguished from zero when `|value|` is below the bound.
    pub fn eval_with_round_off(&self, x: f64) -> (f64, f64) {
        let mut acc = 0.0_f64;
        let mut mag = 0.0_f64;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
            mag = mag * x.abs() + c.abs();
        }
        let bound = (2 * self.coeffs.len() + 1) as f64 * f64::EPSILON * mag;
        (acc, bound)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| (i + 1) as f64 * c)
                .collect(),
        )
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Monic polynomial with the given roots (test/oracle helper).
    pub fn from_roots(roots: &[f64]) -> Poly {
        let mut p = Poly::new(vec![1.0]);
        for r in roots {
            p = p.mul(&Poly::new(vec![-r, 1.0]));
        }
        p
    }
}

/// Which tan-half variable an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Var {
    T1,
    T2,
}

impl Var {
    /// The other variable.
    pub fn other(self) -> Var {
        match self {
            Var::T1 => Var::T2,
            Var::T2 => Var::T1,
        }
    }
}

/// Bivariate polynomial of degree ≤ 2 in each of `t1`, `t2` (the shape of
/// the rationalized equilibrium equations). `c[i][j]` multiplies
/// `t1^i · t2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoly {
    pub c: [[f64; 3]; 3],
}

impl BivariatePoly {
    /// All-zero biquadratic.
    pub fn zero() -> Self {
        Self { c: [[0.0; 3]; 3] }
    }

    /// Evaluate at a point.
    pub fn eval(&self, t1: f64, t2: f64) -> f64 {
        // Horner in t1 of Horner-in-t2 rows.
        let row = |i: usize| self.c[i][2].mul_add(t2, self.c[i][1]).mul_add(t2, self.c[i][0]);
        row(2).mul_add(t1, row(1)).mul_add(t1, row(0))
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// The grid with the roles of `t1` and `t2` exchanged.
    pub fn transposed(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.c[j][i] = self.c[i][j];
            }
        }
        out
    }

    /// Coefficient polynomials of the chosen variable: entry `i` is the
    /// polynomial in the *other* variable multiplying `var^i`.
    pub fn coefficient_polys(&self, var: Var) -> [Poly; 3] {
        let grid = match var {
            Var::T1 => self.c,
            Var::T2 => self.transposed().c,
        };
        [
            Poly::new(grid[0].to_vec()),
            Poly::new(grid[1].to_vec()),
            Poly::new(grid[2].to_vec()),
        ]
    }

    /// Ascending coefficients `[a0, a1, a2]` of the univariate quadratic in
    /// `var` obtained by fixing the other variable to `value`.
    pub fn univariate_in(&self, var: Var, value: f64) -> [f64; 3] {
        let grid = match var {
            Var::T1 => self.c,
            Var::T2 => self.transposed().c,
        };
        let mut out = [0.0; 3];
        for (i, row) in grid.iter().enumerate() {
            out[i] = row[2].mul_add(value, row[1]).mul_add(value, row[0]);
        }
        out
    }

    /// Effective degree in the chosen variable (floor-relative to the whole
    /// grid), or `None` if the variable is absent.
    pub fn degree_in(&self, var: Var) -> Option<usize> {
        let floor = COEFF_FLOOR_REL * self.max_norm();
        let polys = self.coefficient_polys(var);
        (0..3)
            .rev()
            .find(|&i| polys[i].coeffs().iter().any(|c| c.abs() > floor && *c != 0.0))
    }
}

/// Rationalized equilibrium system in `t1 = tan(θ1/2)`, `t2 = tan(θ2/2)`.
///
/// Returns biquadratics `(P1, P2)` satisfying
/// `Pi(t1, t2) = −(1 + t1²)(1 + t2²) · Ri(θ1, θ2)` exactly, where
/// `(R_a, R_b)` are the dimensionless equilibrium residuals of
/// [`crate::model::equilibrium_residuals`]. Simultaneous real roots map to
/// equilibria through `θi = 2·atan(ti)`; the substitution cannot represent
/// `θi = π`, so flat poses are handled separately by the solver.
///
/// Only valid for zero free length (the residuals are trigonometric
/// polynomials only then).
pub fn build_tanhalf_system(
    g: &Geometry,
    l: &Loading,
    rho: f64,
) -> Result<(BivariatePoly, BivariatePoly)> {
    if g.l0 != 0.0 {
        return Err(Error::InvalidParameter(
            "tan-half system exists only for zero free length".into(),
        ));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    let f3 = l.f3 / g.k;
    let f4 = l.f4 / g.k;
    let f3x = l.f3x / g.k;
    let f4x = l.f4x / g.k;

    let mut p1 = BivariatePoly::zero();
    p1.c[2][2] = f3;
    p1.c[2][1] = 2.0 * g.l2;
    p1.c[2][0] = f3;
    p1.c[1][2] = 2.0 * g.l2 + 4.0 * rho + 2.0 * f3x;
    p1.c[1][0] = 4.0 * rho - 2.0 * g.l2 + 2.0 * f3x;
    p1.c[0][2] = -f3;
    p1.c[0][1] = -2.0 * g.l2;
    p1.c[0][0] = -f3;

    let mut p2 = BivariatePoly::zero();
    p2.c[2][2] = f4;
    p2.c[2][1] = 2.0 * g.l1 + 4.0 * rho + 2.0 * f4x;
    p2.c[2][0] = -f4;
    p2.c[1][2] = 2.0 * g.l1;
    p2.c[1][0] = -2.0 * g.l1;
    p2.c[0][2] = f4;
    p2.c[0][1] = 4.0 * rho - 2.0 * g.l1 + 2.0 * f4x;
    p2.c[0][0] = -f4;

    Ok((p1, p2))
}
