//! Sylvester-resultant elimination for the biquadratic tan-half system.
//!
//! The resultant of two polynomials in the eliminated variable (with
//! coefficients that are polynomials in the surviving variable) is the
//! determinant of their Sylvester matrix; it vanishes exactly at the
//! surviving-variable values where the pair shares a common root.
//!
//! Rather than expanding the determinant symbolically, the determinant is
//! evaluated numerically at Chebyshev sample points of the surviving
//! variable and the eliminant's coefficients are reconstructed by solving
//! the Vandermonde system — numerically stable and free of symbolic
//! blow-up.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{BivariatePoly, Poly, Var, COEFF_FLOOR_REL};

/// Determinant samples whose magnitude stays below this fraction of the
/// Hadamard row bound at *every* sample point indicate an identically zero
/// resultant (positive-dimensional common-root locus).
const IDENTICALLY_ZERO_REL: f64 = 1e-13;

/// Eliminate `eliminate` from the pair `(p, q)`, returning the univariate
/// eliminant in the surviving variable.
///
/// Degenerate (numerically zero) leading coefficients in the eliminated
/// variable reduce the Sylvester structure to the effective degrees; if
/// either polynomial does not contain the eliminated variable at all, no
/// elimination is possible and [`Error::DegenerateLeadingCoefficient`] is
/// returned. An identically vanishing determinant yields
/// [`Error::EliminationDegenerate`].
pub fn sylvester_resultant(
    p: &BivariatePoly,
    q: &BivariatePoly,
    eliminate: Var,
) -> Result<Poly> {
    let p_coeffs = p.coefficient_polys(eliminate);
    let q_coeffs = q.coefficient_polys(eliminate);
    let m = effective_degree(&p_coeffs, p.max_norm())
        .ok_or(Error::DegenerateLeadingCoefficient)?;
    let n = effective_degree(&q_coeffs, q.max_norm())
        .ok_or(Error::DegenerateLeadingCoefficient)?;

    // Degree bound of the eliminant in the surviving variable: each of the
    // n rows built from p contributes deg(p-coeff), each of the m rows
    // from q contributes deg(q-coeff).
    let deg_p = coefficient_degree(&p_coeffs[..=m]);
    let deg_q = coefficient_degree(&q_coeffs[..=n]);
    let bound = n * deg_p + m * deg_q;
    let samples = bound + 1;

    // Chebyshev nodes on [-1, 1]: well-conditioned Vandermonde basis for
    // the low degrees arising here (bound <= 8 for biquadratics).
    let xs: Vec<f64> = (0..samples)
        .map(|s| {
            if samples == 1 {
                0.0
            } else {
                (std::f64::consts::PI * (2 * s + 1) as f64 / (2 * samples) as f64).cos()
            }
        })
        .collect();

    let dim = m + n;
    let mut dets = Vec::with_capacity(samples);
    let mut max_ratio = 0.0_f64;
    for &x in &xs {
        let prow: Vec<f64> = (0..=m).rev().map(|i| p_coeffs[i].eval(x)).collect();
        let qrow: Vec<f64> = (0..=n).rev().map(|i| q_coeffs[i].eval(x)).collect();
        let mut mat = DMatrix::zeros(dim, dim);
        for r in 0..n {
            for (offset, &v) in prow.iter().enumerate() {
                mat[(r, r + offset)] = v;
            }
        }
        for r in 0..m {
            for (offset, &v) in qrow.iter().enumerate() {
                mat[(n + r, r + offset)] = v;
            }
        }
        let hadamard: f64 = (0..dim)
            .map(|r| mat.row(r).iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        let det = mat.determinant();
        if hadamard > 0.0 {
            max_ratio = max_ratio.max(det.abs() / hadamard);
        }
        dets.push(det);
    }

    if max_ratio < IDENTICALLY_ZERO_REL {
        return Err(Error::EliminationDegenerate);
    }

    if samples == 1 {
        return Ok(Poly::new(vec![dets[0]]));
    }

    // Reconstruct coefficients: solve V c = dets with V[s][j] = xs[s]^j.
    let v = DMatrix::from_fn(samples, samples, |s, j| xs[s].powi(j as i32));
    let rhs = nalgebra::DVector::from_vec(dets);
    let solution = v
        .lu()
        .solve(&rhs)
        .ok_or(Error::EliminationDegenerate)?;
    Ok(Poly::new(solution.iter().copied().collect()).normalized())
}

/// Highest index with a numerically nonzero coefficient polynomial, or
/// `None` when the variable is absent (degree < 1).
fn effective_degree(coeffs: &[Poly; 3], grid_norm: f64) -> Option<usize> {
    let floor = COEFF_FLOOR_REL * grid_norm;
    let deg = (0..3)
        .rev()
        .find(|&i| coeffs[i].coeffs().iter().any(|c| c.abs() > floor && *c != 0.0))?;
    if deg == 0 {
        None
    } else {
        Some(deg)
    }
}

fn coefficient_degree(coeffs: &[Poly]) -> usize {
    coeffs
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0)
}
