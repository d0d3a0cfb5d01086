//! Real-root extraction for low-degree univariate polynomials, plus
//! deflation of the ubiquitous `(1 + t²)` factors introduced by the
//! tan-half substitution.
//!
//! Strategy: closed forms for degree ≤ 2; companion-matrix eigenvalues for
//! higher degrees (with a derivative-recursion bisection fallback should
//! the eigenvalue iteration ever fail), followed by Newton polishing,
//! clustering of near-coincident candidates into multiplicity estimates,
//! and flagging of near-multiple roots (derivative nearly zero), which
//! downstream code treats as region-boundary tangency candidates.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::poly::Poly;

/// Imaginary parts below this fraction of `max(1, |z|)` are treated as
/// real when harvesting eigenvalue candidates.
pub const IMAGINARY_TOL_REL: f64 = 1e-8;

/// Polish target: `|p(root)| < POLISH_TOL_REL × max-norm` (or the Horner
/// round-off floor, whichever is reached first).
pub const POLISH_TOL_REL: f64 = 1e-12;

/// A root is flagged near-multiple when `|p'(root)|` falls below this
/// fraction of the derivative's local scale.
pub const MULTIPLE_DERIV_TOL_REL: f64 = 1e-6;

/// Candidates closer than this (relative to `max(1, |root|)`) merge into
/// one root with a multiplicity estimate.
pub const CLUSTER_TOL_REL: f64 = 1e-7;

/// Remainder threshold for accepting a `(1 + t²)` division, relative to
/// the polynomial max-norm.
pub const DEFLATE_REMAINDER_REL: f64 = 1e-8;

/// One extracted real root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    /// Polished root location.
    pub value: f64,
    /// Number of eigenvalue candidates that merged into this root.
    pub multiplicity: usize,
    /// Whether polishing reached the residual target (unpolished roots are
    /// still reported, flagged).
    pub polished: bool,
    /// Derivative nearly vanishes here: a tangency / boundary candidate.
    pub near_multiple: bool,
}

/// Divide out as many exact `(1 + t²)` factors as the polynomial carries.
///
/// Each division is accepted only when the remainder's max-norm is below
/// [`DEFLATE_REMAINDER_REL`] times the dividend's max-norm. Returns the
/// deflated polynomial and the number of factors removed.
pub fn deflate_circular_factor(p: &Poly) -> (Poly, usize) {
    let mut cur = p.normalized();
    let mut removed = 0usize;
    loop {
        let n = cur.coeffs().len();
        if n < 3 {
            return (cur, removed);
        }
        // Synthetic division by t² + 1: quotient q of degree n-3,
        // remainder r1·t + r0.
        let mut work = cur.coeffs().to_vec();
        let mut q = vec![0.0; n - 2];
        for i in (0..n - 2).rev() {
            q[i] = work[i + 2];
            work[i] -= q[i];
        }
        let remainder = work[0].abs().max(work[1].abs());
        if remainder < DEFLATE_REMAINDER_REL * cur.max_norm() {
            cur = Poly::new(q).normalized();
            removed += 1;
        } else {
            return (cur, removed);
        }
    }
}

/// All real roots of `p`, optionally restricted to a closed interval.
///
/// Constant (including numerically zero) polynomials yield no roots.
/// Every candidate is polished by Newton iteration on `p`; roots that fail
/// to reach the polish target are still returned with `polished = false`.
pub fn real_roots(p: &Poly, interval: Option<(f64, f64)>) -> Result<Vec<RealRoot>> {
    let q = p.normalized();
    let deg = match q.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    let c = q.coeffs();
    let mut candidates: Vec<f64> = match deg {
        1 => vec![-c[0] / c[1]],
        2 => quadratic_roots(c[0], c[1], c[2]),
        _ => companion_real_candidates(&q).unwrap_or_else(|| bisection_real_roots(&q)),
    };
    candidates.retain(|r| r.is_finite());

    let dq = q.derivative();
    let mut polished: Vec<(f64, bool)> =
        candidates.iter().map(|&r| newton_polish(&q, &dq, r)).collect();
    polished.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Merge candidates that polished into the same location.
    let mut out: Vec<RealRoot> = Vec::new();
    for (value, ok) in polished {
        match out.last_mut() {
            Some(last)
                if (value - last.value).abs()
                    <= CLUSTER_TOL_REL * value.abs().max(1.0) =>
            {
                last.multiplicity += 1;
                last.polished |= ok;
            }
            _ => out.push(RealRoot { value, multiplicity: 1, polished: ok, near_multiple: false }),
        }
    }

    for root in &mut out {
        let deriv_scale = dq.max_norm() * root.value.abs().max(1.0).powi(deg as i32 - 1);
        root.near_multiple = root.multiplicity > 1
            || dq.eval(root.value).abs() < MULTIPLE_DERIV_TOL_REL * deriv_scale;
    }

    if let Some((lo, hi)) = interval {
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        out.retain(|r| r.value >= lo - pad && r.value <= hi + pad);
    }
    Ok(out)
}

/// Numerically stable quadratic formula (no cancellation between -b and
/// the discriminant square root).
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + c1.signum() * sq);
    if q == 0.0 {
        // c1 == 0 and disc == 0: double root at zero (c0 == 0).
        return vec![0.0, 0.0];
    }
    vec![q / c2, c0 / q]
}

/// Real eigenvalues of the companion matrix, or `None` when the Schur
/// iteration fails to converge.
fn companion_real_candidates(p: &Poly) -> Option<Vec<f64>> {
    let c = p.coeffs();
    let d = c.len() - 1;
    let lead = c[d];
    let m = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let schur = nalgebra::Schur::try_new(m, 1e-14, 1000)?;
    let eigen = schur.complex_eigenvalues();
    Some(
        eigen
            .iter()
            .filter(|z| z.im.abs() <= IMAGINARY_TOL_REL * z.re.abs().max(1.0))
            .map(|z| z.re)
            .collect(),
    )
}

/// Fallback global method: real roots via recursive monotone-interval
/// bisection (critical points from the derivative's roots). Robust for the
/// low degrees used here; only invoked if the eigenvalue path fails.
fn bisection_real_roots(p: &Poly) -> Vec<f64> {
    let c = p.coeffs();
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    if deg == 2 {
        return quadratic_roots(c[0], c[1], c[2]);
    }
    let lead = c[deg].abs();
    let bound = 1.0 + c[..deg].iter().fold(0.0_f64, |m, x| m.max(x.abs())) / lead;
    let mut knots = vec![-bound];
    let mut crit = bisection_real_roots(&p.derivative().normalized());
    crit.retain(|x| x.abs() < bound);
    crit.sort_by(f64::total_cmp);
    knots.extend(crit);
    knots.push(bound);
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (p.eval(lo), p.eval(hi));
        if flo == 0.0 {
            out.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            if fhi == 0.0 {
                out.push(hi);
            }
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = p.eval(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Newton-polish a root candidate; returns the refined value and whether
/// the residual target (fixed tolerance or round-off floor) was met.
fn newton_polish(p: &Poly, dp: &Poly, start: f64) -> (f64, bool) {
    let target = POLISH_TOL_REL * p.max_norm();
    let mut r = start;
    let mut best = r;
    let mut best_abs = f64::INFINITY;
    for _ in 0..100 {
        let (v, round_off) = p.eval_with_round_off(r);
        if v.abs() < best_abs {
            best_abs = v.abs();
            best = r;
        }
        if v.abs() <= target || v.abs() <= round_off {
            return (r, true);
        }
        let d = dp.eval(r);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = v / d;
        if !step.is_finite() {
            break;
        }
        r -= step;
        if step.abs() <= f64::EPSILON * r.abs().max(1.0) {
            let (v2, ro2) = p.eval_with_round_off(r);
            return (r, v2.abs() <= target.max(ro2));
        }
    }
    let (v, round_off) = p.eval_with_round_off(best);
    (best, v.abs() <= target.max(round_off))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_quadratics() {
        let roots = real_roots(&Poly::new(vec![-1.0, 0.0, 1.0]), None).unwrap();
        let vals: Vec<f64> = roots.iter().map(|r| r.value).collect();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        assert!(real_roots(&Poly::new(vec![1.0, 0.0, 1.0]), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn planted_degree_six_roots_recovered() {
        let planted = [-2.5, -1.0, -0.125, 0.5, 1.75, 3.0];
        let p = Poly::from_roots(&planted);
        let found = real_roots(&p, None).unwrap();
        assert_eq!(found.len(), planted.len());
        for (f, e) in found.iter().zip(planted.iter()) {
            assert!(
                (f.value - e).abs() < 1e-9,
                "planted {e} recovered as {}",
                f.value
            );
            assert!(f.polished);
            assert!(!f.near_multiple);
        }
    }

    #[test]
    fn double_root_is_flagged() {
        // (t-1)^2 (t+2)
        let p = Poly::from_roots(&[1.0, 1.0, -2.0]);
        let found = real_roots(&p, None).unwrap();
        let near_one = found
            .iter()
            .find(|r| (r.value - 1.0).abs() < 1e-4)
            .expect("double root found");
        assert!(near_one.near_multiple);
    }

    #[test]
    fn interval_restriction() {
        let p = Poly::from_roots(&[-3.0, 0.5, 2.0]);
        let found = real_roots(&p, Some((0.0, 1.0))).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_and_zero_polynomials_have_no_roots() {
        assert!(real_roots(&Poly::new(vec![3.0]), None).unwrap().is_empty());
        assert!(real_roots(&Poly::zero(), None).unwrap().is_empty());
    }

    #[test]
    fn deflation_examples() {
        // (1+t^2)(t-3) = -3 + t - 3t^2 + t^3
        let p = Poly::new(vec![-3.0, 1.0, -3.0, 1.0]);
        let (d, m) = deflate_circular_factor(&p);
        assert_eq!(m, 1);
        assert_eq!(d.degree(), Some(1));
        assert!((d.eval(3.0)).abs() < 1e-12);

        let p = Poly::new(vec![-3.0, 1.0]);
        let (d, m) = deflate_circular_factor(&p);
        assert_eq!(m, 0);
        assert_eq!(d.coeffs(), &[-3.0, 1.0]);
    }

    #[test]
    fn bisection_fallback_agrees_with_primary_path() {
        let planted = [-1.5, -0.25, 0.75, 2.0];
        let p = Poly::from_roots(&planted);
        let roots = bisection_real_roots(&p);
        assert_eq!(roots.len(), planted.len());
        for (f, e) in roots.iter().zip(planted.iter()) {
            assert!((f - e).abs() < 1e-9);
        }
    }
}
