//! Shared oracles for the integration suite, implemented independently of
//! the library's solution pipeline:
//!
//! * a dense-grid energy-descent oracle that finds stable equilibria by
//!   brute force (torus grid minima refined by damped Newton descent on
//!   the potential), never touching the polynomial elimination code;
//! * central finite differences for the gradient and Hessian;
//! * a Sturm chain for counting distinct real polynomial roots, as an
//!   oracle for the companion-matrix root finder;
//! * seeded random parameter draws and angle-set matching helpers.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensegrity_solver::dksp::{Equilibrium, Stability};
use tensegrity_solver::freelength;
use tensegrity_solver::model::{self, angle_distance, Configuration, Geometry, Loading};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Geometry draw for property tests (zero free length).
pub fn random_geometry(r: &mut ChaCha8Rng) -> Geometry {
    Geometry::zero_free_length(
        r.gen_range(0.4..2.2),
        r.gen_range(0.4..2.2),
        r.gen_range(20.0..400.0),
    )
    .unwrap()
}

/// Loading draw; horizontal components only when requested.
pub fn random_loading(r: &mut ChaCha8Rng, horizontals: bool) -> Loading {
    let f3x = if horizontals { r.gen_range(-15.0..15.0) } else { 0.0 };
    let f4x = if horizontals { r.gen_range(-15.0..15.0) } else { 0.0 };
    Loading::new(r.gen_range(-40.0..40.0), r.gen_range(-40.0..40.0), f3x, f4x).unwrap()
}

pub fn random_rho(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(0.12..2.4)
}

pub fn random_pose(r: &mut ChaCha8Rng, rho: f64) -> Configuration {
    Configuration {
        theta1: r.gen_range(-PI..PI),
        theta2: r.gen_range(-PI..PI),
        rho,
    }
}

/// Torus distance between two angle pairs (max over the two coordinates).
pub fn pair_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    angle_distance(a.0, b.0).max(angle_distance(a.1, b.1))
}

pub fn energy_at(g: &Geometry, l: &Loading, rho: f64, t: (f64, f64)) -> f64 {
    model::potential_energy(g, l, &Configuration { theta1: t.0, theta2: t.1, rho })
}

/// `(theta1, theta2)` of the stable entries, in list order.
pub fn stable_pairs(eqs: &[Equilibrium]) -> Vec<(f64, f64)> {
    eqs.iter()
        .filter(|e| e.stability == Stability::Stable)
        .map(|e| (e.config.theta1, e.config.theta2))
        .collect()
}

pub fn all_pairs(eqs: &[Equilibrium]) -> Vec<(f64, f64)> {
    eqs.iter().map(|e| (e.config.theta1, e.config.theta2)).collect()
}

/// Greedy-match two angle-pair sets within `tol` (torus metric); returns a
/// description of the first failure, if any.
pub fn match_pair_sets(
    found: &[(f64, f64)],
    expected: &[(f64, f64)],
    tol: f64,
) -> Result<(), String> {
    if found.len() != expected.len() {
        return Err(format!(
            "count mismatch: found {} vs expected {}\n  found:    {found:?}\n  expected: {expected:?}",
            found.len(),
            expected.len()
        ));
    }
    let mut used = vec![false; found.len()];
    for e in expected {
        let mut best: Option<(usize, f64)> = None;
        for (i, f) in found.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = pair_distance(*f, *e);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, d)) if d <= tol => used[i] = true,
            Some((_, d)) => {
                return Err(format!(
                    "no partner within {tol:.1e} for ({:.10}, {:.10}); nearest at {d:.3e}\n  found: {found:?}",
                    e.0, e.1
                ));
            }
            None => return Err("expected set larger than found set".into()),
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Central-difference step for the gradient check.
pub const FD_GRADIENT_STEP: f64 = 1e-6;
/// Central-difference step for the Hessian check.
pub const FD_HESSIAN_STEP: f64 = 1e-4;

/// Central-difference gradient of the potential energy.
pub fn fd_gradient(g: &Geometry, l: &Loading, c: &Configuration) -> [f64; 2] {
    let h = FD_GRADIENT_STEP;
    let f = |t1: f64, t2: f64| energy_at(g, l, c.rho, (t1, t2));
    [
        (f(c.theta1 + h, c.theta2) - f(c.theta1 - h, c.theta2)) / (2.0 * h),
        (f(c.theta1, c.theta2 + h) - f(c.theta1, c.theta2 - h)) / (2.0 * h),
    ]
}

/// Central-difference Hessian of the potential energy.
pub fn fd_hessian(g: &Geometry, l: &Loading, c: &Configuration) -> [[f64; 2]; 2] {
    let h = FD_HESSIAN_STEP;
    let f = |d1: f64, d2: f64| energy_at(g, l, c.rho, (c.theta1 + d1, c.theta2 + d2));
    let h11 = (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / (h * h);
    let h22 = (f(0.0, h) - 2.0 * f(0.0, 0.0) + f(0.0, -h)) / (h * h);
    let h12 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    [[h11, h12], [h12, h22]]
}

// ---------------------------------------------------------------------------
// Dense-grid energy-descent oracle
// ---------------------------------------------------------------------------

/// Descend the potential from a seed pose: damped Newton direction with a
/// steepest-descent fallback and an Armijo line search, finished by pure
/// Newton. Returns the minimizer when the dimensionless residual drops
/// below `1e-9` and the Hessian is positive definite there.
pub fn descend_to_minimum(
    g: &Geometry,
    l: &Loading,
    rho: f64,
    seed: (f64, f64),
) -> Option<(f64, f64)> {
    let cfg = |t: (f64, f64)| Configuration { theta1: t.0, theta2: t.1, rho };
    let mut t = seed;
    for _ in 0..300 {
        let c = cfg(t);
        if model::residual_norm(g, l, &c).ok()? < 1e-11 {
            break;
        }
        let grad = model::gradient(g, l, &c).ok()?;
        let h = model::hessian(g, l, &c).ok()?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
        let mut dir = if h[0][0] > 0.0 && det > 0.0 {
            [
                (-grad[0] * h[1][1] + grad[1] * h[0][1]) / det,
                (-grad[1] * h[0][0] + grad[0] * h[0][1]) / det,
            ]
        } else {
            let gnorm = grad[0].hypot(grad[1]).max(1e-300);
            [-grad[0] * 0.25 / gnorm, -grad[1] * 0.25 / gnorm]
        };
        let len = dir[0].hypot(dir[1]);
        if len > 0.5 {
            dir = [dir[0] * 0.5 / len, dir[1] * 0.5 / len];
        }
        let u0 = energy_at(g, l, rho, t);
        let slope = grad[0] * dir[0] + grad[1] * dir[1];
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = (t.0 + alpha * dir[0], t.1 + alpha * dir[1]);
            let u = energy_at(g, l, rho, cand);
            if u <= u0 + 1e-4 * alpha * slope + 1e-12 * (1.0 + u0.abs()) {
                t = cand;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    // Final sharpening: undamped Newton inside the basin.
    for _ in 0..30 {
        let c = cfg(t);
        if model::residual_norm(g, l, &c).ok()? < 1e-12 {
            break;
        }
        let grad = model::gradient(g, l, &c).ok()?;
        let h = model::hessian(g, l, &c).ok()?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
        if det.abs() < 1e-300 {
            break;
        }
        let d1 = (-grad[0] * h[1][1] + grad[1] * h[0][1]) / det;
        let d2 = (-grad[1] * h[0][0] + grad[0] * h[0][1]) / det;
        if d1.hypot(d2) > 0.5 {
            break;
        }
        t = (t.0 + d1, t.1 + d2);
    }
    let c = cfg(t);
    if model::residual_norm(g, l, &c).ok()? > 1e-9 {
        return None;
    }
    let h = model::hessian(g, l, &c).ok()?;
    let det = h[0][0] * h[1][1] - h[0][1] * h[0][1];
    if !(h[0][0] > 0.0 && det > 0.0) {
        return None;
    }
    Some((model::normalize_angle(t.0), model::normalize_angle(t.1)))
}

/// All stable equilibria found by brute force: strict local minima of the
/// potential on an `n × n` torus grid of cell-center poses, refined by
/// [`descend_to_minimum`] and deduplicated.
///
/// When the free length is positive, refined minima whose shortest spring
/// is not longer than the free length are discarded, matching the
/// admissibility filter of the multistart solver.
pub fn descent_stable_set(g: &Geometry, l: &Loading, rho: f64, n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 8, "grid too coarse to resolve basins");
    let h = 2.0 * PI / n as f64;
    let theta = |i: usize| -PI + (i as f64 + 0.5) * h;
    let mut u = vec![0.0f64; n * n];
    for i in 0..n {
        let t1 = theta(i);
        for j in 0..n {
            u[i * n + j] = energy_at(g, l, rho, (t1, theta(j)));
        }
    }
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let center = u[i * n + j];
            let mut strict = true;
            'nb: for di in [n - 1, 0, 1] {
                for dj in [n - 1, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    if center >= u[((i + di) % n) * n + (j + dj) % n] {
                        strict = false;
                        break 'nb;
                    }
                }
            }
            if strict {
                seeds.push((theta(i), theta(j)));
            }
        }
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for seed in seeds {
        let Some(p) = descend_to_minimum(g, l, rho, seed) else { continue };
        if g.l0 > 0.0 {
            let c = Configuration { theta1: p.0, theta2: p.1, rho };
            if freelength::admissibility_margin(g, &c) <= 0.0 {
                continue;
            }
        }
        if out.iter().all(|q| pair_distance(*q, p) > 1e-6) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

// ---------------------------------------------------------------------------
// Sturm chain (real-root counting oracle)
// ---------------------------------------------------------------------------

/// Number of distinct real roots of the polynomial (ascending
/// coefficients) in the half-open interval `(a, b]`, counted by sign
/// variations of a Sturm chain — fully independent of the
/// companion-matrix root finder.
pub fn sturm_distinct_roots(coeffs: &[f64], a: f64, b: f64) -> usize {
    let chain = sturm_chain(coeffs);
    let va = sign_variations(&chain, a);
    let vb = sign_variations(&chain, b);
    assert!(va >= vb, "inconsistent Sturm chain: V({a}) = {va} < V({b}) = {vb}");
    va - vb
}

fn trim(mut v: Vec<f64>) -> Vec<f64> {
    while v.len() > 1 && *v.last().unwrap() == 0.0 {
        v.pop();
    }
    v
}

fn normalize_max(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m > 0.0 {
        for c in &mut v {
            *c /= m;
        }
    }
    v
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| ci * i as f64)
        .collect()
}

/// Remainder of `a / b` for ascending-coefficient polynomials.
fn poly_rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    if db == 0 {
        return vec![0.0];
    }
    let mut r = trim(a.to_vec());
    while r.len() > db && !(r.len() == 1 && r[0] == 0.0) {
        let dr = r.len() - 1;
        let q = r[dr] / b[db];
        let shift = dr - db;
        for i in 0..db {
            r[shift + i] -= q * b[i];
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn sturm_chain(coeffs: &[f64]) -> Vec<Vec<f64>> {
    let p0 = normalize_max(trim(coeffs.to_vec()));
    let mut chain = vec![p0.clone()];
    if p0.len() > 1 {
        chain.push(normalize_max(trim(poly_derivative(&p0))));
    }
    while chain.last().unwrap().len() > 1 {
        let n = chain.len();
        let rem = poly_rem(&chain[n - 2], &chain[n - 1]);
        let neg = normalize_max(trim(rem.iter().map(|c| -c).collect()));
        if neg.len() == 1 && neg[0] == 0.0 {
            break;
        }
        chain.push(neg);
    }
    chain
}

fn sign_variations(chain: &[Vec<f64>], x: f64) -> usize {
    let mut last = 0i8;
    let mut v = 0usize;
    for p in chain {
        let y = poly_eval(p, x);
        let s = if y > 0.0 {
            1
        } else if y < 0.0 {
            -1
        } else {
            0
        };
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}
