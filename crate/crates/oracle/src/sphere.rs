//! Searches over unit spheres driven only by membership tests.

use hilbert_bodies_body::{dot, norm, Body, Direction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RADIAL_REL_TOL: f64 = 1e-14;
const ASCENT_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-5;
const MAX_ITERATIONS: usize = 400;
const SUPPORT_RESTARTS: usize = 32;

/// sup{s ≥ 0 : p + s·u ∈ K} for an interior point `p`, by bisection on
/// membership. `u` need not be normalized.
pub fn radial_extent(body: &Body, p: &[f64], u: &[f64]) -> f64 {
    let point = |s: f64| -> Vec<f64> { p.iter().zip(u).map(|(a, b)| a + s * b).collect() };
    if !body.contains(p) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while body.contains(&point(hi)) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    // Shrink the bracket from below when the body is small compared to 1.
    while lo == 0.0 && hi > 1e-300 {
        let mid = 0.5 * hi;
        if body.contains(&point(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    while hi - lo > RADIAL_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if body.contains(&point(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Orthonormal basis of the complement of `v` (unit) in R^n.
pub(crate) fn complement_basis(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let skip = (0..n)
        .max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
        .unwrap_or(0);
    for i in (0..n).filter(|&i| i != skip) {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for _ in 0..2 {
            let c = dot(&e, v);
            e.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            for b in &basis {
                let c = dot(&e, b);
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = norm(&e);
        e.iter_mut().for_each(|x| *x /= len);
        basis.push(e);
    }
    basis
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let len = norm(w);
    w.iter().map(|x| x / len).collect()
}

/// Maximizes `objective` over the unit sphere of R^k by projected gradient
/// ascent from each starting point. Returns (best value, maximizer).
pub(crate) fn maximize_on_sphere<F>(k: usize, starts: &[Vec<f64>], objective: F) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    if k == 1 {
        let up = objective(&[1.0]);
        let down = objective(&[-1.0]);
        return if up >= down { (up, vec![1.0]) } else { (down, vec![-1.0]) };
    }
    let mut best = (f64::NEG_INFINITY, vec![0.0; k]);
    for start in starts {
        let mut w = normalized(start);
        let mut value = objective(&w);
        let mut step: f64 = 0.1;
        for _ in 0..MAX_ITERATIONS {
            let tangent = complement_basis(&w);
            let grad: Vec<f64> = tangent
                .iter()
                .map(|tau| {
                    let plus: Vec<f64> = w.iter().zip(tau).map(|(a, b)| a + FD_STEP * b).collect();
                    let minus: Vec<f64> = w.iter().zip(tau).map(|(a, b)| a - FD_STEP * b).collect();
                    (objective(&normalized(&plus)) - objective(&normalized(&minus))) / (2.0 * FD_STEP)
                })
                .collect();
            let gnorm = norm(&grad);
            if gnorm == 0.0 {
                break;
            }
            let direction: Vec<f64> = (0..k)
                .map(|i| tangent.iter().zip(&grad).map(|(tau, g)| g * tau[i]).sum::<f64>() / gnorm)
                .collect();
            let mut improved = false;
            step = (step * 2.0).min(1.0);
            while step > ASCENT_TOL * 1e-3 {
                let trial: Vec<f64> = w.iter().zip(&direction).map(|(a, d)| a + step * d).collect();
                let trial = normalized(&trial);
                let trial_value = objective(&trial);
                if trial_value > value {
                    w = trial;
                    value = trial_value;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved || step < ASCENT_TOL {
                break;
            }
        }
        if value > best.0 {
            best = (value, w);
        }
    }
    best
}

/// Support interval and extreme points, found from membership alone:
/// boundary points are parametrized radially from `body.center()` and
/// x·ξ is maximized over the sphere with 32 restarts.
///
/// Returns `(h_minus, h_plus, a_minus, a_plus)`.
pub fn support_by_ascent(body: &Body, dir: &Direction) -> (f64, f64, Vec<f64>, Vec<f64>) {
    let n = body.dim();
    let center = body.center();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed5_u64);
    let mut starts: Vec<Vec<f64>> = vec![dir.coords().to_vec()];
    while starts.len() < SUPPORT_RESTARTS {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if norm(&v) > 1e-3 {
            starts.push(v);
        }
    }
    let boundary = |u: &[f64]| -> Vec<f64> {
        let r = radial_extent(body, &center, u);
        center.iter().zip(u).map(|(c, x)| c + r * x).collect()
    };
    let extreme = |xi: &Direction, starts: &[Vec<f64>]| -> (f64, Vec<f64>) {
        let (value, u) = maximize_on_sphere(n, starts, |u| xi.dot(&boundary(u)));
        (value, boundary(&u))
    };
    let (h_plus, a_plus) = extreme(dir, &starts);
    let flipped: Vec<Vec<f64>> = starts.iter().map(|s| s.iter().map(|x| -x).collect()).collect();
    let (neg_h_minus, a_minus) = extreme(&dir.negated(), &flipped);
    (-neg_h_minus, h_plus, a_minus, a_plus)
}

/// Length of the chord K ∩ {x·ξ = t} of a planar body, from membership
/// alone: an interior point on the line is interpolated between the extreme
/// points and the boundary is bisected both ways along ξ⊥.
pub fn chord_length(body: &Body, dir: &Direction, t: f64) -> f64 {
    assert_eq!(body.dim(), 2, "chords are planar");
    let (lo, hi, a_minus, a_plus) = support_by_ascent(body, dir);
    if !(t > lo && t < hi) {
        return 0.0;
    }
    let lambda = (t - lo) / (hi - lo);
    let p: Vec<f64> = a_minus.iter().zip(&a_plus).map(|(x, y)| x + lambda * (y - x)).collect();
    let xi = dir.coords();
    radial_extent(body, &p, &[-xi[1], xi[0]]) + radial_extent(body, &p, &[xi[1], -xi[0]])
}
