//! Deterministic quasi-uniform direction sets.

use std::f64::consts::PI;

use hilbert_bodies_body::{dot, Direction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `count` unit vectors in R^n.
///
/// n = 2: angles 2π(j + ½)/count, offset by half a step so no direction is a
/// coordinate axis (the seed is unused). n = 3: Fibonacci lattice. n ≥ 4:
/// the R_d additive recurrence pushed through Box–Muller and normalized. For
/// n ≥ 3 the set is then reflected through a hyperplane drawn from `seed`.
pub fn directions(n: usize, count: usize, seed: u64) -> Result<Vec<Direction>> {
    if n < 2 {
        return Err(Error::Invalid(format!("dimension must be at least 2, got {n}")));
    }
    if count == 0 {
        return Err(Error::Invalid("need at least one direction".into()));
    }
    if n == 2 {
        return Ok((0..count)
            .map(|j| Direction::from_angle(2.0 * PI * (j as f64 + 0.5) / count as f64))
            .collect());
    }
    let raw: Vec<Vec<f64>> = if n == 3 {
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|j| {
                let z = 1.0 - (2 * j + 1) as f64 / count as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * j as f64;
                vec![rho * phi.cos(), rho * phi.sin(), z]
            })
            .collect()
    } else {
        let pairs = n.div_ceil(2);
        let alphas = kronecker_steps(2 * pairs);
        (0..count)
            .map(|j| {
                let u: Vec<f64> = alphas.iter().map(|a| (0.5 + (j + 1) as f64 * a).fract()).collect();
                let mut g = Vec::with_capacity(2 * pairs);
                for p in 0..pairs {
                    let radius = (-2.0 * u[2 * p].ln()).sqrt();
                    let angle = 2.0 * PI * u[2 * p + 1];
                    g.push(radius * angle.cos());
                    g.push(radius * angle.sin());
                }
                g.truncate(n);
                g
            })
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = dot(&v, &v).sqrt();
        if len > 0.1 && len <= 1.0 {
            break v.iter().map(|x| x / len).collect::<Vec<f64>>();
        }
    };
    raw.into_iter()
        .map(|x| {
            let c = 2.0 * dot(&x, &v);
            let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - c * b).collect();
            Direction::new(y).map_err(Error::from)
        })
        .collect()
}

/// Steps 1/φ_d^i of the R_d sequence, φ_d the positive root of x^{d+1} = x + 1.
fn kronecker_steps(d: usize) -> Vec<f64> {
    let mut phi = 2.0_f64;
    for _ in 0..60 {
        let f = phi.powi(d as i32 + 1) - phi - 1.0;
        let df = (d as f64 + 1.0) * phi.powi(d as i32) - 1.0;
        phi -= f / df;
    }
    (1..=d).map(|i| phi.powi(-(i as i32)).fract()).collect()
}
