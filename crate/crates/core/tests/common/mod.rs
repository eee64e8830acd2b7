#![allow(dead_code)]

use hilbert_bodies::BodySpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random orthonormal rows by Gram–Schmidt.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for r in &rows {
            let c: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(x, y)| *x -= c * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 {
            rows.push(v.iter().map(|x| x / len).collect());
        }
    }
    rows
}

/// Ellipsoid Qᵀ·diag(λ)·Q with eigenvalues λ in [0.5, 2] and the given center.
pub fn random_ellipsoid(rng: &mut ChaCha8Rng, n: usize, center: Vec<f64>) -> BodySpec {
    let q = random_rotation(rng, n);
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut matrix = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| q[k][i] * lambda[k] * q[k][j]).sum();
            matrix[i * n + j] = v;
            matrix[j * n + i] = v;
        }
    }
    BodySpec::Ellipsoid { center, matrix }
}

pub fn random_center(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}
