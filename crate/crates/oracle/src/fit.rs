//! Least squares through discrete orthogonal polynomials on the data nodes.

use serde::{Deserialize, Serialize};

use crate::OracleError;

/// Result of [`dense_poly_fit`]. `coeffs[j]` multiplies x^j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFitReport {
    pub degree: usize,
    pub coeffs: Vec<f64>,
    /// max |residual| / max |y| over the nodes (plain max |residual| when y ≡ 0).
    pub residual: f64,
}

impl PolyFitReport {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Polynomial least squares of the given degree.
///
/// Nodes are mapped to [−1, 1], the three-term (Forsythe) recurrence builds
/// polynomials orthogonal over the nodes, and the residual is peeled one
/// basis vector at a time. Coefficients are converted back to monomials in x
/// at the end, so very high degrees lose digits there but not in `residual`.
pub fn dense_poly_fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFitReport, OracleError> {
    let n = xs.len();
    if ys.len() != n {
        return Err(OracleError::Invalid(format!("{} nodes but {} values", n, ys.len())));
    }
    if n < 2 * (degree + 1) {
        return Err(OracleError::Invalid(format!(
            "degree {degree} needs at least {} nodes, got {n}",
            2 * (degree + 1)
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(OracleError::Invalid("non-finite data".into()));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(OracleError::RankDeficient("nodes are not distinct".into()));
    }
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let zs: Vec<f64> = xs.iter().map(|x| (x - mid) / half).collect();

    let inner = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();

    // Values of p_j at the nodes and its coefficients in z.
    let mut prev_vals = vec![0.0; n];
    let mut prev_poly: Vec<f64> = Vec::new();
    let mut prev_norm = 1.0;
    let mut vals = vec![1.0; n];
    let mut poly = vec![1.0];
    let mut residual = ys.to_vec();
    let mut combo = vec![0.0; degree + 1];

    for j in 0..=degree {
        let nrm = inner(&vals, &vals);
        if !(nrm > 1e-26 * n as f64) {
            return Err(OracleError::RankDeficient(format!("orthogonal polynomial {j} vanishes on the nodes")));
        }
        let c = inner(&residual, &vals) / nrm;
        residual.iter_mut().zip(&vals).for_each(|(r, p)| *r -= c * p);
        for (k, p) in poly.iter().enumerate() {
            combo[k] += c * p;
        }
        if j == degree {
            break;
        }
        let zp: Vec<f64> = zs.iter().zip(&vals).map(|(z, p)| z * p).collect();
        let alpha = inner(&zp, &vals) / nrm;
        let beta = if j == 0 { 0.0 } else { nrm / prev_norm };
        let next_vals: Vec<f64> = (0..n)
            .map(|i| zp[i] - alpha * vals[i] - beta * prev_vals[i])
            .collect();
        let mut next_poly = vec![0.0; poly.len() + 1];
        for (k, p) in poly.iter().enumerate() {
            next_poly[k + 1] += p;
            next_poly[k] -= alpha * p;
        }
        for (k, p) in prev_poly.iter().enumerate() {
            next_poly[k] -= beta * p;
        }
        prev_vals = std::mem::replace(&mut vals, next_vals);
        prev_poly = std::mem::replace(&mut poly, next_poly);
        prev_norm = nrm;
    }

    // Substitute z = (x − mid)/half by Horner's rule on coefficient vectors.
    let mut coeffs = vec![0.0; degree + 1];
    for &c in combo.iter().rev() {
        let mut next = vec![0.0; degree + 1];
        for k in 0..degree {
            next[k + 1] += coeffs[k] / half;
            next[k] -= coeffs[k] * mid / half;
        }
        next[0] += c;
        coeffs = next;
    }

    let rmax = residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let ymax = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    let residual = if ymax > 0.0 { rmax / ymax } else { rmax };
    Ok(PolyFitReport { degree, coeffs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exact_line() {
        let xs = grid(10);
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let fit = dense_poly_fit(&xs, &ys, 1).unwrap();
        assert_abs_diff_eq!(fit.coeffs[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.coeffs[1], 2.0, epsilon = 1e-14);
        assert!(fit.residual < 1e-14);
    }

    #[test]
    fn quadratic_is_not_linear() {
        let xs = grid(20);
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = dense_poly_fit(&xs, &ys, 1).unwrap();
        assert!(fit.residual > 0.1);
    }

    #[test]
    fn chebyshev_cubic() {
        let xs = grid(30);
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 * x * x * x - 3.0 * x).collect();
        let fit = dense_poly_fit(&xs, &ys, 3).unwrap();
        assert!(fit.residual < 1e-12);
        assert_abs_diff_eq!(fit.coeffs[3], 4.0, epsilon = 1e-11);
        assert_abs_diff_eq!(fit.coeffs[1], -3.0, epsilon = 1e-11);
    }

    #[test]
    fn shifted_interval() {
        let xs: Vec<f64> = (0..40).map(|i| 3.0 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x).collect();
        let fit = dense_poly_fit(&xs, &ys, 2).unwrap();
        assert!(fit.residual < 1e-12);
        assert_abs_diff_eq!(fit.eval(4.2), 1.0 - 8.4 + 0.5 * 4.2 * 4.2, epsilon = 1e-10);
    }

    #[test]
    fn errors() {
        let xs = grid(3);
        assert!(matches!(dense_poly_fit(&xs, &[0.0; 3], 1), Err(OracleError::Invalid(_))));
        let xs = [0.0, 0.0, 1.0, 2.0];
        assert!(matches!(dense_poly_fit(&xs, &[0.0; 4], 1), Err(OracleError::RankDeficient(_))));
    }
}
