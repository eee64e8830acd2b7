//! Finite Hilbert transform H F(t) = (1/π) p.v.∫ F(s)/(t−s) ds.
//!
//! Functions vanishing like a square root at both ends of [a, b] are stored
//! as F(t) = √((b−t)(t−a))·Σ g_k U_k(u), u = (2t−a−b)/(b−a). Inside the
//! interval the transform is then the first-kind series r·Σ g_k T_{k+1}(u)
//! with r = (b−a)/2.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::geometry::{second_kind_nodes, SectionProfile};
use crate::quad;

/// Nodes used when a transform has to be projected from a function.
pub const PROJECTION_NODES: usize = 128;
/// Relative distance to an endpoint below which inversion is refused.
pub const ENDPOINT_MARGIN: f64 = 1e-3;

const EXTERIOR_TOLERANCE: f64 = 1e-10;
const PV_TOLERANCE: f64 = 1e-10;
const MAX_RECURRENCE_DEGREE: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeries {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

/// Σ c_j t^j, constant term first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyCoeffs {
    pub coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolyCoeffs { coeffs }
    }

    /// Highest index whose coefficient exceeds 1e−12 of the largest one.
    pub fn degree(&self) -> usize {
        let big = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        self.coeffs
            .iter()
            .rposition(|c| c.abs() > 1e-12 * big)
            .unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Σ c_k U_k(u) by Clenshaw's recurrence.
fn clenshaw_u(coeffs: &[f64], u: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for c in coeffs.iter().rev() {
        let b0 = c + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

/// Σ c_k T_{k+1}(u) by Clenshaw's recurrence.
fn clenshaw_t_shifted(coeffs: &[f64], u: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for c in coeffs.iter().rev() {
        let b0 = c + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // With c_0 = 0 prepended, the T-series value is u·b_1 − b_2.
    u * b1 - b2
}

/// Projection onto U_k from samples of F at the interior second-kind nodes
/// (increasing order): g_k = 2/(N+1)·Σ_j (F_j/r)·sin((k+1)θ_j).
fn project(r: f64, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let scale = 2.0 / (n as f64 + 1.0) / r;
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let theta = (n - i) as f64 * PI / (n + 1) as f64;
                    f * ((k + 1) as f64 * theta).sin()
                })
                .sum::<f64>()
                * scale
        })
        .collect()
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::DegenerateInterval { a, b });
    }
    Ok(())
}

impl WeightedSeries {
    pub fn new(a: f64, b: f64, coeffs: Vec<f64>) -> Result<Self> {
        check_interval(a, b)?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite series coefficient".into()));
        }
        Ok(WeightedSeries { a, b, coeffs })
    }

    /// Series through samples of F taken at `second_kind_nodes(a, b, N)`.
    pub fn from_samples(a: f64, b: f64, values: &[f64]) -> Result<Self> {
        check_interval(a, b)?;
        if values.is_empty() {
            return Err(Error::Invalid("no samples".into()));
        }
        WeightedSeries::new(a, b, project(0.5 * (b - a), values))
    }

    /// Series interpolating F at `nodes` interior second-kind nodes.
    pub fn from_fn(a: f64, b: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = second_kind_nodes(a, b, nodes).into_iter().map(f).collect();
        WeightedSeries::from_samples(a, b, &values)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn to_unit(&self, t: f64) -> f64 {
        (2.0 * t - self.a - self.b) / (self.b - self.a)
    }

    pub fn weight(&self, t: f64) -> f64 {
        ((self.b - t) * (t - self.a)).max(0.0).sqrt()
    }

    /// F(t), zero outside [a, b].
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.a || t >= self.b {
            return 0.0;
        }
        self.weight(t) * clenshaw_u(&self.coeffs, self.to_unit(t))
    }

    /// ∫_a^b F = r²·(π/2)·g_0.
    pub fn integral(&self) -> f64 {
        let r = self.radius();
        r * r * PI / 2.0 * self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Series of t·F(t), using t = m + r·u and u·U_k = (U_{k−1} + U_{k+1})/2.
    pub fn times_t(&self) -> WeightedSeries {
        let (m, r) = (self.midpoint(), self.radius());
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, g) in self.coeffs.iter().enumerate() {
            out[k] += m * g;
            out[k + 1] += 0.5 * r * g;
            if k > 0 {
                out[k - 1] += 0.5 * r * g;
            }
        }
        WeightedSeries { a: self.a, b: self.b, coeffs: out }
    }

    /// |g_K| / max|g_k|, a cheap resolution diagnostic.
    pub fn tail_decay(&self) -> f64 {
        let big = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        match self.coeffs.last() {
            Some(last) if big > 0.0 => last.abs() / big,
            _ => 0.0,
        }
    }

    /// H F anywhere on the line (the endpoints take the common limit).
    pub fn hilbert(&self, t: f64) -> Result<f64> {
        if t > self.a && t < self.b {
            hilbert_on_interval(self, t)
        } else if t == self.a || t == self.b {
            let u = if t == self.b { 1.0 } else { -1.0 };
            Ok(self.radius() * clenshaw_t_shifted(&self.coeffs, u))
        } else {
            hilbert_outside(self, t)
        }
    }
}

/// Series representation of a sampled section profile.
pub fn to_weighted_series(profile: &SectionProfile) -> Result<WeightedSeries> {
    let (a, b) = (profile.interval.h_minus, profile.interval.h_plus);
    check_interval(a, b)?;
    if profile.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("profile has non-finite values".into()));
    }
    let expected = second_kind_nodes(a, b, profile.nodes.len());
    let slack = 1e-9 * (b - a);
    if profile.nodes.iter().zip(&expected).any(|(x, y)| (x - y).abs() > slack) {
        return Err(Error::Invalid("profile nodes are not the second-kind Chebyshev layout".into()));
    }
    WeightedSeries::from_samples(a, b, &profile.values)
}

/// H F(t) = r·Σ g_k T_{k+1}(u(t)) for t strictly inside (a, b).
pub fn hilbert_on_interval(series: &WeightedSeries, t: f64) -> Result<f64> {
    let (a, b) = (series.a, series.b);
    if !(t > a && t < b) {
        return Err(Error::OutsideInterval { a, b, t });
    }
    Ok(series.radius() * clenshaw_t_shifted(&series.coeffs, series.to_unit(t)))
}

/// H F(t) for t outside [a, b] by adaptive quadrature in the angle
/// s = m + r·cos θ, where the weight cancels the endpoint behaviour.
pub fn hilbert_outside(series: &WeightedSeries, t: f64) -> Result<f64> {
    let (a, b) = (series.a, series.b);
    if !(t < a || t > b) || !t.is_finite() {
        return Err(Error::NotOutside { a, b, t });
    }
    let r = series.radius();
    let gap = if t > b { t - b } else { a - t };
    // t − s written without cancellation: gap + 2r·sin²(θ/2) to the right,
    // −(gap + 2r·cos²(θ/2)) to the left.
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let (hs, hc) = (0.5 * theta).sin_cos();
        let denom = if t > b { gap + 2.0 * r * hs * hs } else { -(gap + 2.0 * r * hc * hc) };
        r * r * s * s * clenshaw_u(&series.coeffs, c) / denom
    };
    // Close to the interval the integrand has a bump of width about
    // √(gap/r) at the near end; geometric breakpoints resolve it.
    let width = (gap / r).sqrt().min(PI);
    let mut cuts = vec![0.0];
    let mut edge = width;
    while edge < PI {
        cuts.push(edge);
        edge *= 4.0;
    }
    cuts.push(PI);
    let flip = t < a;
    let mut v = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = if flip { (PI - w[1], PI - w[0]) } else { (w[0], w[1]) };
        v += quad::integrate(integrand, lo, hi, EXTERIOR_TOLERANCE, EXTERIOR_TOLERANCE)?;
    }
    Ok(v / PI)
}

/// ∫_a^b s^j √((b−s)(s−a)) ds via s = m + r·u and the moments of √(1−u²).
pub fn moment_sqrt(a: f64, b: f64, j: usize) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    // μ_i = ∫_{−1}^{1} u^i √(1−u²) du; odd moments vanish.
    let mut mu = vec![0.0; j + 1];
    mu[0] = PI / 2.0;
    for i in (2..=j).step_by(2) {
        mu[i] = mu[i - 2] * (i as f64 - 1.0) / (i as f64 + 2.0);
    }
    let mut binom = 1.0;
    let mut sum = 0.0;
    for (i, mu_i) in mu.iter().enumerate() {
        if i > 0 {
            binom = binom * (j - i + 1) as f64 / i as f64;
        }
        if *mu_i != 0.0 {
            sum += binom * m.powi((j - i) as i32) * r.powi(i as i32) * mu_i;
        }
    }
    r * r * sum
}

/// Coefficients of H(χ_{[a,b]}(s)·s^k·√((b−s)(s−a)))(t) on (a, b), from
/// H(sφ)(t) = t·Hφ(t) − (1/π)∫φ starting at H(√·)(t) = t − (a+b)/2.
pub fn hilbert_sqrt_monomial(a: f64, b: f64, k: usize) -> Result<PolyCoeffs> {
    check_interval(a, b)?;
    if k > MAX_RECURRENCE_DEGREE {
        return Err(Error::DegreeTooLarge(k));
    }
    let mut coeffs = vec![-0.5 * (a + b), 1.0];
    for j in 1..=k {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = *c;
        }
        next[0] -= moment_sqrt(a, b, j - 1) / PI;
        coeffs = next;
    }
    Ok(PolyCoeffs::new(coeffs))
}

/// Recovers F(t) from its finite Hilbert transform on (a, b) and ∫F:
/// √((b−t)(t−a))·F(t) = −H(χ·√((b−s)(s−a))·HF)(t) + (1/π)∫F.
pub fn finite_hilbert_invert(hvalues: impl Fn(f64) -> f64, a: f64, b: f64, total_integral: f64, t: f64) -> Result<f64> {
    check_interval(a, b)?;
    let margin = ENDPOINT_MARGIN * (b - a);
    if !(t > a + margin && t < b - margin) {
        return Err(Error::AtEndpoint { a, b, t, margin });
    }
    let weighted = WeightedSeries::from_fn(a, b, PROJECTION_NODES, |s| {
        ((b - s) * (s - a)).sqrt() * hvalues(s)
    })?;
    let outer = hilbert_on_interval(&weighted, t)?;
    Ok((total_integral / PI - outer) / weighted.weight(t))
}

/// Reference principal value by singularity subtraction:
/// (1/π)[∫(F(s) − F(t))/(t − s) ds + F(t)·ln((t − a)/(b − t))],
/// integrated on [a, t] and [t, b] separately with Gauss–Kronrod.
pub fn pv_hilbert_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64, t: f64) -> Result<f64> {
    check_interval(a, b)?;
    if !(t > a && t < b) {
        return Err(Error::OutsideInterval { a, b, t });
    }
    let ft = f(t);
    let smooth = |s: f64| (f(s) - ft) / (t - s);
    let left = quad::integrate(smooth, a, t, PV_TOLERANCE, PV_TOLERANCE)?;
    let right = quad::integrate(smooth, t, b, PV_TOLERANCE, PV_TOLERANCE)?;
    Ok((left + right + ft * ((t - a) / (b - t)).ln()) / PI)
}

/// (1/Γ(−q))·∫_0^∞ t^{−1−q} f(−t) dt for q ∈ (−1, 0).
///
/// With α = −q the piece on [0, 1] becomes (1/α)∫_0^1 f(−y^{1/α}) dy, and the
/// tail, after t = 1/x and x = y^β with β = 1/(1−α), becomes
/// β∫_0^1 t·f(−t) dy. Both integrands stay bounded when f(−t) = O(1/t).
pub fn fractional_derivative_at_zero(f: impl Fn(f64) -> f64, q: f64) -> Result<f64> {
    if !(q > -1.0 && q < 0.0) {
        return Err(Error::Invalid(format!("order q = {q} must lie strictly inside (−1, 0)")));
    }
    let alpha = -q;
    let decay = |t: f64| (t.powf(alpha) * f(-t)).abs();
    let (near, far) = (decay(1e4), decay(1e8));
    if !near.is_finite() || !far.is_finite() || (far > 0.0 && far >= near) {
        return Err(Error::Divergent);
    }
    let head = quad::integrate(|y| f(-y.powf(1.0 / alpha)), 0.0, 1.0, 1e-14, 1e-11)? / alpha;
    let beta = 1.0 / (1.0 - alpha);
    let tail = quad::integrate(
        |y| {
            let x = y.powf(beta);
            if x == 0.0 {
                return 0.0;
            }
            let t = 1.0 / x;
            t * f(-t)
        },
        0.0,
        1.0,
        1e-14,
        1e-11,
    )? * beta;
    Ok((head + tail) / gamma(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn semicircle(s: f64) -> f64 {
        (1.0 - s * s).max(0.0).sqrt()
    }

    #[test]
    fn projection_examples() {
        let g = WeightedSeries::from_fn(-1.0, 1.0, 32, semicircle).unwrap();
        assert_abs_diff_eq!(g.coeffs[0], 1.0, epsilon = 1e-14);
        assert!(g.coeffs[1..].iter().all(|c| c.abs() < 1e-14));
        let g = WeightedSeries::from_fn(-1.0, 1.0, 32, |s| s * semicircle(s)).unwrap();
        assert_abs_diff_eq!(g.coeffs[1], 0.5, epsilon = 1e-14);
        assert!(g.coeffs.iter().enumerate().all(|(k, c)| k == 1 || c.abs() < 1e-14));
        let g = WeightedSeries::from_fn(-1.0, 1.0, 32, |s| 2.0 * semicircle(s)).unwrap();
        assert_abs_diff_eq!(g.coeffs[0], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn round_trip_at_nodes() {
        let f = |s: f64| ((3.0 - s) * (s - 1.0)).sqrt() * (s * s - 0.3 * s + 1.0).exp();
        let g = WeightedSeries::from_fn(1.0, 3.0, 64, f).unwrap();
        let peak = second_kind_nodes(1.0, 3.0, 64).iter().map(|t| f(*t).abs()).fold(0.0, f64::max);
        for t in second_kind_nodes(1.0, 3.0, 64) {
            assert!((g.eval(t) - f(t)).abs() <= 1e-10 * peak);
        }
    }

    #[test]
    fn interior_examples() {
        let one = WeightedSeries::new(-1.0, 1.0, vec![1.0]).unwrap();
        assert_abs_diff_eq!(hilbert_on_interval(&one, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        let shifted = WeightedSeries::new(0.0, 2.0, vec![1.0]).unwrap();
        assert_abs_diff_eq!(hilbert_on_interval(&shifted, 1.5).unwrap(), 0.5, epsilon = 1e-15);
        // F = t√(1−t²) = ½·U_1·√(1−t²); H F(0) = ½·T_2(0) = −½.
        let odd = WeightedSeries::new(-1.0, 1.0, vec![0.0, 0.5]).unwrap();
        let v = hilbert_on_interval(&odd, 0.0).unwrap();
        assert_abs_diff_eq!(v, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v, pv_hilbert_oracle(|s| s * semicircle(s), -1.0, 1.0, 0.0).unwrap(), epsilon = 1e-9);
        assert!(matches!(hilbert_on_interval(&one, 1.0), Err(Error::OutsideInterval { .. })));
    }

    #[test]
    fn exterior_examples() {
        let disk = WeightedSeries::new(-1.0, 1.0, vec![2.0]).unwrap();
        assert_abs_diff_eq!(hilbert_outside(&disk, 2.0).unwrap(), 2.0 * (2.0 - 3f64.sqrt()), epsilon = 1e-11);
        let one = WeightedSeries::new(-1.0, 1.0, vec![1.0]).unwrap();
        assert_abs_diff_eq!(hilbert_outside(&one, -2.0).unwrap(), -(2.0 - 3f64.sqrt()), epsilon = 1e-11);
        let far = 1e6;
        assert_abs_diff_eq!(far * hilbert_outside(&one, far).unwrap(), 0.5, epsilon = 1e-6);
        assert!(hilbert_outside(&one, 0.3).is_err());
        // Continuity across the endpoint.
        let g = WeightedSeries::new(-1.0, 1.0, vec![0.4, -0.2, 0.7]).unwrap();
        let at = g.hilbert(1.0).unwrap();
        assert_abs_diff_eq!(g.hilbert(1.0 - 1e-9).unwrap(), at, epsilon = 1e-6);
        assert_abs_diff_eq!(g.hilbert(1.0 + 1e-9).unwrap(), at, epsilon = 1e-3);
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(hilbert_sqrt_monomial(-1.0, 1.0, 0).unwrap().coeffs, vec![0.0, 1.0]);
        assert_eq!(hilbert_sqrt_monomial(0.0, 2.0, 0).unwrap().coeffs, vec![-1.0, 1.0]);
        let p = hilbert_sqrt_monomial(-1.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(p.coeffs[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coeffs[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coeffs[2], 1.0, epsilon = 1e-15);
        assert!(matches!(hilbert_sqrt_monomial(-1.0, 1.0, 31), Err(Error::DegreeTooLarge(31))));
    }

    #[test]
    fn moment_examples() {
        assert_abs_diff_eq!(moment_sqrt(-1.0, 1.0, 0), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(moment_sqrt(-1.0, 1.0, 1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(moment_sqrt(0.0, 2.0, 1), PI / 2.0, epsilon = 1e-15);
        for (a, b, j) in [(-0.5, 2.0, 3), (1.0, 4.0, 6), (-3.0, -1.0, 5)] {
            let direct = quad::integrate(|s: f64| s.powi(j as i32) * ((b - s) * (s - a)).sqrt(), a, b, 1e-14, 1e-14).unwrap();
            let closed = moment_sqrt(a, b, j);
            assert!((closed - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{closed} vs {direct}");
        }
    }

    #[test]
    fn inversion_examples() {
        let v = finite_hilbert_invert(|t| t, -1.0, 1.0, PI / 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        let v = finite_hilbert_invert(|t| t - 1.0, 0.0, 2.0, PI / 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        let v = finite_hilbert_invert(|t| 2.0 * t, -1.0, 1.0, PI, 0.6).unwrap();
        assert_abs_diff_eq!(v, 1.6, epsilon = 1e-12);
        assert!(matches!(
            finite_hilbert_invert(|t| t, -1.0, 1.0, PI / 2.0, 0.9995),
            Err(Error::AtEndpoint { .. })
        ));
    }

    #[test]
    fn pv_examples() {
        assert_abs_diff_eq!(pv_hilbert_oracle(semicircle, -1.0, 1.0, 0.3).unwrap(), 0.3, epsilon = 1e-8);
        let arch = |s: f64| ((2.0 - s) * s).max(0.0).sqrt();
        assert_abs_diff_eq!(pv_hilbert_oracle(arch, 0.0, 2.0, 0.5).unwrap(), -0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(pv_hilbert_oracle(|s| s * semicircle(s), -1.0, 1.0, 0.0).unwrap(), -0.5, epsilon = 1e-8);
    }

    #[test]
    fn fractional_examples() {
        let sqrt_pi = PI.sqrt();
        let v = fractional_derivative_at_zero(|x| if (-1.0..=0.0).contains(&x) { -x } else { 0.0 }, -0.5).unwrap();
        assert_abs_diff_eq!(v, (2.0 / 3.0) / sqrt_pi, epsilon = 1e-8);
        let v = fractional_derivative_at_zero(|x| if (-1.0..=0.0).contains(&x) { 1.0 } else { 0.0 }, -0.5).unwrap();
        assert_abs_diff_eq!(v, 2.0 / sqrt_pi, epsilon = 1e-8);
        assert!(matches!(fractional_derivative_at_zero(|_| 1.0, -0.5), Err(Error::Divergent)));
        assert!(fractional_derivative_at_zero(|_| 0.0, -1.0).is_err());
    }
}
