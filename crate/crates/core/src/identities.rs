//! Seeded checks of the closed-form identities of the Hilbert engine.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::second_kind_nodes;
use crate::hilbert::{finite_hilbert_invert, hilbert_on_interval, hilbert_sqrt_monomial, pv_hilbert_oracle, WeightedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Arch,
    Intertwine,
    Inversion,
    Recurrence,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Arch, Suite::Intertwine, Suite::Inversion, Suite::Recurrence];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Arch => "arch",
            Suite::Intertwine => "intertwine",
            Suite::Inversion => "inversion",
            Suite::Recurrence => "recurrence",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Suite::Arch | Suite::Intertwine => 1e-8,
            Suite::Inversion => 1e-6,
            Suite::Recurrence => 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub label: String,
    /// Fitted polynomial degree, for the recurrence suite.
    pub degree: Option<usize>,
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub suite: Suite,
    pub tolerance: f64,
    pub max_error: f64,
    pub passed: bool,
    pub rows: Vec<IdentityRow>,
}

fn random_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> (f64, f64) {
    loop {
        let a = rng.random_range(lo..hi);
        let b = rng.random_range(lo..hi);
        if (b - a).abs() > 0.1 {
            return (a.min(b), a.max(b));
        }
    }
}

fn random_series(rng: &mut ChaCha8Rng, max_len: usize) -> Result<WeightedSeries> {
    let (a, b) = random_interval(rng, -5.0, 5.0);
    let len = rng.random_range(1..=max_len);
    let coeffs = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    WeightedSeries::new(a, b, coeffs)
}

/// Points strictly inside (a, b), evenly spread.
fn interior(a: f64, b: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| a + (b - a) * (i as f64 + 0.5) / count as f64)
}

fn report(suite: Suite, rows: Vec<IdentityRow>) -> IdentityReport {
    let max_error = rows.iter().fold(0.0_f64, |m, r| m.max(r.max_error));
    let passed = rows.iter().all(|r| r.passed);
    IdentityReport { suite, tolerance: suite.tolerance(), max_error, passed, rows }
}

fn row(label: String, degree: Option<usize>, max_error: f64, tol: f64) -> IdentityRow {
    IdentityRow { label, degree, max_error, passed: max_error < tol }
}

/// H(χ√((b−s)(s−a)))(t) = t − (a+b)/2 on 20 random intervals in [−5, 5],
/// with the arch sampled and projected rather than entered as g = [1].
fn arch(rng: &mut ChaCha8Rng) -> Result<IdentityReport> {
    let tol = Suite::Arch.tolerance();
    let mut rows = Vec::new();
    for case in 0..20 {
        let (a, b) = random_interval(rng, -5.0, 5.0);
        let series = WeightedSeries::from_fn(a, b, 64, |s| ((b - s) * (s - a)).sqrt())?;
        let mut err = 0.0_f64;
        for t in interior(a, b, 100) {
            err = err.max((hilbert_on_interval(&series, t)? - (t - 0.5 * (a + b))).abs());
        }
        rows.push(row(format!("case {case} ({a:.3}, {b:.3})"), None, err, tol));
    }
    Ok(report(Suite::Arch, rows))
}

/// H(sφ)(t) = t·Hφ(t) − (1/π)∫φ for 100 random series, with sφ obtained by
/// sampling and projecting.
fn intertwine(rng: &mut ChaCha8Rng) -> Result<IdentityReport> {
    let tol = Suite::Intertwine.tolerance();
    let mut rows = Vec::new();
    for case in 0..100 {
        let phi = random_series(rng, 13)?;
        let s_phi = WeightedSeries::from_fn(phi.a, phi.b, 64, |s| s * phi.eval(s))?;
        let mass = phi.integral() / PI;
        let mut err = 0.0_f64;
        for t in interior(phi.a, phi.b, 20) {
            let lhs = hilbert_on_interval(&s_phi, t)?;
            let rhs = t * hilbert_on_interval(&phi, t)? - mass;
            err = err.max((lhs - rhs).abs());
        }
        rows.push(row(format!("case {case}"), None, err, tol));
    }
    Ok(report(Suite::Intertwine, rows))
}

/// Recovers 50 random sqrt-weighted polynomials of degree ≤ 10 from their
/// transforms and integrals, measured at 32 interior nodes.
fn inversion(rng: &mut ChaCha8Rng) -> Result<IdentityReport> {
    let tol = Suite::Inversion.tolerance();
    let mut rows = Vec::new();
    for case in 0..50 {
        let f = random_series(rng, 11)?;
        let total = f.integral();
        let hf = |t: f64| hilbert_on_interval(&f, t).unwrap_or(f64::NAN);
        let mut err = 0.0_f64;
        for t in second_kind_nodes(f.a, f.b, 32) {
            let back = finite_hilbert_invert(hf, f.a, f.b, total, t)?;
            err = err.max((back - f.eval(t)).abs());
        }
        rows.push(row(format!("case {case} (degree {})", f.coeffs.len() - 1), None, err, tol));
    }
    Ok(report(Suite::Inversion, rows))
}

/// Degree and values of the monomial recurrence for k = 0..=12 against the
/// principal-value quadrature, on intervals inside [−1, 1].
fn recurrence() -> Result<IdentityReport> {
    let tol = Suite::Recurrence.tolerance();
    let mut rows = Vec::new();
    for k in 0..=12usize {
        let mut err = 0.0_f64;
        let mut degree = usize::MAX;
        let mut leading_ok = true;
        for (a, b) in [(-1.0, 1.0), (0.0, 1.0), (-0.8, 0.6)] {
            let poly = hilbert_sqrt_monomial(a, b, k)?;
            let d = poly.degree();
            degree = degree.min(d);
            leading_ok &= poly.coeffs.len() == k + 2 && (poly.coeffs[k + 1] - 1.0).abs() < 1e-15;
            let f = |s: f64| s.powi(k as i32) * ((b - s) * (s - a)).max(0.0).sqrt();
            for t in interior(a, b, 10) {
                err = err.max((poly.eval(t) - pv_hilbert_oracle(f, a, b, t)?).abs());
            }
        }
        let mut r = row(format!("k = {k}"), Some(degree), err, tol);
        r.passed &= degree == k + 1 && leading_ok;
        rows.push(r);
    }
    Ok(report(Suite::Recurrence, rows))
}

/// Runs one suite with a fixed seed.
pub fn run_suite(suite: Suite, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Arch => arch(&mut rng),
        Suite::Intertwine => intertwine(&mut rng),
        Suite::Inversion => inversion(&mut rng),
        Suite::Recurrence => recurrence(),
    }
}
