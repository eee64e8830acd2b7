//! Polynomiality tests (i), (ii), (iii), boundary asymptotics, the gauge
//! parity check, and the aggregated ellipsoid verdict.

use hilbert_bodies_body::{Body, Direction};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::directions::directions;
use crate::error::{Error, Result};
use crate::geometry::{SectionEvaluator, SectionOptions, SectionProfile, SectionSource};
use crate::hilbert::{hilbert_on_interval, to_weighted_series, PolyCoeffs};

/// Monte Carlo runs whose effective tolerance would exceed this cannot
/// separate ellipsoids from other bodies and are refused.
pub const NOISE_CEILING: f64 = 1e-3;
/// Relative offsets h⁺ − t (as fractions of the width) for the exponent fit.
pub const EXPONENT_WINDOW: (f64, f64) = (1e-4, 1e-2);
const NARROWED_WINDOW: (f64, f64) = (1e-3, 1e-2);
const EXPONENT_POINTS: usize = 12;
const PARITY_POINTS: usize = 500;

/// q(t) = q0·(h⁺ − t)(t − h⁻).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QFactor {
    pub q0: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

impl QFactor {
    pub fn eval(&self, t: f64) -> f64 {
        self.q0 * (self.h_plus - t) * (t - self.h_minus)
    }

    pub fn roots(&self) -> (f64, f64) {
        (self.h_minus, self.h_plus)
    }
}

/// The quadratic factor has its roots at the support endpoints; q0 is fixed
/// to 1 since any positive scale can move into the polynomial part.
pub fn fit_q(profile: &SectionProfile) -> Result<QFactor> {
    let (a, b) = (profile.interval.h_minus, profile.interval.h_plus);
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::DegenerateInterval { a, b });
    }
    Ok(QFactor { q0: 1.0, h_minus: a, h_plus: b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// A/√q is a polynomial.
    I,
    /// A·√q is a polynomial.
    Ii,
    /// H A is a polynomial on the support interval.
    Iii,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::I, Condition::Ii, Condition::Iii];

    pub fn label(&self) -> &'static str {
        match self {
            Condition::I => "i",
            Condition::Ii => "ii",
            Condition::Iii => "iii",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFitReport {
    pub degree: usize,
    /// Monomial coefficients in t, for reporting.
    pub coeffs: PolyCoeffs,
    /// Coefficients in T_k(u) with u the data span mapped to [−1, 1].
    pub chebyshev: Vec<f64>,
    /// max |fit − data| / max |data| over the nodes.
    pub sup_residual: f64,
    pub data_span: (f64, f64),
}

fn chebyshev_matrix(us: &[f64], degree: usize) -> DMatrix<f64> {
    DMatrix::from_fn(us.len(), degree + 1, |i, k| {
        let u = us[i];
        match k {
            0 => 1.0,
            1 => u,
            _ => {
                let (mut t0, mut t1) = (1.0, u);
                for _ in 1..k {
                    let t2 = 2.0 * u * t1 - t0;
                    t0 = t1;
                    t1 = t2;
                }
                t1
            }
        }
    })
}

fn least_squares(design: DMatrix<f64>, ys: &[f64]) -> Result<Vec<f64>> {
    let rhs = DVector::from_column_slice(ys);
    let svd = design.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-13 * svd.singular_values.max())
        .map_err(|e| Error::Invalid(format!("least squares failed: {e}")))?;
    Ok(sol.iter().copied().collect())
}

/// Monomial coefficients in t of Σ c_k T_k(u), u = (2t − a − b)/(b − a).
fn chebyshev_to_monomial(cheb: &[f64], a: f64, b: f64) -> Vec<f64> {
    let d = cheb.len();
    // Monomial coefficients in u.
    let mut in_u = vec![0.0; d];
    let (mut t0, mut t1) = (vec![1.0], vec![0.0, 1.0]);
    for (k, c) in cheb.iter().enumerate() {
        let tk = match k {
            0 => t0.clone(),
            1 => t1.clone(),
            _ => {
                let mut t2 = vec![0.0; k + 1];
                for (i, v) in t1.iter().enumerate() {
                    t2[i + 1] += 2.0 * v;
                }
                for (i, v) in t0.iter().enumerate() {
                    t2[i] -= v;
                }
                t0 = std::mem::replace(&mut t1, t2);
                t1.clone()
            }
        };
        for (i, v) in tk.iter().enumerate() {
            in_u[i] += c * v;
        }
    }
    // Horner substitution u = α·t + β.
    let alpha = 2.0 / (b - a);
    let beta = -(a + b) / (b - a);
    let mut out = vec![0.0; d];
    for c in in_u.iter().rev() {
        let mut next = vec![0.0; d];
        for k in 0..d {
            if k + 1 < d {
                next[k + 1] += alpha * out[k];
            }
            next[k] += beta * out[k];
        }
        next[0] += c;
        out = next;
    }
    out
}

fn fit_degree(xs: &[f64], ys: &[f64], degree: usize, span: (f64, f64)) -> Result<PolyFitReport> {
    let (a, b) = span;
    let us: Vec<f64> = xs.iter().map(|x| (2.0 * x - a - b) / (b - a)).collect();
    let design = chebyshev_matrix(&us, degree);
    let cheb = least_squares(design.clone(), ys)?;
    let fitted = &design * DVector::from_column_slice(&cheb);
    let worst = fitted.iter().zip(ys).fold(0.0_f64, |m, (f, y)| m.max((f - y).abs()));
    let peak = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    let sup_residual = if peak > 0.0 { worst / peak } else { worst };
    Ok(PolyFitReport {
        degree,
        coeffs: PolyCoeffs::new(chebyshev_to_monomial(&cheb, a, b)),
        chebyshev: cheb,
        sup_residual,
        data_span: span,
    })
}

/// Least-squares fits of degree 0, 1, …, `max_degree` in a Chebyshev basis;
/// returns the first whose relative sup residual is ≤ `tol`, otherwise the
/// fit at `max_degree`.
pub fn fit_polynomial(xs: &[f64], ys: &[f64], max_degree: usize, tol: f64) -> Result<PolyFitReport> {
    if xs.len() != ys.len() || xs.len() < max_degree + 1 {
        return Err(Error::Invalid(format!(
            "{} nodes and {} values cannot support degree {max_degree}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite fit data".into()));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo < hi) {
        return Err(Error::DegenerateInterval { a: lo, b: hi });
    }
    let mut last = None;
    for degree in 0..=max_degree {
        let fit = fit_degree(xs, ys, degree, (lo, hi))?;
        if fit.sup_residual <= tol {
            return Ok(fit);
        }
        last = Some(fit);
    }
    Ok(last.expect("at least degree 0 was fitted"))
}

/// The sampled function whose polynomiality condition `which` asserts.
pub fn condition_target(profile: &SectionProfile, which: Condition) -> Result<Vec<f64>> {
    let q = fit_q(profile)?;
    match which {
        Condition::I => Ok(profile.nodes.iter().zip(&profile.values).map(|(t, a)| a / q.eval(*t).sqrt()).collect()),
        Condition::Ii => Ok(profile.nodes.iter().zip(&profile.values).map(|(t, a)| a * q.eval(*t).sqrt()).collect()),
        Condition::Iii => {
            let series = to_weighted_series(profile)?;
            profile.nodes.iter().map(|t| hilbert_on_interval(&series, *t)).collect()
        }
    }
}

/// Fits the target of condition `which` on the profile's own nodes.
pub fn check_condition(profile: &SectionProfile, which: Condition, n_max_degree: usize, tol: f64) -> Result<PolyFitReport> {
    let needed = 4 * (n_max_degree + 1);
    if profile.nodes.len() < needed {
        return Err(Error::Invalid(format!(
            "degree {n_max_degree} needs at least {needed} nodes, profile has {}",
            profile.nodes.len()
        )));
    }
    if profile.source == SectionSource::MonteCarlo {
        let rel = profile.relative_stderr();
        if rel > tol {
            return Err(Error::NoiseFloor { relative_stderr: rel, tolerance: tol });
        }
    }
    let ys = condition_target(profile, which)?;
    fit_polynomial(&profile.nodes, &ys, n_max_degree, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub exponent_plus: f64,
    pub exponent_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// Offsets from the endpoint as fractions of h⁺ − h⁻.
    pub window: (f64, f64),
}

/// Slope and intercept of the least-squares line through (x, y).
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn endpoint_slope(ev: &SectionEvaluator<'_>, window: (f64, f64), upper: bool, stream: u64) -> Result<Option<(f64, f64)>> {
    let iv = ev.interval();
    let w = iv.width();
    let (lo, hi) = (window.0.ln(), window.1.ln());
    let mut logs_d = Vec::with_capacity(EXPONENT_POINTS);
    let mut logs_a = Vec::with_capacity(EXPONENT_POINTS);
    for i in 0..EXPONENT_POINTS {
        let s = (lo + (hi - lo) * i as f64 / (EXPONENT_POINTS - 1) as f64).exp();
        let delta = s * w;
        let t = if upper { iv.h_plus - delta } else { iv.h_minus + delta };
        let a = ev.value(t, stream + i as u64)?.value;
        if !(a > 0.0) || !a.is_finite() {
            return Ok(None);
        }
        logs_d.push(delta.ln());
        logs_a.push(a.ln());
    }
    let (slope, intercept) = line_fit(&logs_d, &logs_a);
    Ok(Some((slope, intercept.exp())))
}

fn asymptotics(ev: &SectionEvaluator<'_>) -> Result<AsymptoticsReport> {
    let mut window = EXPONENT_WINDOW;
    let side = |upper: bool, window: (f64, f64)| endpoint_slope(ev, window, upper, if upper { 1 << 20 } else { 1 << 21 });
    let (plus, minus) = match (side(true, window)?, side(false, window)?) {
        (Some(p), Some(m)) => (p, m),
        _ => {
            window = NARROWED_WINDOW;
            let p = side(true, window)?.ok_or(Error::Underflow { side: "h+" })?;
            let m = side(false, window)?.ok_or(Error::Underflow { side: "h-" })?;
            (p, m)
        }
    };
    Ok(AsymptoticsReport {
        exponent_plus: plus.0,
        exponent_minus: minus.0,
        c_plus: plus.1,
        c_minus: minus.1,
        window,
    })
}

/// Log-log slopes of A near both support endpoints, with prefactors.
pub fn estimate_exponent(body: &Body, dir: &Direction, options: SectionOptions) -> Result<AsymptoticsReport> {
    asymptotics(&SectionEvaluator::new(body, dir, options)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub m: usize,
    /// "sum" for odd m, "difference" for even m.
    pub combination: String,
    pub degree: usize,
    pub points: usize,
    pub sup_residual: f64,
    /// The sampled combination vanished identically; the residual is moot.
    pub trivial: bool,
}

/// The i-th point of the Halton sequence with the given prime bases.
fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn exponents(n: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, degree, &mut Vec::new(), &mut out);
    out
}

/// Fits ‖−x‖^e + ‖x‖^e (m odd) or ‖−x‖^e − ‖x‖^e (m even), e = m − n + 1,
/// by a polynomial of total degree e on Halton points in 0.5 ≤ |x| ≤ 2.
pub fn minkowski_parity_check(body: &Body, m: usize) -> Result<ParityReport> {
    let n = body.dim();
    if m < n {
        return Err(Error::Invalid(format!("m = {m} must exceed n − 1 = {}", n - 1)));
    }
    if !body.origin_interior() {
        return Err(hilbert_bodies_body::BodyError::OriginNotInterior.into());
    }
    let e = m + 1 - n;
    const PRIMES: [usize; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    if n > PRIMES.len() {
        return Err(Error::Invalid(format!("dimension {n} is too large for the parity check")));
    }
    let mut points = Vec::with_capacity(PARITY_POINTS);
    let mut i = 1;
    while points.len() < PARITY_POINTS {
        let x: Vec<f64> = (0..n).map(|k| 4.0 * halton(i, PRIMES[k]) - 2.0).collect();
        i += 1;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (0.5..=2.0).contains(&r) {
            points.push(x);
        }
    }
    let sum = m % 2 == 1;
    let mut ys = Vec::with_capacity(points.len());
    let mut scale = 0.0_f64;
    for x in &points {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let plus = body.gauge(x)?.powi(e as i32);
        let minus = body.gauge(&neg)?.powi(e as i32);
        scale = scale.max(plus.abs()).max(minus.abs());
        ys.push(if sum { minus + plus } else { minus - plus });
    }
    let combination = if sum { "sum" } else { "difference" }.to_string();
    let peak = ys.iter().fold(0.0_f64, |acc, y| acc.max(y.abs()));
    if peak <= 1e-12 * scale {
        return Ok(ParityReport { m, combination, degree: e, points: points.len(), sup_residual: 0.0, trivial: true });
    }
    let monomials = exponents(n, e);
    let design = DMatrix::from_fn(points.len(), monomials.len(), |i, j| {
        points[i].iter().zip(&monomials[j]).map(|(x, p)| x.powi(*p as i32)).product()
    });
    let coef = least_squares(design.clone(), &ys)?;
    let fitted = &design * DVector::from_column_slice(&coef);
    let worst = fitted.iter().zip(&ys).fold(0.0_f64, |acc, (f, y)| acc.max((f - y).abs()));
    Ok(ParityReport {
        m,
        combination,
        degree: e,
        points: points.len(),
        sup_residual: worst / peak,
        trivial: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionVerdict {
    pub index: usize,
    pub direction: Direction,
    pub source: SectionSource,
    /// Pass threshold actually applied (raised for Monte Carlo noise).
    pub tolerance: f64,
    pub residual_i: f64,
    pub residual_ii: f64,
    pub residual_iii: f64,
    pub degree_i: usize,
    pub degree_ii: usize,
    pub degree_iii: usize,
    /// Monomial coefficients b_j of the condition (iii) fit.
    pub coeffs_iii: PolyCoeffs,
    pub q: QFactor,
    pub asymptotics: AsymptoticsReport,
}

impl DirectionVerdict {
    pub fn residual(&self, which: Condition) -> f64 {
        match which {
            Condition::I => self.residual_i,
            Condition::Ii => self.residual_ii,
            Condition::Iii => self.residual_iii,
        }
    }

    pub fn passes(&self, which: Condition) -> bool {
        self.residual(which) <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDirection {
    pub index: usize,
    pub direction: Direction,
    pub reason: String,
    pub noise_floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyVerdict {
    pub kind: String,
    pub dim: usize,
    pub threshold: f64,
    pub directions: Vec<DirectionVerdict>,
    pub skipped: Vec<SkippedDirection>,
    pub pass_i: bool,
    pub pass_ii: bool,
    pub pass_iii: bool,
    pub ellipsoid_compatible: bool,
    /// Disagreements among (i), (ii), (iii).
    pub diagnostics: Vec<String>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl BodyVerdict {
    pub fn consistent(&self) -> bool {
        self.pass_i == self.pass_ii && self.pass_ii == self.pass_iii
    }

    pub fn noise_limited(&self) -> bool {
        self.skipped.iter().any(|s| s.noise_floor)
    }
}

/// Full per-direction pipeline: profile, q, the three conditions, exponents.
pub fn direction_verdict(body: &Body, dir: &Direction, index: usize, cfg: &RunConfig) -> Result<DirectionVerdict> {
    let options = SectionOptions::from(cfg);
    let ev = SectionEvaluator::new(body, dir, options)?;
    let mut tolerance = cfg.residual_threshold;
    if ev.source() == SectionSource::MonteCarlo {
        let pilot = ev.value(ev.interval().midpoint(), u64::MAX)?;
        let rel = match pilot.stderr {
            Some(s) if pilot.value > 0.0 => s / pilot.value,
            _ => f64::INFINITY,
        };
        tolerance = tolerance.max(5.0 * rel);
        if tolerance > NOISE_CEILING {
            return Err(Error::NoiseFloor { relative_stderr: rel, tolerance: NOISE_CEILING });
        }
    }
    let profile = ev.profile(cfg.node_count)?;
    let q = fit_q(&profile)?;
    let fi = check_condition(&profile, Condition::I, cfg.n_max_degree, tolerance)?;
    let fii = check_condition(&profile, Condition::Ii, cfg.n_max_degree, tolerance)?;
    let fiii = check_condition(&profile, Condition::Iii, cfg.n_max_degree, tolerance)?;
    let asymptotics = asymptotics(&ev)?;
    Ok(DirectionVerdict {
        index,
        direction: dir.clone(),
        source: ev.source(),
        tolerance,
        residual_i: fi.sup_residual,
        residual_ii: fii.sup_residual,
        residual_iii: fiii.sup_residual,
        degree_i: fi.degree,
        degree_ii: fii.degree,
        degree_iii: fiii.degree,
        coeffs_iii: fiii.coeffs,
        q,
        asymptotics,
    })
}

/// Runs the pipeline over `cfg.direction_count` directions in parallel and
/// aggregates. Failed directions are recorded in `skipped`.
pub fn verdict(body: &Body, cfg: &RunConfig) -> Result<BodyVerdict> {
    if cfg.direction_count < 8 {
        return Err(Error::Invalid(format!("need at least 8 directions, got {}", cfg.direction_count)));
    }
    let dirs = directions(body.dim(), cfg.direction_count, cfg.seed)?;
    verdict_over(body, &dirs, cfg)
}

/// As [`verdict`] with an explicit direction set.
pub fn verdict_over(body: &Body, dirs: &[Direction], cfg: &RunConfig) -> Result<BodyVerdict> {
    let outcomes: Vec<Result<DirectionVerdict>> = dirs
        .par_iter()
        .enumerate()
        .map(|(i, d)| direction_verdict(body, d, i, cfg))
        .collect();
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(v) => verdicts.push(v),
            Err(e) => skipped.push(SkippedDirection {
                index: i,
                direction: dirs[i].clone(),
                noise_floor: e.is_noise_floor(),
                reason: e.to_string(),
            }),
        }
    }
    let all = |which: Condition| !verdicts.is_empty() && verdicts.iter().all(|v| v.passes(which));
    let (pass_i, pass_ii, pass_iii) = (all(Condition::I), all(Condition::Ii), all(Condition::Iii));

    let mut diagnostics = Vec::new();
    if !(pass_i == pass_ii && pass_ii == pass_iii) {
        diagnostics.push(format!("conditions disagree: (i) {pass_i}, (ii) {pass_ii}, (iii) {pass_iii}"));
    }
    for v in &verdicts {
        let flags = Condition::ALL.map(|c| v.passes(c));
        if !(flags[0] == flags[1] && flags[1] == flags[2]) {
            diagnostics.push(format!(
                "direction {}: (i) {} ({:.2e}), (ii) {} ({:.2e}), (iii) {} ({:.2e})",
                v.index, flags[0], v.residual_i, flags[1], v.residual_ii, flags[2], v.residual_iii
            ));
        }
    }
    let mut warnings = Vec::new();
    if !body.is_smooth() {
        warnings.push("non-smooth body: the smoothness hypothesis fails, results are not interpretable".into());
    }
    let mut notes = Vec::new();
    if body.dim() % 2 == 1 {
        notes.push(format!(
            "odd dimension n = {}: no body has a polynomial Hilbert transform of its section function here, so (iii) fails even for ellipsoids (whose section functions are plain polynomials)",
            body.dim()
        ));
    }
    if !skipped.is_empty() {
        notes.push(format!("{} of {} directions skipped", skipped.len(), dirs.len()));
    }
    Ok(BodyVerdict {
        kind: body.kind_name().to_string(),
        dim: body.dim(),
        threshold: cfg.residual_threshold,
        directions: verdicts,
        skipped,
        pass_i,
        pass_ii,
        pass_iii,
        ellipsoid_compatible: pass_i && pass_ii && pass_iii,
        diagnostics,
        warnings,
        notes,
    })
}
