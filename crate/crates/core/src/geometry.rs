//! Support intervals and section volumes A_K(ξ, t).

use std::f64::consts::PI;

use hilbert_bodies_body::{dot, norm, Body, Direction, Shape};
use hilbert_bodies_oracle::SliceSampler;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::config::RunConfig;
use crate::error::{Error, Result};

const GOLDEN_TOLERANCE: f64 = 1e-10;
const SCAN_SAMPLES: usize = 720;

/// [h⁻(ξ), h⁺(ξ)]: the range of x·ξ over the body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub h_minus: f64,
    pub h_plus: f64,
}

impl SupportInterval {
    pub fn width(&self) -> f64 {
        self.h_plus - self.h_minus
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.h_plus + self.h_minus)
    }

    pub fn contains_open(&self, t: f64) -> bool {
        t > self.h_minus && t < self.h_plus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionSource {
    ClosedForm,
    Chord,
    MonteCarlo,
}

impl SectionSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SectionSource::ClosedForm => "closed-form",
            SectionSource::Chord => "chord",
            SectionSource::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionValue {
    pub value: f64,
    /// Present only for Monte Carlo values.
    pub stderr: Option<f64>,
    pub source: SectionSource,
}

/// Samples of t ↦ A_K(ξ, t) at interior second-kind Chebyshev nodes,
/// stored in increasing t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionProfile {
    pub direction: Direction,
    pub interval: SupportInterval,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub source: SectionSource,
    pub stderr: Option<Vec<f64>>,
}

impl SectionProfile {
    /// Largest stderr relative to the largest value (0 for exact sources).
    pub fn relative_stderr(&self) -> f64 {
        let Some(errs) = &self.stderr else { return 0.0 };
        let peak = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let worst = errs.iter().fold(0.0_f64, |m, v| m.max(*v));
        if peak > 0.0 {
            worst / peak
        } else {
            0.0
        }
    }
}

/// Monte Carlo settings used when a section has no deterministic route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionOptions {
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for SectionOptions {
    fn default() -> Self {
        SectionOptions { mc_samples: 1_000_000, seed: 42 }
    }
}

impl From<&RunConfig> for SectionOptions {
    fn from(cfg: &RunConfig) -> Self {
        SectionOptions { mc_samples: cfg.mc_samples, seed: cfg.seed }
    }
}

/// κ_d, the volume of the unit d-ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    PI.powf(half) / gamma(half + 1.0)
}

/// C_n = κ_{n−1}/κ_n, the constant in the ellipsoid section formula.
pub fn section_constant(n: usize) -> f64 {
    unit_ball_volume(n - 1) / unit_ball_volume(n)
}

/// Interior second-kind Chebyshev nodes u_j = cos(jπ/(N+1)), j = 1..N,
/// mapped to (a, b) and returned in increasing order.
pub fn second_kind_nodes(a: f64, b: f64, count: usize) -> Vec<f64> {
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    (0..count)
        .map(|i| {
            let theta = (count - i) as f64 * PI / (count + 1) as f64;
            m + r * theta.cos()
        })
        .collect()
}

fn check_dims(body: &Body, dir: &Direction) -> Result<()> {
    if body.dim() != dir.dim() {
        return Err(Error::Invalid(format!(
            "direction has dimension {}, body has {}",
            dir.dim(),
            body.dim()
        )));
    }
    Ok(())
}

/// Support interval with the extreme points attaining h⁻ and h⁺.
pub fn support_points(body: &Body, dir: &Direction) -> Result<(SupportInterval, Vec<f64>, Vec<f64>)> {
    check_dims(body, dir)?;
    let xi = dir.coords();
    let (lo, hi) = match body.shape() {
        Shape::Ellipsoid(e) => {
            let h = e.inverse_form(xi).sqrt();
            let n = xi.len();
            let mut offset = vec![0.0; n];
            for (i, o) in offset.iter_mut().enumerate() {
                *o = (0..n).map(|j| e.inverse()[(i, j)] * xi[j]).sum::<f64>() / h;
            }
            let c = e.center();
            let hi: Vec<f64> = c.iter().zip(&offset).map(|(c, o)| c + o).collect();
            let lo: Vec<f64> = c.iter().zip(&offset).map(|(c, o)| c - o).collect();
            (lo, hi)
        }
        Shape::Superellipsoid(s) => {
            // Hölder duality: the support point has |y_j|^{p−1} ∝ |a_j ξ_j|.
            let p = s.exponent() as f64;
            let scaled: Vec<f64> = s.semi_axes().iter().zip(xi).map(|(a, x)| a * x).collect();
            let big = scaled.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let q: f64 = scaled.iter().map(|v| (v.abs() / big).powf(p / (p - 1.0))).sum();
            let norm_p = q.powf(1.0 / p);
            let offset: Vec<f64> = scaled
                .iter()
                .zip(s.semi_axes())
                .map(|(v, a)| a * v.signum() * (v.abs() / big).powf(1.0 / (p - 1.0)) / norm_p)
                .collect();
            let c = s.center();
            let hi: Vec<f64> = c.iter().zip(&offset).map(|(c, o)| c + o).collect();
            let lo: Vec<f64> = c.iter().zip(&offset).map(|(c, o)| c - o).collect();
            (lo, hi)
        }
        Shape::PerturbedEllipse(_) => {
            let hi = golden_extreme(body, xi);
            let lo = golden_extreme(body, &[-xi[0], -xi[1]]);
            (lo.to_vec(), hi.to_vec())
        }
        Shape::Polygon(p) => {
            let pick = |sign: f64| -> Vec<f64> {
                p.vertices()
                    .iter()
                    .max_by(|u, v| (sign * dot(&u[..], xi)).total_cmp(&(sign * dot(&v[..], xi))))
                    .expect("polygon has vertices")
                    .to_vec()
            };
            (pick(-1.0), pick(1.0))
        }
    };
    let interval = SupportInterval { h_minus: dot(&lo, xi), h_plus: dot(&hi, xi) };
    Ok((interval, lo, hi))
}

/// Maximizer of ξ·x over a planar boundary parametrized by angle: coarse
/// scan, then golden-section search on the bracketing cell.
fn golden_extreme(body: &Body, xi: &[f64]) -> [f64; 2] {
    let point = |theta: f64| body.boundary_point_2d(theta).expect("planar body");
    let value = |theta: f64| {
        let x = point(theta);
        x[0] * xi[0] + x[1] * xi[1]
    };
    let step = 2.0 * PI / SCAN_SAMPLES as f64;
    let best = (0..SCAN_SAMPLES)
        .max_by(|&i, &j| value(i as f64 * step).total_cmp(&value(j as f64 * step)))
        .unwrap_or(0);
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (value(x1), value(x2));
    while hi - lo > GOLDEN_TOLERANCE {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = value(x1);
        }
    }
    point(0.5 * (lo + hi))
}

pub fn support_interval(body: &Body, dir: &Direction) -> Result<SupportInterval> {
    Ok(support_points(body, dir)?.0)
}

/// Per-direction state for repeated section evaluations.
pub struct SectionEvaluator<'a> {
    body: &'a Body,
    dir: Direction,
    interval: SupportInterval,
    a_minus: Vec<f64>,
    a_plus: Vec<f64>,
    sampler: Option<SliceSampler>,
    options: SectionOptions,
}

impl<'a> SectionEvaluator<'a> {
    pub fn new(body: &'a Body, dir: &Direction, options: SectionOptions) -> Result<Self> {
        let (interval, a_minus, a_plus) = support_points(body, dir)?;
        let sampler = match (body.shape(), body.dim()) {
            (Shape::Ellipsoid(_), _) | (_, 2) => None,
            _ => Some(SliceSampler::new(body, dir)?),
        };
        Ok(SectionEvaluator {
            body,
            dir: dir.clone(),
            interval,
            a_minus,
            a_plus,
            sampler,
            options,
        })
    }

    pub fn interval(&self) -> SupportInterval {
        self.interval
    }

    pub fn source(&self) -> SectionSource {
        match (self.body.shape(), &self.sampler) {
            (Shape::Ellipsoid(_), _) => SectionSource::ClosedForm,
            (_, Some(_)) => SectionSource::MonteCarlo,
            _ => SectionSource::Chord,
        }
    }

    /// A_K(ξ, t); Monte Carlo draws use the stream derived from `stream`.
    pub fn value(&self, t: f64, stream: u64) -> Result<SectionValue> {
        let source = self.source();
        let zero = SectionValue {
            value: 0.0,
            stderr: (source == SectionSource::MonteCarlo).then_some(0.0),
            source,
        };
        if !self.interval.contains_open(t) {
            return Ok(zero);
        }
        match (self.body.shape(), &self.sampler) {
            (Shape::Ellipsoid(e), _) => {
                let n = self.body.dim();
                let h = e.inverse_form(self.dir.coords()).sqrt();
                let shift = t - self.dir.dot(e.center());
                let vol = unit_ball_volume(n) / e.determinant().sqrt();
                let inner = (h * h - shift * shift).max(0.0);
                let value = section_constant(n) * vol * h.powi(-(n as i32)) * inner.powf((n as f64 - 1.0) / 2.0);
                Ok(SectionValue { value, stderr: None, source })
            }
            (_, Some(sampler)) => {
                let est = sampler.estimate(t, self.options.mc_samples, derive_seed(self.options.seed, stream))?;
                Ok(SectionValue { value: est.value, stderr: Some(est.stderr), source })
            }
            _ => Ok(SectionValue { value: self.chord(t), stderr: None, source }),
        }
    }

    fn chord(&self, t: f64) -> f64 {
        let lambda = (t - self.interval.h_minus) / self.interval.width();
        let p: Vec<f64> = self
            .a_minus
            .iter()
            .zip(&self.a_plus)
            .map(|(lo, hi)| lo + lambda * (hi - lo))
            .collect();
        let xi = self.dir.coords();
        let perp = [-xi[1], xi[0]];
        let scale = norm(&[self.a_plus[0] - self.a_minus[0], self.a_plus[1] - self.a_minus[1]]) + self.interval.width();
        let reach = |sign: f64| -> f64 {
            let at = |s: f64| [p[0] + sign * s * perp[0], p[1] + sign * s * perp[1]];
            let mut lo = 0.0;
            let mut hi = scale;
            while self.body.contains(&at(hi)) {
                lo = hi;
                hi *= 2.0;
            }
            while hi - lo > 1e-15 * scale {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.body.contains(&at(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        reach(1.0) + reach(-1.0)
    }

    pub fn profile(&self, node_count: usize) -> Result<SectionProfile> {
        if node_count < 8 {
            return Err(Error::Invalid(format!("need at least 8 nodes, got {node_count}")));
        }
        let nodes = second_kind_nodes(self.interval.h_minus, self.interval.h_plus, node_count);
        let mut values = Vec::with_capacity(node_count);
        let mut errs = Vec::with_capacity(node_count);
        for (j, t) in nodes.iter().enumerate() {
            let v = self.value(*t, j as u64)?;
            values.push(v.value);
            errs.push(v.stderr.unwrap_or(0.0));
        }
        let source = self.source();
        Ok(SectionProfile {
            direction: self.dir.clone(),
            interval: self.interval,
            nodes,
            values,
            source,
            stderr: (source == SectionSource::MonteCarlo).then_some(errs),
        })
    }
}

/// Seed for an independent Monte Carlo stream.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn section_volume(body: &Body, dir: &Direction, t: f64, options: SectionOptions) -> Result<SectionValue> {
    SectionEvaluator::new(body, dir, options)?.value(t, 0)
}

pub fn sample_profile(body: &Body, dir: &Direction, node_count: usize, options: SectionOptions) -> Result<SectionProfile> {
    SectionEvaluator::new(body, dir, options)?.profile(node_count)
}
