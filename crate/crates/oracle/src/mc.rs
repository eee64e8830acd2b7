//! Rejection-sampling estimates of hyperplane section volumes.

use hilbert_bodies_body::{Body, BodySpec, Direction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sphere::{complement_basis, maximize_on_sphere, radial_extent, support_by_ascent};
use crate::OracleError;

pub const MIN_SAMPLES: u64 = 10_000;

const CHUNK: u64 = 1 << 14;
const BOX_PADDING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Precomputed support data for one body and direction, reused across
/// offsets t.
#[derive(Debug, Clone)]
pub struct SliceSampler {
    body: Body,
    dir: Direction,
    h_minus: f64,
    h_plus: f64,
    a_minus: Vec<f64>,
    a_plus: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl SliceSampler {
    pub fn new(body: &Body, dir: &Direction) -> Result<Self, OracleError> {
        if dir.dim() != body.dim() {
            return Err(OracleError::Invalid(format!(
                "direction has dimension {}, body has {}",
                dir.dim(),
                body.dim()
            )));
        }
        let (h_minus, h_plus, a_minus, a_plus) = support_by_ascent(body, dir);
        Ok(SliceSampler {
            body: body.clone(),
            dir: dir.clone(),
            h_minus,
            h_plus,
            a_minus,
            a_plus,
            basis: complement_basis(dir.coords()),
        })
    }

    /// Support interval (h⁻, h⁺) as found by the ascent.
    pub fn support(&self) -> (f64, f64) {
        (self.h_minus, self.h_plus)
    }

    fn slice_point(&self, t: f64) -> Vec<f64> {
        let lambda = (t - self.h_minus) / (self.h_plus - self.h_minus);
        self.a_minus
            .iter()
            .zip(&self.a_plus)
            .map(|(lo, hi)| lo + lambda * (hi - lo))
            .collect()
    }

    fn embed(&self, p: &[f64], y: &[f64]) -> Vec<f64> {
        let mut x = p.to_vec();
        for (coef, e) in y.iter().zip(&self.basis) {
            x.iter_mut().zip(e).for_each(|(xi, ei)| *xi += coef * ei);
        }
        x
    }

    /// Bounding box of the slice in basis coordinates around `p`, from the
    /// slice support function in the ±axis directions.
    fn slice_box(&self, p: &[f64]) -> Vec<(f64, f64)> {
        let k = self.basis.len();
        let extent = |u: &[f64]| -> f64 {
            let v = self.embed(&vec![0.0; self.body.dim()], u);
            radial_extent(&self.body, p, &v)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0c5);
        (0..k)
            .map(|i| {
                let mut side = |sign: f64| -> f64 {
                    let mut axis = vec![0.0; k];
                    axis[i] = sign;
                    let random: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let starts = if k > 1 { vec![axis, random] } else { vec![axis] };
                    let (best, _) = maximize_on_sphere(k, &starts, |u| sign * u[i] * extent(u));
                    best.max(0.0)
                };
                let hi = side(1.0);
                let lo = side(-1.0);
                let pad = BOX_PADDING * (hi + lo);
                (-lo - pad, hi + pad)
            })
            .collect()
    }

    pub fn estimate(&self, t: f64, samples: u64, seed: u64) -> Result<McEstimate, OracleError> {
        if samples < MIN_SAMPLES {
            return Err(OracleError::TooFewSamples { min: MIN_SAMPLES, got: samples });
        }
        let empty = McEstimate { value: 0.0, stderr: 0.0, samples, seed };
        if !(t > self.h_minus && t < self.h_plus) {
            return Ok(empty);
        }
        let p = self.slice_point(t);
        if !self.body.contains(&p) {
            return Ok(empty);
        }
        let bounds = self.slice_box(&p);
        let volume: f64 = bounds.iter().map(|(lo, hi)| hi - lo).product();
        if !(volume > 0.0) {
            return Ok(empty);
        }
        let chunks = samples.div_ceil(CHUNK);
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk);
                let count = CHUNK.min(samples - chunk * CHUNK);
                let mut y = vec![0.0; bounds.len()];
                let mut inside = 0u64;
                for _ in 0..count {
                    for (yi, (lo, hi)) in y.iter_mut().zip(&bounds) {
                        *yi = rng.random_range(*lo..*hi);
                    }
                    if self.body.contains(&self.embed(&p, &y)) {
                        inside += 1;
                    }
                }
                inside
            })
            .sum();
        let n = samples as f64;
        let frac = hits as f64 / n;
        let var = n / (n - 1.0) * frac * (1.0 - frac);
        Ok(McEstimate {
            value: volume * frac,
            stderr: volume * (var / n).sqrt(),
            samples,
            seed,
        })
    }

    pub fn direction(&self) -> &Direction {
        &self.dir
    }
}

/// One-shot section volume ∫_{K ∩ {x·ξ = t}} dx by rejection sampling.
pub fn mc_section_volume(
    spec: &BodySpec,
    dir: &Direction,
    t: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, OracleError> {
    if samples < MIN_SAMPLES {
        return Err(OracleError::TooFewSamples { min: MIN_SAMPLES, got: samples });
    }
    let body = Body::new(spec.clone()).map_err(|e| OracleError::Invalid(e.to_string()))?;
    SliceSampler::new(&body, dir)?.estimate(t, samples, seed)
}
