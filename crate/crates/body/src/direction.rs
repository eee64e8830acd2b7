use serde::{Deserialize, Serialize};

use crate::error::BodyError;

/// A unit vector ξ on the sphere S^{n-1}, n ≥ 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

const UNIT_TOLERANCE: f64 = 1e-12;

impl Direction {
    /// Normalizes `coords`. Rejects zero, non-finite, or one-dimensional input.
    pub fn new(coords: Vec<f64>) -> Result<Self, BodyError> {
        if coords.len() < 2 {
            return Err(BodyError::InvalidDirection(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(BodyError::InvalidDirection("non-finite coordinate".into()));
        }
        let len = crate::norm(&coords);
        if len == 0.0 {
            return Err(BodyError::InvalidDirection("zero direction vector".into()));
        }
        Ok(Direction(coords.into_iter().map(|c| c / len).collect()))
    }

    /// Accepts `coords` only if it already has unit length.
    pub fn from_unit(coords: Vec<f64>) -> Result<Self, BodyError> {
        if coords.len() < 2 {
            return Err(BodyError::InvalidDirection("dimension must be at least 2".into()));
        }
        let len = crate::norm(&coords);
        if (len - 1.0).abs() > UNIT_TOLERANCE {
            return Err(BodyError::InvalidDirection(format!("|ξ| = {len}, expected 1")));
        }
        Ok(Direction(coords))
    }

    /// (cos θ, sin θ).
    pub fn from_angle(theta: f64) -> Self {
        Direction(vec![theta.cos(), theta.sin()])
    }

    /// Parses a comma-separated list such as `"1,0"` and normalizes it.
    pub fn parse(text: &str) -> Result<Self, BodyError> {
        let coords = text
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .map_err(|e| BodyError::InvalidDirection(format!("{part:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Direction::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        crate::dot(&self.0, x)
    }

    pub fn negated(&self) -> Self {
        Direction(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = BodyError;

    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        Direction::new(coords)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}
