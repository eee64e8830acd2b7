//! Convex bodies for section-volume experiments.
//!
//! A [`BodySpec`] is the raw parametric description (and the on-disk JSON
//! schema); a [`Body`] is a validated spec with the precomputed data needed
//! to evaluate membership, the signed boundary excess, and the Minkowski
//! gauge. Everything here is a pure function of immutable data.

mod body;
mod direction;
mod error;
mod spec;

pub use body::{Body, Ellipsoid, PerturbedEllipse, Polygon, Shape, Superellipsoid};
pub use direction::Direction;
pub use error::BodyError;
pub use spec::{BodyFile, BodySpec, SCHEMA_VERSION};

/// Euclidean inner product of two equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
