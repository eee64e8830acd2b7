//! Hyperplane section volumes of convex bodies and the finite Hilbert
//! transform tests that single out ellipsoids.
//!
//! [`geometry`] produces A_K(ξ, t) (closed form for ellipsoids, chords in the
//! plane, Monte Carlo otherwise), [`hilbert`] transforms sqrt-weighted
//! Chebyshev series, and [`classify`] fits the three polynomiality
//! conditions and aggregates a verdict over many directions.

pub mod classify;
pub mod config;
pub mod directions;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod identities;
pub mod quad;

pub use hilbert_bodies_body::{Body, BodyError, BodySpec, Direction};
pub use config::{OutputFormat, RunConfig};
pub use error::{Error, Result};
