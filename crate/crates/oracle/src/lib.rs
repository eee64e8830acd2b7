//! Independent reference computations.
//!
//! Nothing in this crate touches closed-form section volumes or the spectral
//! Hilbert engine of the main crate. Section volumes come from rejection
//! sampling against [`Body::contains`](hilbert_bodies_body::Body::contains),
//! principal values from tanh-sinh quadrature, and polynomial fits from
//! discrete orthogonal polynomials built directly on the data nodes.

mod error;
mod fit;
mod mc;
mod pv;
mod sphere;

pub use error::OracleError;
pub use fit::{dense_poly_fit, PolyFitReport};
pub use mc::{mc_section_volume, McEstimate, SliceSampler, MIN_SAMPLES};
pub use pv::{adaptive_pv, tanh_sinh};
pub use sphere::{chord_length, radial_extent, support_by_ascent};
