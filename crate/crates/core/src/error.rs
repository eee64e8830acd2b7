use hilbert_bodies_body::BodyError;
use hilbert_bodies_oracle::OracleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Body(#[from] BodyError),

    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("t = {t} is outside the open interval ({a}, {b}); use hilbert_outside")]
    OutsideInterval { a: f64, b: f64, t: f64 },

    #[error("t = {t} is not strictly outside [{a}, {b}]")]
    NotOutside { a: f64, b: f64, t: f64 },

    #[error("inversion undefined at endpoints (t = {t} within {margin:e} of [{a}, {b}])")]
    AtEndpoint { a: f64, b: f64, t: f64, margin: f64 },

    #[error("degenerate interval [{a}, {b}]")]
    DegenerateInterval { a: f64, b: f64 },

    #[error("quadrature did not converge (achieved error estimate {achieved:e})")]
    NoConvergence { achieved: f64 },

    #[error("integral diverges: integrand does not decay at infinity")]
    Divergent,

    #[error("k = {0} exceeds the supported maximum of 30")]
    DegreeTooLarge(usize),

    #[error("section volume vanishes throughout the endpoint window near {side}")]
    Underflow { side: &'static str },

    #[error("noise floor above tolerance; raise samples (relative stderr {relative_stderr:e}, tolerance {tolerance:e})")]
    NoiseFloor { relative_stderr: f64, tolerance: f64 },
}

impl Error {
    pub fn is_noise_floor(&self) -> bool {
        matches!(self, Error::NoiseFloor { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
