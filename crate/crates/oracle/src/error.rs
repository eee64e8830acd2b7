use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("need at least {min} Monte Carlo samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },

    #[error("quadrature did not converge (achieved error estimate {achieved:e})")]
    NoConvergence { achieved: f64 },

    #[error("rank deficient fit: {0}")]
    RankDeficient(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
