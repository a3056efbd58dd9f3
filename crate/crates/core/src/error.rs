use thiserror::Error;

/// Errors produced by the root-finding pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is constant; it has no roots")]
    ConstantPolynomial,

    #[error("leading coefficient is zero")]
    LeadingZero,

    #[error("integrand is not finite at t = {t:e}")]
    IntegrandNaN { t: f64 },

    #[error(
        "coefficients lie in the divergence set (min |log argument| = {min_abs:e} at t = {t:.6})"
    )]
    InSigma { min_abs: f64, t: f64 },

    #[error("form z^n + x z^(n-1) - 1 must use the half-power trinomial formula")]
    TrinomialShape,

    #[error("root iteration did not converge for indices {indices:?}")]
    NoConvergence { indices: Vec<usize> },

    #[error("root sets have different sizes ({left} vs {right})")]
    CardinalityMismatch { left: usize, right: usize },

    #[error("parse error at position {position}: {message}")]
    ParseError { position: usize, message: String },

    #[error("closed-form solver supports degrees 1 to 4, got {0}")]
    UnsupportedDegree(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
