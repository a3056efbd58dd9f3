//! One-dimensional quadrature on `(0, 1)` for integrands with integrable
//! algebraic singularities at the endpoints.
//!
//! Integrands receive a [`Node`] rather than a bare `t`, so that both `t` and
//! `1 - t` (and their logarithms) are available to full relative precision
//! arbitrarily close to either endpoint. No rule in this module ever evaluates
//! an integrand exactly at `t = 0` or `t = 1`.

pub mod gamma;
mod gauss_kronrod;
mod tanh_sinh;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

pub use gauss_kronrod::gauss_kronrod_adaptive;
pub use tanh_sinh::{tanh_sinh, tanh_sinh_scaled};

/// An abscissa in `(0, 1)` carried in several representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    /// `1 - t`, accurate even when `t` rounds to 1.
    pub tc: f64,
    pub ln_t: f64,
    pub ln_tc: f64,
}

impl Node {
    /// Builds a node from `t`, clamped into the open unit interval.
    pub fn from_t(t: f64) -> Self {
        let t = t.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        let tc = 1.0 - t;
        Self {
            t,
            tc,
            ln_t: t.ln(),
            ln_tc: (-t).ln_1p(),
        }
    }

    /// Either `t` or `1 - t` is below the zero threshold.
    pub fn near_limit(&self) -> bool {
        self.t <= crate::poly::ZERO_THRESHOLD || self.tc <= crate::poly::ZERO_THRESHOLD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: C,
    /// Absolute error estimate. When `converged` it does not exceed
    /// `tol * (1 + |value|)`.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Refinement level (tanh-sinh) or number of subdivisions (Gauss-Kronrod).
    pub level_reached: usize,
}

/// Tolerance and refinement budget for the tanh-sinh rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub tol: f64,
    pub max_level: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_level: 12,
        }
    }
}
