//! Double-exponential (tanh-sinh) rule on `(0, 1)`.
//!
//! Uses `t = (1 + tanh(pi/2 sinh u)) / 2` and the trapezoidal rule in `u`,
//! halving the step each level and reusing all previous nodes. The result is
//! the level with the smallest difference from its predecessor, so raising
//! the level budget never increases the reported error estimate.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;

use super::{Node, QuadratureResult};
use crate::{Error, Result};

/// Hard limit on `|u|`; `ln(1 - t)` is about `-2.5e5` there.
const U_MAX: f64 = 12.0;
/// Nodes closer to the centre than this are never treated as a negligible tail.
const U_MIN_TAIL: f64 = 3.0;
/// A tail term is negligible below this fraction of the running `sum |w f|`.
const TAIL_RATIO: f64 = 1e-18;
/// Convergence is not declared before this level.
const MIN_LEVEL: usize = 3;

/// `int_0^1 f(t) dt` where `f` receives the node and returns `f(t)`.
///
/// Non-finite values at nodes where `t` or `1 - t` has dropped below the zero
/// threshold end the sweep on that side; anywhere else they are an error.
pub fn tanh_sinh<F>(f: F, tol: f64, max_level: usize) -> Result<QuadratureResult>
where
    F: FnMut(&Node) -> C,
{
    integrate(f, false, tol, max_level)
}

/// `int_0^1 f(t) dt` where `g` receives the node and returns `t (1 - t) f(t)`.
///
/// Integrands with strong endpoint singularities can fold the factor into
/// their own log-space arithmetic, so nothing overflows even when `t` is far
/// below the smallest positive double.
pub fn tanh_sinh_scaled<G>(g: G, tol: f64, max_level: usize) -> Result<QuadratureResult>
where
    G: FnMut(&Node) -> C,
{
    integrate(g, true, tol, max_level)
}

/// A mirrored pair of nodes at `+u` (towards `t = 1`) and `-u` (towards `t = 0`).
struct NodePair {
    upper: Node,
    lower: Node,
    /// `dt/du` for the plain rule, `dt/du / (t (1 - t))` for the scaled one.
    weight: f64,
}

fn node_pair(u: f64, scaled: bool) -> NodePair {
    let s = FRAC_PI_2 * u.sinh();
    let e = (-2.0 * s).exp();
    let l1p = e.ln_1p();
    let small = e / (1.0 + e);
    let big = 1.0 / (1.0 + e);
    let ln_small = -2.0 * s - l1p;
    let ln_big = -l1p;
    let upper = Node {
        t: big,
        tc: small,
        ln_t: ln_big,
        ln_tc: ln_small,
    };
    let lower = Node {
        t: small,
        tc: big,
        ln_t: ln_small,
        ln_tc: ln_big,
    };
    let jac = PI * u.cosh();
    let weight = if scaled { jac } else { jac * small * big };
    NodePair {
        upper,
        lower,
        weight,
    }
}

enum Sample {
    Value(C),
    /// Non-finite at the representability limit; stop this side.
    Truncate,
}

fn sample<F: FnMut(&Node) -> C>(f: &mut F, node: &Node, weight: f64) -> Result<Sample> {
    let v = f(node);
    if v.re.is_finite() && v.im.is_finite() {
        return Ok(Sample::Value(v * weight));
    }
    if node.near_limit() || weight == 0.0 {
        Ok(Sample::Truncate)
    } else {
        Err(Error::IntegrandNaN {
            t: if node.t > 0.5 { 1.0 - node.tc } else { node.t },
        })
    }
}

struct Sweep {
    sum: C,
    abs_sum: f64,
    evaluations: usize,
}

/// Adds nodes `u = start + k * stride` for k = 0, 1, ... on both sides until
/// each side's tail is negligible or truncated.
fn sweep<F: FnMut(&Node) -> C>(
    f: &mut F,
    scaled: bool,
    start: f64,
    stride: f64,
    abs_scale: f64,
) -> Result<Sweep> {
    let mut out = Sweep {
        sum: C::new(0.0, 0.0),
        abs_sum: 0.0,
        evaluations: 0,
    };
    // [upper side, lower side]
    let mut live = [true, true];
    let mut quiet = [0u8; 2];
    let mut k = 0usize;
    while live[0] || live[1] {
        let u = start + k as f64 * stride;
        k += 1;
        if u > U_MAX {
            break;
        }
        let pair = node_pair(u, scaled);
        for (side, node) in [pair.upper, pair.lower].iter().enumerate() {
            if !live[side] {
                continue;
            }
            out.evaluations += 1;
            match sample(f, node, pair.weight)? {
                Sample::Truncate => live[side] = false,
                Sample::Value(v) => {
                    out.sum += v;
                    let a = v.norm();
                    out.abs_sum += a;
                    let scale = abs_scale.max(out.abs_sum);
                    if u >= U_MIN_TAIL && a <= TAIL_RATIO * scale {
                        quiet[side] += 1;
                        if quiet[side] >= 2 {
                            live[side] = false;
                        }
                    } else {
                        quiet[side] = 0;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn integrate<F>(mut f: F, scaled: bool, tol: f64, max_level: usize) -> Result<QuadratureResult>
where
    F: FnMut(&Node) -> C,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_level < MIN_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "max_level must be at least {MIN_LEVEL}, got {max_level}"
        )));
    }

    // Level 0: u = 0 and the integers on both sides.
    let centre = node_pair(0.0, scaled);
    let mut evaluations = 1;
    let mut sum = match sample(&mut f, &centre.upper, centre.weight)? {
        Sample::Value(v) => v,
        Sample::Truncate => C::new(0.0, 0.0),
    };
    let mut abs_sum = sum.norm();
    let s = sweep(&mut f, scaled, 1.0, 1.0, abs_sum)?;
    sum += s.sum;
    abs_sum += s.abs_sum;
    evaluations += s.evaluations;

    let mut h = 1.0;
    let mut estimate = sum * h;
    let mut best = (estimate, f64::INFINITY);
    let mut level = 0;
    let mut converged = false;

    while level < max_level {
        level += 1;
        h *= 0.5;
        // Odd multiples of the new step; scale tails against the current estimate.
        let s = sweep(&mut f, scaled, h, 2.0 * h, abs_sum)?;
        sum += s.sum;
        abs_sum += s.abs_sum;
        evaluations += s.evaluations;
        let next = sum * h;
        let error = (next - estimate).norm();
        estimate = next;
        if error <= best.1 {
            best = (estimate, error);
        }
        if level >= MIN_LEVEL && error <= tol * (1.0 + estimate.norm()) {
            converged = true;
            break;
        }
    }

    Ok(QuadratureResult {
        value: best.0,
        error_estimate: best.1,
        evaluations,
        converged,
        level_reached: level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gamma::beta;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn constant_integrand() {
        let r = tanh_sinh(|_| c(1.0), 1e-12, 12).unwrap();
        assert!(r.converged);
        assert!((r.value - c(1.0)).norm() < 1e-14);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn near_critical_endpoint_singularity() {
        let r = tanh_sinh(|n| c(n.t.powf(-0.9796)), 1e-10, 12).unwrap();
        let reference = 49.019588870393704;
        assert!(
            ((r.value.re - reference) / reference).abs() < 1e-6,
            "{}",
            r.value
        );
    }

    #[test]
    fn beta_quarter_three_quarters() {
        let r = tanh_sinh_scaled(|n| c((0.25 * n.ln_t + 0.75 * n.ln_tc).exp()), 1e-12, 12).unwrap();
        let exact = PI / (PI / 4.0).sin();
        assert!((exact - 4.442882938158366).abs() < 1e-14);
        assert!(((r.value.re - exact) / exact).abs() < 1e-8);
        // Plain form of the same integrand.
        let r = tanh_sinh(|n| c(n.t.powf(-0.75) * n.tc.powf(-0.25)), 1e-12, 12).unwrap();
        assert!(((r.value.re - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn extreme_endpoint_exponent_uses_log_space() {
        // int t^{a-1} (1-t)^{b-1} with b = 1/2000: the tail lives far below 1e-308.
        let (a, b) = (0.7, 1.0 / 2000.0);
        let r = tanh_sinh_scaled(|n| c((a * n.ln_t + b * n.ln_tc).exp()), 1e-12, 12).unwrap();
        let exact = beta(c(a), c(b)).re;
        assert!(
            ((r.value.re - exact) / exact).abs() < 1e-9,
            "{} vs {exact}",
            r.value
        );
    }

    #[test]
    fn interior_nan_is_an_error() {
        let err = tanh_sinh(
            |n| {
                if (n.t - 0.5).abs() < 1e-12 {
                    c(f64::NAN)
                } else {
                    c(1.0)
                }
            },
            1e-10,
            6,
        )
        .unwrap_err();
        assert_eq!(err, Error::IntegrandNaN { t: 0.5 });
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(tanh_sinh(|_| c(1.0), 0.0, 12).is_err());
        assert!(tanh_sinh(|_| c(1.0), 1e-10, 2).is_err());
    }

    #[test]
    fn never_touches_the_endpoints() {
        let r = tanh_sinh(
            |n| {
                // t may round to 1.0; the complement carries the distance.
                assert!(n.t > 0.0 && n.tc > 0.0);
                c(n.t.ln() * n.tc.ln())
            },
            1e-12,
            12,
        )
        .unwrap();
        // int_0^1 ln t ln(1-t) dt = 2 - pi^2/6
        assert!((r.value.re - (2.0 - PI * PI / 6.0)).abs() < 1e-11);
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let r = tanh_sinh(|n| c((200.0 * n.t).sin()), 1e-14, 3).unwrap();
        assert!(!r.converged);
        assert_eq!(r.level_reached, 3);
    }
}
