//! Roots of `w^n + sum_k x_k w^{n_k} - 1 = 0` from integrals of elementary
//! functions over `[0, 1]`.
//!
//! With `n'_k = n - n_k` and `y_k = x_k t^{n_k/n} (1-t)^{n'_k/n}`, a power
//! `0 < mu <= 1` of the principal root is
//!
//! ```text
//! w^mu = 1 + mu / (2 pi i n) int_0^1 t^{mu/n - 1} (1-t)^{-mu/n - 1}
//!          [ e^{i pi mu/n}  log(1 + sum_k y_k e^{-i pi n'_k/n})
//!          - e^{-i pi mu/n} log(1 + sum_k y_k e^{+i pi n'_k/n}) ] dt
//! ```
//!
//! `mu = 1` is the classical formula. When some `n'_k = 1` the Beta-function
//! step behind it meets `B(a, 0)` and the first-order contribution of that term
//! is lost, so forms with an `n - 1` exponent are evaluated at `mu = 1/2` and
//! squared. The formula fails where either logarithm argument vanishes for some
//! `t` (the sets checked by [`sigma_check`]).
//!
//! Branch `j` of the equation is `e^{2 pi i j/n}` times the principal root of
//! the form with coefficients `x_k e^{2 pi i j n_k / n}`.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quadrature::{tanh_sinh_scaled, Node, QuadSettings, QuadratureResult};
use crate::{Error, MellinForm, Result};

/// In/out verdict threshold on the smallest logarithm-argument modulus.
pub const SIGMA_THRESHOLD: f64 = 1e-9;
/// Results whose logarithm arguments come closer than this to zero are
/// flagged as low confidence.
pub const LOW_CONFIDENCE: f64 = 0.05;
pub const DEFAULT_SIGMA_GRID: usize = 512;

/// Distance of the two logarithm arguments from zero over `t in [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `min_t |1 + sum_k y_k e^{-i pi n'_k/n}|`
    pub min_abs_minus: f64,
    /// `min_t |1 + sum_k y_k e^{+i pi n'_k/n}|`
    pub min_abs_plus: f64,
    pub in_sigma: bool,
    /// Where the smaller of the two minima is attained.
    pub t_at_min: f64,
}

/// `x_k t^{n_k/n} (1-t)^{n'_k/n}`.
pub fn y_k(form: &MellinForm, k: usize, t: f64) -> C {
    y_at(form, k, &Node::from_t(t))
}

fn y_at(form: &MellinForm, k: usize, node: &Node) -> C {
    let term = &form.terms[k];
    let n = form.n as f64;
    let a = term.exponent as f64 / n;
    let b = (form.n - term.exponent) as f64 / n;
    term.coeff * (a * node.ln_t + b * node.ln_tc).exp()
}

/// `(sum_k y_k e^{-i pi n'_k/n}, sum_k y_k e^{+i pi n'_k/n})`, without the 1.
fn log_arguments(form: &MellinForm, rotations: &[(C, C)], node: &Node) -> (C, C) {
    let mut minus = C::new(0.0, 0.0);
    let mut plus = C::new(0.0, 0.0);
    for (k, (rm, rp)) in rotations.iter().enumerate() {
        let y = y_at(form, k, node);
        minus += y * rm;
        plus += y * rp;
    }
    (minus, plus)
}

fn rotations(form: &MellinForm) -> Vec<(C, C)> {
    form.terms
        .iter()
        .map(|t| {
            let angle = PI * (form.n - t.exponent) as f64 / form.n as f64;
            (C::from_polar(1.0, -angle), C::from_polar(1.0, angle))
        })
        .collect()
}

/// Principal `ln(1 + s)`, accurate for small `s`.
fn ln_1p(s: C) -> C {
    if s.norm() < 0.5 {
        C::new(
            0.5 * (2.0 * s.re + s.norm_sqr()).ln_1p(),
            s.im.atan2(1.0 + s.re),
        )
    } else {
        (s + 1.0).ln()
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-16 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Scans `t` on `grid_size` midpoints of `[0, 1]` and optionally refines the
/// deepest local minima of each modulus by golden-section search.
pub fn sigma_check(form: &MellinForm, grid_size: usize, refine: bool) -> ConvergenceReport {
    if form.terms.is_empty() || form.n == 0 {
        return ConvergenceReport {
            min_abs_minus: 1.0,
            min_abs_plus: 1.0,
            in_sigma: false,
            t_at_min: 0.5,
        };
    }
    let grid_size = grid_size.max(2);
    let rot = rotations(form);
    let moduli = |t: f64| {
        let (m, p) = log_arguments(form, &rot, &Node::from_t(t));
        ((m + 1.0).norm(), (p + 1.0).norm())
    };
    let ts: Vec<f64> = (0..grid_size)
        .map(|i| (i as f64 + 0.5) / grid_size as f64)
        .collect();
    let values: Vec<(f64, f64)> = ts.iter().map(|&t| moduli(t)).collect();

    let mut best = [(f64::INFINITY, 0.5); 2];
    for (side, slot) in best.iter_mut().enumerate() {
        let pick = |i: usize| if side == 0 { values[i].0 } else { values[i].1 };
        let mut candidates: Vec<usize> = (0..grid_size)
            .filter(|&i| {
                let v = pick(i);
                (i == 0 || v <= pick(i - 1)) && (i + 1 == grid_size || v <= pick(i + 1))
            })
            .collect();
        candidates.sort_by(|&a, &b| pick(a).total_cmp(&pick(b)));
        for &i in candidates.iter().take(if refine { 3 } else { 1 }) {
            let (mut t, mut v) = (ts[i], pick(i));
            if refine {
                let lo = if i == 0 { 0.0 } else { ts[i - 1] };
                let hi = if i + 1 == grid_size { 1.0 } else { ts[i + 1] };
                let f = |t: f64| {
                    let m = moduli(t);
                    if side == 0 {
                        m.0
                    } else {
                        m.1
                    }
                };
                let (tr, vr) = golden_min(f, lo, hi);
                if vr < v {
                    t = tr;
                    v = vr;
                }
            }
            if v < slot.0 {
                *slot = (v, t);
            }
        }
    }
    let [(min_abs_minus, t_minus), (min_abs_plus, t_plus)] = best;
    ConvergenceReport {
        min_abs_minus,
        min_abs_plus,
        in_sigma: min_abs_minus.min(min_abs_plus) <= SIGMA_THRESHOLD,
        t_at_min: if min_abs_minus <= min_abs_plus {
            t_minus
        } else {
            t_plus
        },
    }
}

fn require_outside_sigma(form: &MellinForm) -> Result<ConvergenceReport> {
    let report = sigma_check(form, DEFAULT_SIGMA_GRID, true);
    if report.in_sigma {
        return Err(Error::InSigma {
            min_abs: report.min_abs_minus.min(report.min_abs_plus),
            t: report.t_at_min,
        });
    }
    Ok(report)
}

struct PowerIntegral {
    /// `w^mu`
    value: C,
    quadrature: QuadratureResult,
    /// Smallest logarithm-argument modulus met at a quadrature node.
    min_log_argument: f64,
}

/// Evaluates the `mu`-power formula without any domain check.
fn power_integral(form: &MellinForm, mu: f64, quad: &QuadSettings) -> Result<PowerIntegral> {
    let n = form.n as f64;
    let rot = rotations(form);
    let a = mu / n;
    let (em, ep) = (C::from_polar(1.0, PI * a), C::from_polar(1.0, -PI * a));
    let closest = Cell::new(f64::INFINITY);
    // t (1-t) times the integrand: t^{mu/n} (1-t)^{-mu/n} [ ... ].
    let integrand = |node: &Node| {
        let (sm, sp) = log_arguments(form, &rot, node);
        closest.set(closest.get().min((sm + 1.0).norm()).min((sp + 1.0).norm()));
        let bracket = em * ln_1p(sm) - ep * ln_1p(sp);
        if bracket.norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        bracket * (a * (node.ln_t - node.ln_tc)).exp()
    };
    let q = tanh_sinh_scaled(integrand, quad.tol, quad.max_level)?;
    let value = C::new(1.0, 0.0) + q.value * mu / (C::new(0.0, 2.0 * PI) * n);
    Ok(PowerIntegral {
        value,
        quadrature: q,
        min_log_argument: closest.get(),
    })
}

/// Principal root by the `mu = 1` formula.
///
/// The pure trinomial `w^n + x w^{n-1} - 1` is rejected with
/// [`Error::TrinomialShape`]; use [`trinomial_principal_root`] for it.
pub fn principal_root_integral(
    form: &MellinForm,
    quad: &QuadSettings,
) -> Result<(C, QuadratureResult)> {
    if form.is_trinomial() {
        return Err(Error::TrinomialShape);
    }
    require_outside_sigma(form)?;
    let r = power_integral(form, 1.0, quad)?;
    Ok((r.value, r.quadrature))
}

/// `w^mu` of the principal root for `0 < mu <= 1`.
pub fn principal_power_integral(
    form: &MellinForm,
    mu: f64,
    quad: &QuadSettings,
) -> Result<(C, QuadratureResult)> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mu must lie in (0, 1], got {mu}"
        )));
    }
    require_outside_sigma(form)?;
    let r = power_integral(form, mu, quad)?;
    Ok((r.value, r.quadrature))
}

/// Principal root of `z^n + x z^{n-1} - 1 = 0` through the square of the
/// half-power integral.
pub fn trinomial_principal_root(
    n: usize,
    x: C,
    quad: &QuadSettings,
) -> Result<(C, QuadratureResult)> {
    let form = MellinForm::trinomial(n, x)?;
    require_outside_sigma(&form)?;
    let r = power_integral(&form, 0.5, quad)?;
    Ok((r.value * r.value, r.quadrature))
}

/// `{1 + 1/(8 pi i) int_0^1 t^{-3/4} (1-t)^{-5/4} [e^{i pi/4} log(1 - i x s) - e^{-i pi/4} log(1 + i x s)] dt}^2`
/// with `s = sqrt(t (1 - t))`, written out for `n = 2`.
fn quadratic_integral(x: C, quad: &QuadSettings) -> Result<C> {
    let e = C::from_polar(1.0, PI / 4.0);
    let ix = C::new(0.0, 1.0) * x;
    let integrand = |node: &Node| {
        let s = (0.5 * (node.ln_t + node.ln_tc)).exp();
        let bracket = e * ln_1p(-ix * s) - e.conj() * ln_1p(ix * s);
        bracket * (0.25 * (node.ln_t - node.ln_tc)).exp()
    };
    let q = tanh_sinh_scaled(integrand, quad.tol, quad.max_level)?;
    let root = C::new(1.0, 0.0) + q.value / C::new(0.0, 8.0 * PI);
    Ok(root * root)
}

/// Both roots of `z^2 + x z - 1 = 0`: `z_1(x)` and `z_2(x) = -z_1(-x)`.
pub fn quadratic_roots_integral(x: C, quad: &QuadSettings) -> Result<[C; 2]> {
    require_outside_sigma(&MellinForm::trinomial(2, x)?)?;
    Ok([quadratic_integral(x, quad)?, -quadratic_integral(-x, quad)?])
}

/// Which formula evaluates forms with an `n - 1` exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispatch {
    /// Half power only for the pure trinomial; every other form uses `mu = 1`.
    Strict,
    /// Half power for every form containing an `n - 1` exponent.
    #[default]
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// No terms: the principal root is exactly 1.
    Binomial,
    /// `mu = 1`.
    Mikhalkin,
    /// `mu = 1/2` on `w^n + x w^{n-1} - 1`.
    Trinomial,
    /// `mu = 1/2` on a form with several terms, one of exponent `n - 1`.
    HalfPower,
}

impl Formula {
    pub fn select(form: &MellinForm, dispatch: Dispatch) -> Self {
        if form.terms.is_empty() {
            Formula::Binomial
        } else if form.is_trinomial() {
            Formula::Trinomial
        } else if dispatch == Dispatch::Extended && form.has_subleading_term() {
            Formula::HalfPower
        } else {
            Formula::Mikhalkin
        }
    }

    pub fn mu(self) -> f64 {
        match self {
            Formula::Binomial | Formula::Mikhalkin => 1.0,
            Formula::Trinomial | Formula::HalfPower => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSettings {
    pub quad: QuadSettings,
    pub sigma_grid: usize,
    pub dispatch: Dispatch,
    /// Evaluate the integral even for branches inside the divergence set.
    pub evaluate_in_sigma: bool,
    pub parallel: bool,
}

impl Default for BranchSettings {
    fn default() -> Self {
        Self {
            quad: QuadSettings::default(),
            sigma_grid: DEFAULT_SIGMA_GRID,
            dispatch: Dispatch::default(),
            evaluate_in_sigma: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchResult {
    pub branch_index: usize,
    /// `x_k e^{2 pi i j n_k / n}` in the order of the form's terms.
    pub rotated_coefficients: Vec<C>,
    pub formula: Formula,
    /// Principal root of the rotated form.
    pub principal_value: Option<C>,
    /// `e^{2 pi i j / n}` times `principal_value`.
    pub root: Option<C>,
    pub report: ConvergenceReport,
    pub quadrature: Option<QuadratureResult>,
    /// A logarithm argument came within [`LOW_CONFIDENCE`] of zero.
    pub low_confidence: bool,
    /// Quadrature failure, if any.
    pub error: Option<String>,
}

impl BranchResult {
    /// Root present and quadrature converged.
    pub fn converged(&self) -> bool {
        self.root.is_some() && self.quadrature.is_some_and(|q| q.converged)
    }
}

/// Computes branch `j` of the form.
pub fn branch(form: &MellinForm, j: usize, settings: &BranchSettings) -> BranchResult {
    let rotated = form.rotated(j);
    let report = sigma_check(&rotated, settings.sigma_grid, true);
    let formula = Formula::select(&rotated, settings.dispatch);
    let mut out = BranchResult {
        branch_index: j,
        rotated_coefficients: rotated.terms.iter().map(|t| t.coeff).collect(),
        formula,
        principal_value: None,
        root: None,
        report,
        quadrature: None,
        low_confidence: report.min_abs_minus.min(report.min_abs_plus) < LOW_CONFIDENCE,
        error: None,
    };
    if report.in_sigma && !settings.evaluate_in_sigma {
        return out;
    }
    match power_integral(&rotated, formula.mu(), &settings.quad) {
        Ok(r) => {
            let principal = if formula.mu() == 0.5 {
                r.value * r.value
            } else {
                r.value
            };
            out.principal_value = Some(principal);
            out.root = Some(form.unit_root(j) * principal);
            out.quadrature = Some(r.quadrature);
            out.low_confidence |= r.min_log_argument < LOW_CONFIDENCE;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// All `n` branches, ordered by branch index.
pub fn all_branches(form: &MellinForm, settings: &BranchSettings) -> Vec<BranchResult> {
    if settings.parallel {
        (0..form.n)
            .into_par_iter()
            .map(|j| branch(form, j, settings))
            .collect()
    } else {
        (0..form.n).map(|j| branch(form, j, settings)).collect()
    }
}

/// Branches for a subset of indices, e.g. a subsample of a very high degree.
pub fn selected_branches(
    form: &MellinForm,
    indices: &[usize],
    settings: &BranchSettings,
) -> Vec<BranchResult> {
    if settings.parallel {
        indices
            .par_iter()
            .map(|&j| branch(form, j, settings))
            .collect()
    } else {
        indices.iter().map(|&j| branch(form, j, settings)).collect()
    }
}
