//! Multi-index hypergeometric series for a power of the principal root.
//!
//! For `w^n + sum_j x_j w^{n_j} - 1 = 0` and `mu > 0`,
//!
//! ```text
//! w^mu = (mu/n) sum_k (-1)^|k| Gamma(mu/n + sum_j n_j k_j / n) prod_j x_j^{k_j}
//!        / ( prod_j k_j!  Gamma(mu/n - sum_j n'_j k_j / n + 1) ),    n'_j = n - n_j
//! ```
//!
//! summed over all multi-indices `k >= 0`. It converges only for small
//! coefficients and serves as an independent check on the integral formulas.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::quadrature::gamma::{ln_gamma_real, nonpositive_integer};
use crate::MellinForm;

/// A diagonal counts as small below this fraction of `1 + |partial sum|`.
const STOP_RATIO: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: C,
    /// Number of multi-indices summed.
    pub terms_used: usize,
    /// Largest term magnitude on the last diagonal summed.
    pub last_term_magnitude: f64,
    pub converged: bool,
}

/// One term of the series for the multi-index `k`.
pub fn series_term(form: &MellinForm, mu: f64, k: &[usize], ln_factorials: &[f64]) -> C {
    let n = form.n as f64;
    let mut upper = mu / n;
    let mut lower = mu / n + 1.0;
    let mut order = 0usize;
    let mut ln_mag = 0.0;
    let mut phase = C::new(1.0, 0.0);
    for (term, &kj) in form.terms.iter().zip(k) {
        upper += term.exponent as f64 * kj as f64 / n;
        lower -= (form.n - term.exponent) as f64 * kj as f64 / n;
        order += kj;
        ln_mag -= ln_factorials[kj];
        if kj > 0 {
            ln_mag += kj as f64 * term.coeff.norm().ln();
            phase *= C::from_polar(1.0, kj as f64 * term.coeff.arg());
        }
    }
    // 1/Gamma vanishes at non-positive integers.
    if nonpositive_integer(lower).is_some() {
        return C::new(0.0, 0.0);
    }
    let (lg_up, s_up) = ln_gamma_real(upper);
    let (lg_lo, s_lo) = ln_gamma_real(lower);
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 } * s_up * s_lo;
    phase * (sign * mu / n * (ln_mag + lg_up - lg_lo).exp())
}

/// Calls `visit` with every `k` of length `p` and total order `m`.
fn for_each_composition(p: usize, m: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(k: &mut Vec<usize>, idx: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
        if idx + 1 == k.len() {
            k[idx] = left;
            visit(k);
            return;
        }
        for v in (0..=left).rev() {
            k[idx] = v;
            rec(k, idx + 1, left - v, visit);
        }
    }
    let mut k = vec![0; p];
    rec(&mut k, 0, m, visit);
}

/// Sums the series for `w^mu` diagonal by diagonal (`|k| = 0, 1, ...`) up to
/// `max_total_order`, stopping early once two consecutive diagonals are
/// negligible.
pub fn series_principal_power(form: &MellinForm, mu: f64, max_total_order: usize) -> SeriesResult {
    let p = form.terms.len();
    if p == 0 || form.n == 0 {
        return SeriesResult {
            value: C::new(1.0, 0.0),
            terms_used: 1,
            last_term_magnitude: 0.0,
            converged: true,
        };
    }
    let mut ln_factorials = vec![0.0; max_total_order + 1];
    for i in 1..=max_total_order {
        ln_factorials[i] = ln_factorials[i - 1] + (i as f64).ln();
    }

    let mut sum = C::new(0.0, 0.0);
    let mut terms_used = 0;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    for m in 0..=max_total_order {
        let mut diag = C::new(0.0, 0.0);
        let mut biggest = 0.0f64;
        for_each_composition(p, m, &mut |k| {
            let t = series_term(form, mu, k, &ln_factorials);
            biggest = biggest.max(t.norm());
            diag += t;
            terms_used += 1;
        });
        sum += diag;
        last = biggest;
        if biggest <= STOP_RATIO * (1.0 + sum.norm()) {
            quiet += 1;
            if quiet >= 2 {
                return SeriesResult {
                    value: sum,
                    terms_used,
                    last_term_magnitude: last,
                    converged: true,
                };
            }
        } else {
            quiet = 0;
        }
    }
    SeriesResult {
        value: sum,
        terms_used,
        last_term_magnitude: last,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::solve_quadratic;
    use crate::oracle::oracle_roots;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    /// Principal root of z^2 + x z - 1, the one continuously connected to z(0) = 1.
    fn principal_quadratic(x: C) -> C {
        let [a, b] = solve_quadratic(x, c(-1.0, 0.0));
        if (a - 1.0).norm() < (b - 1.0).norm() {
            a
        } else {
            b
        }
    }

    #[test]
    fn binomial_is_one() {
        let f = MellinForm::new(5, []).unwrap();
        for mu in [0.5, 1.0, 3.0] {
            let r = series_principal_power(&f, mu, 10);
            assert_eq!(r.value, c(1.0, 0.0));
            assert!(r.converged);
        }
    }

    #[test]
    fn quadratic_principal_root() {
        let f = MellinForm::trinomial(2, c(0.1, 0.0)).unwrap();
        let r = series_principal_power(&f, 1.0, 40);
        let exact = (-0.1 + 4.01f64.sqrt()) / 2.0;
        assert!((exact - 0.951249219725).abs() < 1e-11);
        assert!((r.value - c(exact, 0.0)).norm() < 1e-10, "{}", r.value);
        assert!((r.value - principal_quadratic(c(0.1, 0.0))).norm() < 1e-10);

        let half = series_principal_power(&f, 0.5, 40);
        assert!((half.value - c(exact.sqrt(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn trinomial_linear_term() {
        // For z^n + x z^{n-1} - 1 the k = 1 term at mu = 1 is -x/n: the
        // lower Gamma argument is 1/n - 1/n + 1 = 1, not a pole.
        for n in 2..8 {
            let x = c(0.03, -0.02);
            let f = MellinForm::trinomial(n, x).unwrap();
            let lf = [0.0, 0.0];
            let t = series_term(&f, 1.0, &[1], &lf);
            assert!((t + x / n as f64).norm() < 1e-15, "n={n}: {t}");
        }
    }

    #[test]
    fn reciprocal_gamma_zeros_give_exact_zero_terms() {
        // n = 2, n' = 1, mu = 1: lower argument 1/2 - k/2 + 1 is a pole for odd k >= 3.
        let f = MellinForm::trinomial(2, c(0.1, 0.0)).unwrap();
        let lf: Vec<f64> = (0..10)
            .map(|i| (1..=i).map(|j| (j as f64).ln()).sum())
            .collect();
        for k in [3usize, 5, 7] {
            assert_eq!(series_term(&f, 1.0, &[k], &lf), c(0.0, 0.0));
        }
        assert_ne!(series_term(&f, 1.0, &[4], &lf), c(0.0, 0.0));
    }

    #[test]
    fn divergent_series_is_flagged() {
        let f = MellinForm::trinomial(3, c(5.0, 0.0)).unwrap();
        let r = series_principal_power(&f, 1.0, 30);
        assert!(!r.converged);
    }

    fn small_coeff() -> impl Strategy<Value = C> {
        (0.0..0.1f64, -std::f64::consts::PI..std::f64::consts::PI)
            .prop_map(|(r, a)| C::from_polar(r, a))
    }

    fn small_form() -> impl Strategy<Value = MellinForm> {
        (3usize..9)
            .prop_flat_map(|n| (Just(n), prop::collection::vec((1..n, small_coeff()), 1..4)))
            .prop_map(|(n, terms)| MellinForm::new(n, terms).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn satisfies_defining_equation(form in small_form()) {
            let r = series_principal_power(&form, 1.0, 60);
            prop_assert!(r.converged);
            let poly = form.to_poly();
            prop_assert!(poly.residual_of(r.value) <= 1e-8);
            // and it is the root nearest 1
            let roots = oracle_roots(&poly, 1e-12).unwrap().values();
            let nearest = roots.iter().min_by(|a, b| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm())).unwrap();
            prop_assert!((nearest - r.value).norm() < 1e-8);
        }

        #[test]
        fn power_consistency(form in small_form()) {
            let one = series_principal_power(&form, 1.0, 60);
            let two = series_principal_power(&form, 2.0, 60);
            prop_assert!(one.converged && two.converged);
            prop_assert!((one.value * one.value - two.value).norm() <= 1e-8);
        }
    }
}
