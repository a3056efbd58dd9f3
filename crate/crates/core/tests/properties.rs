use std::f64::consts::PI;

use proptest::prelude::*;
use semiroots::mikhalkin::{
    principal_power_integral, principal_root_integral, quadratic_roots_integral, sigma_check,
    trinomial_principal_root, BranchSettings,
};
use semiroots::oracle::{match_values, newton_polish, oracle_roots};
use semiroots::quadrature::{tanh_sinh, QuadSettings};
use semiroots::series::series_principal_power;
use semiroots::{mikhalkin, Complex64 as C, ComplexPoly, MellinForm};

fn disk(radius: f64) -> impl Strategy<Value = C> {
    (0.0..=1.0f64, -PI..PI).prop_map(move |(r, a)| C::from_polar(radius * r.sqrt(), a))
}

fn poly(max_degree: usize) -> impl Strategy<Value = ComplexPoly> {
    (1..=max_degree)
        .prop_flat_map(|n| prop::collection::vec(disk(10.0), n + 1))
        .prop_filter("nonzero ends", |cs| {
            cs[0].norm() > 1e-3 && cs[cs.len() - 1].norm() > 1e-3
        })
        .prop_map(|cs| ComplexPoly::new(cs).unwrap())
}

/// Forms with 1 to 3 terms, coefficients in a disk of the given radius.
fn form(radius: f64, subleading: bool) -> impl Strategy<Value = MellinForm> {
    (3usize..10)
        .prop_flat_map(move |n| (Just(n), prop::collection::vec((1..n, disk(radius)), 1..4)))
        .prop_map(|(n, terms)| MellinForm::new(n, terms).unwrap())
        .prop_filter("shape", move |f| {
            !f.terms.is_empty() && f.has_subleading_term() == subleading
        })
}

fn quad() -> QuadSettings {
    QuadSettings::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vieta_identities(p in poly(12)) {
        let roots = oracle_roots(&p, 1e-10).unwrap();
        prop_assert!(roots.max_residual() <= 1e-8);
        let a = p.coeffs();
        let n = p.degree();
        let sum: C = roots.values().iter().sum();
        let prod: C = roots.values().iter().product();
        let s = a[1] / a[0];
        let q = a[n] / a[0] * if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((sum + s).norm() <= 1e-6 * (1.0 + s.norm()));
        prop_assert!((prod - q).norm() <= 1e-6 * (1.0 + q.norm()));
    }

    #[test]
    fn normalization_round_trip(p in poly(10)) {
        let form = p.normalize_to_mellin_form().unwrap();
        let w = oracle_roots(&form.to_poly(), 1e-12).unwrap().values();
        let z = form.denormalize_roots(&w);
        let rebuilt = ComplexPoly::from_roots(&z);
        let monic = p.monic();
        for (a, b) in rebuilt.coeffs().iter().zip(monic.coeffs()) {
            let scale = monic.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
            prop_assert!((a - b).norm() <= 1e-8 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn residual_is_scale_invariant(p in poly(8), z in disk(5.0), c in disk(100.0)) {
        prop_assume!(c.norm() > 1e-6);
        let scaled = p.scaled(c).unwrap();
        let (r0, r1) = (p.residual_of(z), scaled.residual_of(z));
        prop_assert!((r0 - r1).abs() <= 1e-13 * r0.max(1e-300) + 1e-300, "{r0} vs {r1}");
    }

    #[test]
    fn derivative_matches_central_difference(p in poly(8), z in disk(10.0)) {
        let dp = p.derivative().unwrap();
        let h = 1e-6 * (1.0 + z.norm());
        let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        let exact = dp.eval(z);
        prop_assert!((fd - exact).norm() <= 1e-5 * exact.norm().max(1.0));
    }

    #[test]
    fn newton_never_increases_a_converged_residual(p in poly(10), z0 in disk(10.0)) {
        let out = newton_polish(&p, z0, 1e-14, 60);
        if out.converged {
            prop_assert!(p.residual_of(out.root) <= p.residual_of(z0));
        }
    }

    #[test]
    fn tanh_sinh_is_linear(x in 0.1..3.0f64, y in 0.1..3.0f64, a in disk(3.0), b in disk(3.0)) {
        let tol = 1e-11;
        let f = |n: &semiroots::quadrature::Node| C::new(((x - 1.0) * n.ln_t).exp(), 0.0);
        let g = |n: &semiroots::quadrature::Node| C::new(((y - 1.0) * n.ln_tc).exp(), n.t);
        let both = tanh_sinh(|n| a * f(n) + b * g(n), tol, 12).unwrap();
        let (rf, rg) = (tanh_sinh(f, tol, 12).unwrap(), tanh_sinh(g, tol, 12).unwrap());
        prop_assume!(both.converged && rf.converged && rg.converged);
        prop_assert!((both.value - (a * rf.value + b * rg.value)).norm() <= 10.0 * tol * (1.0 + both.value.norm()));
    }

    #[test]
    fn refinement_is_monotone_for_beta(x in 0.05..3.0f64, y in 0.05..3.0f64) {
        let f = |n: &semiroots::quadrature::Node| C::new(((x - 1.0) * n.ln_t + (y - 1.0) * n.ln_tc).exp(), 0.0);
        let mut previous = f64::INFINITY;
        for level in 3..=10 {
            let r = tanh_sinh(f, 1e-300, level).unwrap();
            prop_assert!(r.error_estimate <= previous, "level {level}: {} > {previous}", r.error_estimate);
            previous = r.error_estimate;
        }
    }

    #[test]
    fn quadrature_is_deterministic(x in 0.05..3.0f64) {
        let f = |n: &semiroots::quadrature::Node| C::new((x * n.ln_t).cos(), n.tc.sqrt());
        prop_assert_eq!(tanh_sinh(f, 1e-12, 12).unwrap(), tanh_sinh(f, 1e-12, 12).unwrap());
    }

    #[test]
    fn half_power_squared_equals_full_power(f in form(0.5, false)) {
        prop_assume!(!sigma_check(&f, 512, true).in_sigma);
        let (one, _) = principal_root_integral(&f, &quad()).unwrap();
        let (half, _) = principal_power_integral(&f, 0.5, &quad()).unwrap();
        prop_assert!((half * half - one).norm() <= 1e-7);
    }

    #[test]
    fn trinomial_specializes_to_quadratic(x in disk(1.9)) {
        let [z1, _] = quadratic_roots_integral(x, &quad()).unwrap();
        let (t, _) = trinomial_principal_root(2, x, &quad()).unwrap();
        prop_assert!((z1 - t).norm() <= 1e-9);
    }

    #[test]
    fn integral_matches_series_for_small_coefficients(f in prop_oneof![form(0.1, false), form(0.1, true)]) {
        let series = series_principal_power(&f, 1.0, 80);
        prop_assert!(series.converged);
        let b = mikhalkin::branch(&f, 0, &BranchSettings::default());
        prop_assert!((b.principal_value.unwrap() - series.value).norm() <= 1e-7);
    }

    #[test]
    fn conjugation_swaps_the_two_divergence_sets(f in form(3.0, false)) {
        let g = MellinForm::new(f.n, f.terms.iter().map(|t| (t.exponent, t.coeff.conj()))).unwrap();
        let (a, b) = (sigma_check(&f, 512, true), sigma_check(&g, 512, true));
        prop_assert!((a.min_abs_plus - b.min_abs_minus).abs() <= 1e-12);
        prop_assert!((a.min_abs_minus - b.min_abs_plus).abs() <= 1e-12);
    }

    #[test]
    fn converged_branches_satisfy_the_equation(f in prop_oneof![form(1.0, false), form(1.0, true)]) {
        let p = f.to_poly();
        for b in mikhalkin::all_branches(&f, &BranchSettings::default()) {
            if !b.converged() || b.report.in_sigma || b.low_confidence {
                continue;
            }
            let w = b.root.unwrap();
            prop_assert!(p.residual_of(w) <= 1e-4, "branch {}: {}", b.branch_index, p.residual_of(w));
            let polished = newton_polish(&p, w, 1e-15, 100).root;
            prop_assert!(p.residual_of(polished) <= 1e-10);
        }
    }

    #[test]
    fn branches_cover_all_roots_away_from_the_divergence_sets(f in form(0.3, true)) {
        let branches = mikhalkin::all_branches(&f, &BranchSettings::default());
        prop_assume!(branches.iter().all(|b| b.converged() && !b.report.in_sigma));
        let ours: Vec<C> = branches.iter().map(|b| b.root.unwrap()).collect();
        let oracle = oracle_roots(&f.to_poly(), 1e-12).unwrap().values();
        prop_assert!(match_values(&ours, &oracle).unwrap().max_distance <= 1e-7);
    }
}
