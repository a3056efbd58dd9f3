//! End-to-end solving: method dispatch, polishing, oracle completion and
//! comparison against the oracle.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::closed_form;
use crate::mikhalkin::{self, BranchResult, BranchSettings, ConvergenceReport, Dispatch};
use crate::oracle::{self, match_values, newton_polish, Matching};
use crate::quadrature::QuadSettings;
use crate::series::series_principal_power;
use crate::{ComplexPoly, Error, MellinForm, Method, Result, Root, RootSet};

/// Residual accepted for an integral root whose quadrature did not converge.
const ACCEPT_RESIDUAL: f64 = 1e-8;
const POLISH_TOL: f64 = 1e-15;
const POLISH_ITER: usize = 100;
const ORACLE_TOL: f64 = 1e-11;
const SERIES_MAX_ORDER: usize = 200;
/// Matched distances above this are never outliers.
const OUTLIER_FLOOR: f64 = 1e-6;
const OUTLIER_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Closed form up to degree four, the integral pipeline above.
    #[default]
    Auto,
    Integral,
    Series,
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: SolveMethod,
    pub polish: bool,
    pub quad_tol: f64,
    pub quad_max_level: usize,
    pub sigma_grid: usize,
    pub parallel_branches: bool,
    /// Replace failed branches by oracle roots.
    pub fallback: bool,
    pub dispatch: Dispatch,
}

impl Default for RunConfig {
    fn default() -> Self {
        let quad = QuadSettings::default();
        Self {
            method: SolveMethod::Auto,
            polish: true,
            quad_tol: quad.tol,
            quad_max_level: quad.max_level,
            sigma_grid: mikhalkin::DEFAULT_SIGMA_GRID,
            parallel_branches: false,
            fallback: true,
            dispatch: Dispatch::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.quad_tol.is_nan() || self.quad_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "quad_tol must be positive, got {}",
                self.quad_tol
            )));
        }
        if self.sigma_grid < 64 {
            return Err(Error::InvalidArgument(format!(
                "sigma_grid must be at least 64, got {}",
                self.sigma_grid
            )));
        }
        if self.quad_max_level < 3 {
            return Err(Error::InvalidArgument(format!(
                "quad_max_level must be at least 3, got {}",
                self.quad_max_level
            )));
        }
        Ok(())
    }

    pub fn branch_settings(&self) -> BranchSettings {
        BranchSettings {
            quad: QuadSettings {
                tol: self.quad_tol,
                max_level: self.quad_max_level,
            },
            sigma_grid: self.sigma_grid,
            dispatch: self.dispatch,
            evaluate_in_sigma: true,
            parallel: self.parallel_branches,
        }
    }

    fn resolved_method(&self, p: &ComplexPoly) -> SolveMethod {
        match self.method {
            SolveMethod::Auto if p.degree() <= 4 => SolveMethod::ClosedForm,
            SolveMethod::Auto => SolveMethod::Integral,
            m => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub form: MellinForm,
    /// Ordered by branch index; roots at the origin come last.
    pub roots: RootSet,
    /// Per-branch diagnostics of the integral method (empty otherwise).
    pub branches: Vec<BranchResult>,
    /// Branches left without a trusted root.
    pub incomplete: Vec<usize>,
}

impl Solution {
    pub fn is_complete(&self) -> bool {
        self.incomplete.is_empty()
    }
}

/// Solves `p` with the configured method.
pub fn solve(p: &ComplexPoly, config: &RunConfig) -> Result<Solution> {
    config.validate()?;
    let form = p.normalize_to_mellin_form()?;
    let method = config.resolved_method(p);
    let mut solution = match method {
        SolveMethod::ClosedForm => {
            let values = closed_form::solve(p)?;
            indexed(p, &values, Method::ClosedForm, &form)
        }
        SolveMethod::Oracle => {
            let mut set = oracle::oracle_roots(p, ORACLE_TOL)?;
            set.roots.iter_mut().for_each(|r| r.branch_index = None);
            let values = set.values();
            indexed(p, &values, Method::Oracle, &form)
        }
        SolveMethod::Integral | SolveMethod::Auto => integral(p, &form, config),
        SolveMethod::Series => series(p, &form),
    };
    if config.polish && matches!(method, SolveMethod::Integral | SolveMethod::Series) {
        for r in solution.roots.roots.iter_mut() {
            if r.branch_index.is_some() && r.method != Method::Oracle && !r.in_sigma {
                polish(p, r);
            }
        }
    }
    let mut incomplete = Vec::new();
    for r in &mut solution.roots.roots {
        if r.method == Method::Integral
            && !r.converged
            && r.residual <= ACCEPT_RESIDUAL
            && !r.in_sigma
        {
            r.converged = true;
        }
        if !r.converged {
            incomplete.extend(r.branch_index);
        }
    }
    if config.fallback && !incomplete.is_empty() {
        fill_from_oracle(p, &form, &mut solution.roots, &incomplete)?;
        incomplete.clear();
    }
    solution.incomplete = incomplete;
    Ok(solution)
}

fn polish(p: &ComplexPoly, r: &mut Root) {
    let out = newton_polish(p, r.value, POLISH_TOL, POLISH_ITER);
    let residual = p.residual_of(out.root);
    if residual <= r.residual {
        r.value = out.root;
        r.residual = residual;
    }
    r.polished = true;
}

/// Nonzero roots tagged with ordinal branch indices, zeros last.
fn indexed(p: &ComplexPoly, values: &[C], method: Method, form: &MellinForm) -> Solution {
    let nonzero: Vec<C> = values.iter().copied().filter(|z| z.norm() > 0.0).collect();
    let zeros = values.len() - nonzero.len();
    let mut roots: Vec<Root> = nonzero
        .iter()
        .enumerate()
        .map(|(i, &z)| Root {
            branch_index: Some(i),
            ..Root::new(p, z, method)
        })
        .collect();
    roots.extend((0..zeros).map(|_| Root::new(p, C::new(0.0, 0.0), method)));
    Solution {
        form: form.clone(),
        roots: RootSet { roots },
        branches: Vec::new(),
        incomplete: Vec::new(),
    }
}

fn zero_roots(p: &ComplexPoly, form: &MellinForm, method: Method) -> impl Iterator<Item = Root> {
    let zero = Root::new(p, C::new(0.0, 0.0), method);
    std::iter::repeat_n(zero, form.zero_root_multiplicity)
}

fn integral(p: &ComplexPoly, form: &MellinForm, config: &RunConfig) -> Solution {
    let branches = mikhalkin::all_branches(form, &config.branch_settings());
    let mut roots: Vec<Root> = branches
        .iter()
        .map(|b| {
            let value = b.root.unwrap_or_else(|| form.unit_root(b.branch_index)) * form.lambda;
            Root {
                branch_index: Some(b.branch_index),
                converged: b.converged() && !b.report.in_sigma,
                in_sigma: b.report.in_sigma,
                ..Root::new(p, value, Method::Integral)
            }
        })
        .collect();
    roots.extend(zero_roots(p, form, Method::Integral));
    Solution {
        form: form.clone(),
        roots: RootSet { roots },
        branches,
        incomplete: Vec::new(),
    }
}

fn series(p: &ComplexPoly, form: &MellinForm) -> Solution {
    let mut roots: Vec<Root> = (0..form.n)
        .map(|j| {
            let r = series_principal_power(&form.rotated(j), 1.0, SERIES_MAX_ORDER);
            let value = if r.value.re.is_finite() && r.value.im.is_finite() {
                form.unit_root(j) * r.value * form.lambda
            } else {
                form.unit_root(j) * form.lambda
            };
            Root {
                branch_index: Some(j),
                converged: r.converged,
                ..Root::new(p, value, Method::Series)
            }
        })
        .collect();
    roots.extend(zero_roots(p, form, Method::Series));
    Solution {
        form: form.clone(),
        roots: RootSet { roots },
        branches: Vec::new(),
        incomplete: Vec::new(),
    }
}

/// Replaces the roots of the `missing` branches by oracle roots. Every branch
/// value (trusted or not) serves as an anchor for an optimal matching
/// against the oracle's nonzero roots.
fn fill_from_oracle(
    p: &ComplexPoly,
    form: &MellinForm,
    set: &mut RootSet,
    missing: &[usize],
) -> Result<()> {
    let (deflated, _) = p.deflate_zero_roots();
    let reference = oracle::oracle_roots(&deflated, ORACLE_TOL)?.values();
    let anchors: Vec<C> = (0..form.n)
        .map(|j| {
            set.roots
                .iter()
                .find(|r| r.branch_index == Some(j))
                .map_or(form.unit_root(j) * form.lambda, |r| r.value)
        })
        .collect();
    let m = match_values(&anchors, &reference)?;
    for r in set.roots.iter_mut() {
        let Some(j) = r.branch_index.filter(|j| missing.contains(j)) else {
            continue;
        };
        let in_sigma = r.in_sigma;
        *r = Root {
            branch_index: Some(j),
            in_sigma,
            ..Root::new(p, reference[m.pairing[j].1], Method::Oracle)
        };
    }
    Ok(())
}

/// Per-branch domain verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub form: MellinForm,
    pub branches: Vec<(usize, ConvergenceReport)>,
}

impl DomainReport {
    pub fn all_convergent(&self) -> bool {
        self.branches.iter().all(|(_, r)| !r.in_sigma)
    }
}

pub fn domain(p: &ComplexPoly, sigma_grid: usize) -> Result<DomainReport> {
    if sigma_grid < 64 {
        return Err(Error::InvalidArgument(format!(
            "sigma_grid must be at least 64, got {sigma_grid}"
        )));
    }
    let form = p.normalize_to_mellin_form()?;
    let branches = (0..form.n)
        .map(|j| {
            (
                j,
                mikhalkin::sigma_check(&form.rotated(j), sigma_grid, true),
            )
        })
        .collect();
    Ok(DomainReport { form, branches })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub branch_index: Option<usize>,
    pub raw: C,
    pub polished: C,
    pub oracle: C,
    pub raw_distance: f64,
    pub polished_distance: f64,
    pub raw_residual: f64,
    pub polished_residual: f64,
    pub in_sigma: bool,
    /// Raw distance exceeds ten times the median raw distance.
    pub outlier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub raw_max_distance: f64,
    pub raw_mean_distance: f64,
    pub polished_max_distance: f64,
    pub polished_mean_distance: f64,
    pub raw_max_residual: f64,
    pub polished_max_residual: f64,
    pub outliers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method: Method,
    pub rows: Vec<ComparisonRow>,
    pub summary: ComparisonSummary,
}

/// Runs the configured method without polishing or fallback, polishes a copy,
/// and matches both against the oracle.
pub fn compare(p: &ComplexPoly, config: &RunConfig) -> Result<Comparison> {
    let raw_config = RunConfig {
        polish: false,
        fallback: false,
        ..*config
    };
    let raw = solve(p, &raw_config)?.roots;
    let mut polished = raw.clone();
    for r in polished.roots.iter_mut() {
        polish(p, r);
    }
    let reference = oracle::oracle_roots(p, ORACLE_TOL)?.values();
    let raw_match = match_values(&raw.values(), &reference)?;
    let polished_match = match_values(&polished.values(), &reference)?;

    let outliers = outlier_flags(&raw_match.distances);
    let rows: Vec<ComparisonRow> = raw
        .roots
        .iter()
        .zip(&polished.roots)
        .enumerate()
        .map(|(i, (r, q))| ComparisonRow {
            branch_index: r.branch_index,
            raw: r.value,
            polished: q.value,
            oracle: reference[raw_match.pairing[i].1],
            raw_distance: raw_match.distances[i],
            polished_distance: polished_match.distances[i],
            raw_residual: r.residual,
            polished_residual: q.residual,
            in_sigma: r.in_sigma,
            outlier: outliers[i],
        })
        .collect();
    let summary = summarize(&raw_match, &polished_match, &raw, &polished, &outliers);
    Ok(Comparison {
        method: raw.roots.first().map_or(Method::Oracle, |r| r.method),
        rows,
        summary,
    })
}

/// A distance is an outlier when it exceeds both [`OUTLIER_FLOOR`] and ten
/// times the lower median of all distances.
pub fn outlier_flags(distances: &[f64]) -> Vec<bool> {
    if distances.is_empty() {
        return Vec::new();
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[(sorted.len() - 1) / 2];
    distances
        .iter()
        .map(|&d| d > OUTLIER_FLOOR && d > OUTLIER_FACTOR * median)
        .collect()
}

fn summarize(
    raw: &Matching,
    polished: &Matching,
    raw_set: &RootSet,
    polished_set: &RootSet,
    outliers: &[bool],
) -> ComparisonSummary {
    ComparisonSummary {
        raw_max_distance: raw.max_distance,
        raw_mean_distance: raw.mean_distance,
        polished_max_distance: polished.max_distance,
        polished_mean_distance: polished.mean_distance,
        raw_max_residual: raw_set.max_residual(),
        polished_max_residual: polished_set.max_residual(),
        outliers: outliers.iter().filter(|&&o| o).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_equation;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            quad_tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidArgument(_))));
        let bad = RunConfig {
            sigma_grid: 10,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn auto_uses_closed_form_for_low_degree() {
        let p = parse_equation("z^2+0.5z+1").unwrap();
        let s = solve(&p, &RunConfig::default()).unwrap();
        assert!(s
            .roots
            .roots
            .iter()
            .all(|r| r.method == Method::ClosedForm && !r.polished));
        assert!(s.roots.max_residual() < 1e-14);
    }

    #[test]
    fn roots_of_unity_through_integral() {
        for n in [3usize, 17, 64] {
            let mut cs = vec![c(0.0, 0.0); n + 1];
            cs[0] = c(1.0, 0.0);
            cs[n] = c(-1.0, 0.0);
            let p = ComplexPoly::new(cs).unwrap();
            let config = RunConfig {
                method: SolveMethod::Integral,
                polish: false,
                ..Default::default()
            };
            let s = solve(&p, &config).unwrap();
            assert_eq!(s.roots.len(), n);
            for r in &s.roots.roots {
                let j = r.branch_index.unwrap();
                let expect = C::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
                assert!((r.value - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_roots_are_appended_without_branch() {
        let p = parse_equation("z^7 + 2z^4 - 3z^2").unwrap();
        let config = RunConfig {
            method: SolveMethod::Integral,
            ..Default::default()
        };
        let s = solve(&p, &config).unwrap();
        assert_eq!(s.roots.len(), 7);
        let zeros: Vec<_> = s
            .roots
            .roots
            .iter()
            .filter(|r| r.branch_index.is_none())
            .collect();
        assert_eq!(zeros.len(), 2);
        assert!(zeros.iter().all(|r| r.value == c(0.0, 0.0)));
        assert!(s.roots.max_residual() < 1e-10);
    }

    #[test]
    fn sigma_branches_fall_back_to_oracle() {
        // z^2 + 3i z - 1 has x = 3i on branch 0 (and -3i on branch 1).
        let p = parse_equation("z^2+3i z-1").unwrap();
        let config = RunConfig {
            method: SolveMethod::Integral,
            ..Default::default()
        };
        let s = solve(&p, &config).unwrap();
        assert!(s.is_complete());
        assert!(s
            .roots
            .roots
            .iter()
            .all(|r| r.method == Method::Oracle && r.in_sigma));
        assert!(s.roots.max_residual() < 1e-12);

        let strict = RunConfig {
            fallback: false,
            ..config
        };
        let s = solve(&p, &strict).unwrap();
        assert_eq!(s.incomplete, vec![0, 1]);
    }

    #[test]
    fn series_method_for_small_coefficients() {
        let p = parse_equation("z^6 + 0.05z^5 - 0.02i z^2 - 1").unwrap();
        let config = RunConfig {
            method: SolveMethod::Series,
            polish: false,
            ..Default::default()
        };
        let s = solve(&p, &config).unwrap();
        assert!(s.is_complete());
        assert!(s.roots.max_residual() < 1e-10);
    }

    #[test]
    fn domain_examples() {
        let d = domain(&parse_equation("z^2+3i z-1").unwrap(), 512).unwrap();
        assert!(d.branches.iter().any(|(_, r)| r.in_sigma));
        assert!(domain(&parse_equation("z^2+0.5z-1").unwrap(), 512)
            .unwrap()
            .all_convergent());
        assert!(domain(&parse_equation("z^9-1").unwrap(), 64)
            .unwrap()
            .all_convergent());
    }

    #[test]
    fn outlier_rule() {
        assert_eq!(
            outlier_flags(&[1e-9, 2e-9, 3e-3, 3e-3]),
            vec![false, false, true, true]
        );
        assert_eq!(outlier_flags(&[0.1, 0.1, 0.1]), vec![false; 3]);
        assert_eq!(outlier_flags(&[1e-9, 1e-8]), vec![false, false]);
    }

    #[test]
    fn compare_quadratic_closed_form() {
        let p = parse_equation("z^2+0.5z+1").unwrap();
        let cmp = compare(&p, &RunConfig::default()).unwrap();
        assert_eq!(cmp.method, Method::ClosedForm);
        assert!(cmp.summary.raw_max_distance <= 1e-9);
    }
}
