//! Reference root finder, Newton polishing and root-set matching.
//!
//! The reference roots come from Ehrlich-Aberth simultaneous iteration, which
//! shares no code with the integral formulas. The companion matrix is built for
//! inspection and small-degree checks only.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::{ComplexPoly, Error, Method, Result, Root, RootSet};

/// Dense `n x n` companion matrix of the monic polynomial, row major:
/// ones on the subdiagonal, negated coefficients in the last column.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionMatrix {
    n: usize,
    entries: Vec<C>,
}

impl CompanionMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> C {
        self.entries[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<C>> {
        self.entries.chunks(self.n).map(<[C]>::to_vec).collect()
    }
}

pub fn companion_matrix(p: &ComplexPoly) -> Result<CompanionMatrix> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let m = p.monic();
    let a = m.coeffs();
    let mut entries = vec![C::new(0.0, 0.0); n * n];
    for i in 1..n {
        entries[i * n + (i - 1)] = C::new(1.0, 0.0);
    }
    // Row i of the last column holds -a_{n-i}.
    for i in 0..n {
        entries[i * n + (n - 1)] = -a[n - i];
    }
    Ok(CompanionMatrix { n, entries })
}

/// Number of full Aberth sweeps before falling back to per-root Newton.
pub const ABERTH_SWEEPS: usize = 200;
const PHASE_OFFSET: f64 = 0.41;

/// Initial radii from the upper convex hull of `(i, ln |a_i|)` (Newton polygon).
///
/// Each hull edge from `i` to `j` contributes `j - i` guesses on a circle of
/// radius `(|a_i| / |a_j|)^{1/(j - i)}`.
fn newton_polygon_radii(p: &ComplexPoly) -> Vec<f64> {
    let n = p.degree();
    let pts: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross =
                (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut radii = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let r = ((li - lj) / (j - i) as f64).exp();
        radii.extend(std::iter::repeat_n(r, j - i));
    }
    radii
}

fn initial_guesses(p: &ComplexPoly) -> Vec<C> {
    let radii = newton_polygon_radii(p);
    let n = radii.len();
    radii
        .iter()
        .enumerate()
        .map(|(k, &r)| C::from_polar(r, 2.0 * PI * k as f64 / n as f64 + PHASE_OFFSET))
        .collect()
}

/// All roots of `p`, each with `residual_of <= tol`.
pub fn oracle_roots(p: &ComplexPoly, tol: f64) -> Result<RootSet> {
    let values = aberth(p, tol)?;
    let mut set = RootSet::from_values(p, &values, Method::Oracle);
    for (i, r) in set.roots.iter_mut().enumerate() {
        r.branch_index = Some(i);
    }
    Ok(set)
}

fn aberth(p: &ComplexPoly, tol: f64) -> Result<Vec<C>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let (deflated, zeros) = p.deflate_zero_roots();
    let mut roots = vec![C::new(0.0, 0.0); zeros];
    if deflated.degree() == 0 {
        return Ok(roots);
    }
    let q = deflated.monic();
    let mut z = initial_guesses(&q);
    let m = z.len();
    let mut done = vec![false; m];
    let eps = f64::EPSILON;

    for _ in 0..ABERTH_SWEEPS {
        if done.iter().all(|&d| d) {
            break;
        }
        for i in 0..m {
            if done[i] {
                continue;
            }
            let (v, dv) = q.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: C = (0..m)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let mut step = ratio / (C::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                step = ratio;
            }
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * eps * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
    }

    let mut bad = Vec::new();
    for (i, zi) in z.iter_mut().enumerate() {
        if q.residual_of(*zi) > tol {
            *zi = newton_polish(&q, *zi, 1e-15, 100).root;
        }
        if q.residual_of(*zi) > tol {
            bad.push(zeros + i);
        }
    }
    if !bad.is_empty() {
        return Err(Error::NoConvergence { indices: bad });
    }
    roots.extend(z);
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonResult {
    pub root: C,
    pub converged: bool,
    pub iterations: usize,
}

/// Newton's method on `p` from `z0`.
///
/// Converges when `|step| <= tol (1 + |z|)`. Where `|p'|` is below 1e-14 the
/// step is damped to at most `1e-3 (1 + |z|)`. Returns the iterate with the
/// smallest residual seen, so a converged result never has a larger residual
/// than `z0`.
pub fn newton_polish(p: &ComplexPoly, z0: C, tol: f64, max_iter: usize) -> NewtonResult {
    let Ok(dp) = p.derivative() else {
        return NewtonResult {
            root: z0,
            converged: false,
            iterations: 0,
        };
    };
    let mut z = z0;
    let mut best = (p.residual_of(z0), z0);
    for it in 0..max_iter {
        let v = p.eval(z);
        if v.norm() == 0.0 {
            return NewtonResult {
                root: z,
                converged: true,
                iterations: it,
            };
        }
        let d = dp.eval(z);
        let limit = 1e-3 * (1.0 + z.norm());
        let step = if d.norm() < 1e-14 {
            let s = if d.norm() == 0.0 {
                C::new(limit, 0.0)
            } else {
                v / d
            };
            if s.norm() > limit {
                s * (limit / s.norm())
            } else {
                s
            }
        } else {
            v / d
        };
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        let res = p.residual_of(z);
        if res <= best.0 {
            best = (res, z);
        }
        if step.norm() <= tol * (1.0 + z.norm()) {
            return NewtonResult {
                root: best.1,
                converged: true,
                iterations: it + 1,
            };
        }
    }
    NewtonResult {
        root: best.1,
        converged: false,
        iterations: max_iter,
    }
}

/// An optimal pairing between two equally sized root sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `(index in a, index in b)`, ordered by the index in `a`.
    pub pairing: Vec<(usize, usize)>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub mean_distance: f64,
}

pub fn match_roots(a: &RootSet, b: &RootSet) -> Result<Matching> {
    match_values(&a.values(), &b.values())
}

/// Minimum-cost perfect matching on `|a_i - b_j|`.
///
/// A greedy nearest-neighbour pass is accepted when its worst distance is
/// below 1e-6; otherwise the Hungarian algorithm is run.
pub fn match_values(a: &[C], b: &[C]) -> Result<Matching> {
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let assignment = greedy(a, b)
        .filter(|asg| {
            asg.iter()
                .enumerate()
                .all(|(i, &j)| (a[i] - b[j]).norm() < 1e-6)
        })
        .unwrap_or_else(|| hungarian(a, b));
    let distances: Vec<f64> = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| (a[i] - b[j]).norm())
        .collect();
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let mean_distance = if distances.is_empty() {
        0.0
    } else {
        distances.iter().sum::<f64>() / distances.len() as f64
    };
    Ok(Matching {
        pairing: assignment.into_iter().enumerate().collect(),
        distances,
        max_distance,
        mean_distance,
    })
}

fn greedy(a: &[C], b: &[C]) -> Option<Vec<usize>> {
    let mut used = vec![false; b.len()];
    let mut out = Vec::with_capacity(a.len());
    for &x in a {
        let j = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (x - b[i]).norm().total_cmp(&(x - b[j]).norm()))?;
        used[j] = true;
        out.push(j);
    }
    Some(out)
}

/// O(n^3) shortest augmenting path assignment; returns `col[i]` for each row.
fn hungarian(a: &[C], b: &[C]) -> Vec<usize> {
    let n = a.len();
    let cost = |i: usize, j: usize| (a[i] - b[j]).norm();
    // 1-based potentials with a virtual column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        if owner[j] > 0 {
            col[owner[j] - 1] = j - 1;
        }
    }
    col
}

/// Newton-polishes every root in place against `p`.
pub fn polish_all(p: &ComplexPoly, set: &mut RootSet, tol: f64, max_iter: usize) {
    for r in &mut set.roots {
        polish_root(p, r, tol, max_iter);
    }
}

pub(crate) fn polish_root(p: &ComplexPoly, r: &mut Root, tol: f64, max_iter: usize) {
    let out = newton_polish(p, r.value, tol, max_iter);
    r.value = out.root;
    r.residual = p.residual_of(out.root);
    r.polished = true;
    r.converged = r.converged && out.converged;
}
