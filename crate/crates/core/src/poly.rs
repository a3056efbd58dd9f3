//! Dense complex polynomials and the normalized trinomial/multinomial form
//! `w^n + sum_k x_k w^{n_k} - 1 = 0` that the integral formulas operate on.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Magnitudes at or below this are treated as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-300;

/// A polynomial `a_0 z^n + a_1 z^{n-1} + ... + a_n` with `a_0 != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    coeffs: Vec<C>,
}

impl ComplexPoly {
    /// Builds a polynomial from coefficients, leading coefficient first.
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        let Some(lead) = coeffs.first() else {
            return Err(Error::InvalidArgument("empty coefficient list".into()));
        };
        if lead.norm() <= ZERO_THRESHOLD {
            return Err(Error::LeadingZero);
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// Builds a polynomial from real coefficients, leading coefficient first.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C::new(c, 0.0)).collect())
    }

    /// Monic polynomial `prod (z - r)`.
    pub fn from_roots(roots: &[C]) -> Self {
        let mut coeffs = vec![C::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(C::new(0.0, 0.0));
            for i in (1..coeffs.len()).rev() {
                let prev = coeffs[i - 1];
                coeffs[i] -= r * prev;
            }
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, leading first.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn leading(&self) -> C {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C) -> C {
        self.coeffs[1..]
            .iter()
            .fold(self.coeffs[0], |acc, &c| acc * z + c)
    }

    /// Value and first derivative in a single Horner pass.
    pub fn eval_with_derivative(&self, z: C) -> (C, C) {
        let mut p = self.coeffs[0];
        let mut dp = C::new(0.0, 0.0);
        for &c in &self.coeffs[1..] {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Result<Self> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let coeffs = self.coeffs[..n]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (n - i) as f64)
            .collect();
        Ok(Self { coeffs })
    }

    /// `|p(z)| / sum_i |a_i| max(1, |z|)^{n-i}`.
    ///
    /// Scale invariant; for `|z| > 1` both sides are divided by `|z|^n` so that
    /// high degrees do not overflow.
    pub fn residual_of(&self, z: C) -> f64 {
        let r = z.norm();
        if r <= 1.0 {
            let denom: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
            self.eval(z).norm() / denom
        } else {
            // p(z) / z^n = sum_i a_i (1/z)^i
            let inv = z.inv();
            let num = self
                .coeffs
                .iter()
                .rev()
                .fold(C::new(0.0, 0.0), |acc, &c| acc * inv + c);
            let rinv = 1.0 / r;
            let denom = self
                .coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * rinv + c.norm());
            num.norm() / denom
        }
    }

    /// `c * p`.
    pub fn scaled(&self, c: C) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// `p / a_0`.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|&a| a / lead).collect(),
        }
    }

    /// Strips trailing zero coefficients; returns the deflated polynomial and
    /// the number of roots at the origin.
    pub fn deflate_zero_roots(&self) -> (Self, usize) {
        let zeros = self
            .coeffs
            .iter()
            .rev()
            .take_while(|c| c.norm() <= ZERO_THRESHOLD)
            .count();
        let keep = self.coeffs.len() - zeros;
        (
            Self {
                coeffs: self.coeffs[..keep].to_vec(),
            },
            zeros,
        )
    }

    /// Rescales `z = lambda w` so the equation becomes
    /// `w^n + sum_k x_k w^{n_k} - 1 = 0`, with `lambda` the principal n-th root
    /// of `-a_n / a_0`.
    pub fn normalize_to_mellin_form(&self) -> Result<MellinForm> {
        let (p, zero_roots) = self.deflate_zero_roots();
        let n = p.degree();
        if n == 0 {
            return Ok(MellinForm {
                n: 0,
                terms: Vec::new(),
                lambda: C::new(1.0, 0.0),
                zero_root_multiplicity: zero_roots,
            });
        }
        let a0 = p.coeffs[0];
        let an = p.coeffs[n];
        let c = -an / a0;
        let (modulus, arg) = (c.norm(), c.arg());
        let lambda_pow = |k: usize| {
            let kf = k as f64 / n as f64;
            C::from_polar(modulus.powf(kf), arg * kf)
        };
        let lambda = lambda_pow(1);

        // a_0 lambda^n = -a_n exactly.
        let mut terms = Vec::new();
        for exponent in (1..n).rev() {
            let a = p.coeffs[n - exponent];
            if a.norm() <= ZERO_THRESHOLD {
                continue;
            }
            let x = a * lambda_pow(exponent) / (-an);
            if x.norm() > ZERO_THRESHOLD {
                terms.push(Term { exponent, coeff: x });
            }
        }
        Ok(MellinForm {
            n,
            terms,
            lambda,
            zero_root_multiplicity: zero_roots,
        })
    }
}

/// One term `x_k w^{n_k}` of a [`MellinForm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: usize,
    pub coeff: C,
}

/// The equation `w^n + sum_k x_k w^{n_k} - 1 = 0` together with the scale
/// `z = lambda w` and the number of deflated roots at the origin.
///
/// Terms are kept with strictly decreasing exponents in `(0, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinForm {
    pub n: usize,
    pub terms: Vec<Term>,
    pub lambda: C,
    pub zero_root_multiplicity: usize,
}

impl MellinForm {
    /// Builds a form from possibly unsorted, possibly repeated `(exponent, x)`
    /// pairs. Repeated exponents are summed, negligible terms dropped.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (usize, C)>) -> Result<Self> {
        let mut merged: Vec<Term> = Vec::new();
        for (exponent, coeff) in terms {
            if exponent == 0 || exponent >= n {
                return Err(Error::InvalidArgument(format!(
                    "term exponent {exponent} outside (0, {n})"
                )));
            }
            match merged.iter_mut().find(|t| t.exponent == exponent) {
                Some(t) => t.coeff += coeff,
                None => merged.push(Term { exponent, coeff }),
            }
        }
        merged.retain(|t| t.coeff.norm() > ZERO_THRESHOLD);
        merged.sort_by_key(|t| std::cmp::Reverse(t.exponent));
        Ok(Self {
            n,
            terms: merged,
            lambda: C::new(1.0, 0.0),
            zero_root_multiplicity: 0,
        })
    }

    /// The trinomial `w^n + x w^{n-1} - 1`.
    pub fn trinomial(n: usize, x: C) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("trinomial needs n >= 2".into()));
        }
        Self::new(n, [(n - 1, x)])
    }

    pub fn with_lambda(mut self, lambda: C) -> Self {
        self.lambda = lambda;
        self
    }

    /// Exactly one term, with exponent `n - 1`.
    pub fn is_trinomial(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].exponent + 1 == self.n
    }

    /// Some term has exponent `n - 1`.
    pub fn has_subleading_term(&self) -> bool {
        self.terms.iter().any(|t| t.exponent + 1 == self.n)
    }

    /// `w^n + sum x_k w^{n_k} - 1` as a dense polynomial in `w`.
    pub fn to_poly(&self) -> ComplexPoly {
        let mut coeffs = vec![C::new(0.0, 0.0); self.n + 1];
        coeffs[0] = C::new(1.0, 0.0);
        coeffs[self.n] -= C::new(1.0, 0.0);
        for t in &self.terms {
            coeffs[self.n - t.exponent] += t.coeff;
        }
        ComplexPoly { coeffs }
    }

    pub fn eval(&self, w: C) -> C {
        self.to_poly().eval(w)
    }

    /// `exp(2 pi i k / n)`, reducing `k` modulo `n` first.
    pub fn unit_root(&self, k: usize) -> C {
        let k = k % self.n;
        if k == 0 {
            return C::new(1.0, 0.0);
        }
        C::from_polar(1.0, 2.0 * PI * k as f64 / self.n as f64)
    }

    /// Coefficients rotated for branch `j`: `x_k exp(2 pi i j n_k / n)`.
    pub fn rotated(&self, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                exponent: t.exponent,
                coeff: t.coeff * self.unit_root(j * t.exponent % self.n),
            })
            .collect();
        Self {
            n: self.n,
            terms,
            lambda: self.lambda,
            zero_root_multiplicity: self.zero_root_multiplicity,
        }
    }

    /// Maps roots `w` of the form back to roots `z = lambda w` of the original
    /// polynomial, with the deflated zero roots first.
    pub fn denormalize_roots(&self, w_roots: &[C]) -> Vec<C> {
        std::iter::repeat_n(C::new(0.0, 0.0), self.zero_root_multiplicity)
            .chain(w_roots.iter().map(|&w| self.lambda * w))
            .collect()
    }
}

/// Which solver produced a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Series,
    Integral,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Series => "series",
            Method::Integral => "integral",
            Method::Oracle => "oracle",
        }
    }
}

/// A computed root with its quality diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: C,
    /// `residual_of` the originating polynomial at `value`.
    pub residual: f64,
    /// `None` for deflated roots at the origin and for methods without branches.
    pub branch_index: Option<usize>,
    pub method: Method,
    pub polished: bool,
    pub converged: bool,
    pub in_sigma: bool,
}

impl Root {
    pub fn new(p: &ComplexPoly, value: C, method: Method) -> Self {
        Self {
            value,
            residual: p.residual_of(value),
            branch_index: None,
            method,
            polished: false,
            converged: true,
            in_sigma: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn from_values(p: &ComplexPoly, values: &[C], method: Method) -> Self {
        Self {
            roots: values.iter().map(|&z| Root::new(p, z, method)).collect(),
        }
    }

    pub fn values(&self) -> Vec<C> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}
