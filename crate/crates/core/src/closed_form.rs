//! Radical formulas for monic equations of degree 2, 3 and 4.

use num_complex::Complex64 as C;

use crate::{ComplexPoly, Error, Result};

/// `y^3 + 3 p y + 2 q = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepressedCubic {
    pub p: C,
    pub q: C,
}

impl DepressedCubic {
    /// Depresses `z^3 + x1 z^2 + x2 z + x3` with `y = z + x1/3`.
    pub fn from_monic(x1: C, x2: C, x3: C) -> Self {
        let p = (x2 - x1 * x1 / 3.0) / 3.0;
        let q = (2.0 * x1 * x1 * x1 / 27.0 - x1 * x2 / 3.0 + x3) / 2.0;
        Self { p, q }
    }

    /// Cardano's formula with the cube roots paired so that `u+ u- = -p`.
    pub fn roots(&self) -> [C; 3] {
        let (p, q) = (self.p, self.q);
        let disc = (p * p * p + q * q).sqrt();
        // Take the cube root of the larger of -q +/- sqrt(.) to avoid cancellation.
        let (a, b) = (-q + disc, -q - disc);
        let big = if a.norm() >= b.norm() { a } else { b };
        let u_plus = big.cbrt();
        let u_minus = if u_plus.norm() == 0.0 {
            C::new(0.0, 0.0)
        } else {
            -p / u_plus
        };
        let rho_plus = C::new(-0.5, 3f64.sqrt() / 2.0);
        let rho_minus = rho_plus.conj();
        [
            u_plus + u_minus,
            rho_plus * u_plus + rho_minus * u_minus,
            rho_minus * u_plus + rho_plus * u_minus,
        ]
    }
}

/// Roots of `z^2 + x1 z + x2`, larger magnitude first.
pub fn solve_quadratic(x1: C, x2: C) -> [C; 2] {
    let s = (x1 * x1 - 4.0 * x2).sqrt();
    // Pick the sign that adds magnitudes, then Vieta for the other root.
    let big = if (-x1 + s).norm() >= (-x1 - s).norm() {
        (-x1 + s) / 2.0
    } else {
        (-x1 - s) / 2.0
    };
    let small = if big.norm() == 0.0 { big } else { x2 / big };
    [big, small]
}

/// Roots of `z^3 + x1 z^2 + x2 z + x3`.
pub fn solve_cubic(x1: C, x2: C, x3: C) -> [C; 3] {
    let shift = x1 / 3.0;
    DepressedCubic::from_monic(x1, x2, x3)
        .roots()
        .map(|y| y - shift)
}

/// Roots of `z^4 + x1 z^3 + x2 z^2 + x3 z + x4` by Ferrari's method.
///
/// After `y = z + x1/4` the equation is `y^4 + p y^2 + q y + r = 0`; the roots
/// `alpha, beta, gamma` of `s^3 + 2p s^2 + (p^2 - 4r) s - q^2 = 0` give
/// `u = sqrt(alpha)`, `v = sqrt(beta)`, `w = +/- sqrt(gamma)` with the sign
/// fixed by `u v w = -q`, and the roots are
/// `(u + v + w)/2, (u - v - w)/2, (-u + v - w)/2, (-u - v + w)/2`.
pub fn solve_quartic(x1: C, x2: C, x3: C, x4: C) -> [C; 4] {
    let shift = x1 / 4.0;
    let s2 = shift * shift;
    let p = x2 - 6.0 * s2;
    let q = x3 - 2.0 * x2 * shift + 8.0 * s2 * shift;
    let r = x4 - x3 * shift + x2 * s2 - 3.0 * s2 * s2;

    let [alpha, beta, gamma] = solve_cubic(2.0 * p, p * p - 4.0 * r, -q * q);
    let u = alpha.sqrt();
    let v = beta.sqrt();
    let w0 = gamma.sqrt();
    let w = if (u * v * w0 + q).norm() <= (u * v * w0 - q).norm() {
        w0
    } else {
        -w0
    };
    [
        (u + v + w) / 2.0,
        (u - v - w) / 2.0,
        (-u + v - w) / 2.0,
        (-u - v + w) / 2.0,
    ]
    .map(|y| y - shift)
}

/// All roots of a polynomial of degree 1 to 4.
pub fn solve(p: &ComplexPoly) -> Result<Vec<C>> {
    let m = p.monic();
    let a = m.coeffs();
    Ok(match p.degree() {
        1 => vec![-a[1]],
        2 => solve_quadratic(a[1], a[2]).to_vec(),
        3 => solve_cubic(a[1], a[2], a[3]).to_vec(),
        4 => solve_quartic(a[1], a[2], a[3], a[4]).to_vec(),
        0 => return Err(Error::ConstantPolynomial),
        d => return Err(Error::UnsupportedDegree(d)),
    })
}
