//! Semi-analytic roots of complex polynomial equations.
//!
//! Every root of `z^n + x_1 z^{n_1} + ... + x_p z^{n_p} - 1 = 0` is obtained from
//! a one-dimensional integral of elementary functions over `[0, 1]`, evaluated
//! with double-exponential quadrature. The principal root (the branch with
//! `z(0, ..., 0) = 1`) comes from the integral; the remaining `n - 1` roots come
//! from rotating the coefficients by powers of `exp(2 pi i / n)`.
//!
//! Independent references live alongside the integral method so results can be
//! cross-checked: radical formulas for degrees up to four ([`closed_form`]), the
//! multi-index hypergeometric series for small coefficients ([`series`]), and an
//! Ehrlich-Aberth simultaneous iteration ([`oracle`]).
//!
//! ```
//! use semiroots::{mikhalkin, Complex64 as C, ComplexPoly};
//!
//! // z^3 + 6z + 2 = 0
//! let p = ComplexPoly::new(vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(6.0, 0.0), C::new(2.0, 0.0)])?;
//! let form = p.normalize_to_mellin_form()?;
//! let branches = mikhalkin::all_branches(&form, &mikhalkin::BranchSettings::default());
//! for b in &branches {
//!     let z = form.lambda * b.root.unwrap();
//!     assert!(p.residual_of(z) < 1e-8);
//! }
//! # Ok::<(), semiroots::Error>(())
//! ```

pub mod closed_form;
mod error;
pub mod mikhalkin;
pub mod oracle;
pub mod parse;
pub mod pipeline;
pub mod poly;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{ComplexPoly, MellinForm, Method, Root, RootSet};
pub use quadrature::QuadratureResult;
