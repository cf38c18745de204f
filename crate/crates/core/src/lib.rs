//! Exact-arithmetic toolkit for the analytic normal forms `N_p^(M,N)` of the
//! topological class of `∏(y + a_i x) ∏(y + b_i x²)`.
//!
//! The crate builds the normal forms, pulls them back along the charts of the
//! two-step blow-up, solves the infinitesimal deformation equations through
//! Bézout identities, assembles the cocycle matrix on the cohomology basis and
//! checks the closed-form identities (dimension, zero block, Vandermonde
//! blocks, determinants, propagation, scaling) with rational arithmetic.
//!
//! The polynomial layer in [`poly_core`] is generic over any [`Scalar`]; the
//! geometric modules work over [`Rational`].

pub mod blowup;
pub mod cocycle;
pub mod error;
pub mod lattice;
pub mod normal_form;
pub mod poly_core;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational number, the base field of every computation.
pub type Rational = num_rational::BigRational;
/// Univariate polynomial over ℚ.
pub type QPoly = poly_core::UniPoly<Rational>;
/// Sparse two-variable Laurent polynomial over ℚ.
pub type QLaurent = poly_core::LaurentPoly2<Rational>;
/// Univariate rational function over ℚ.
pub type QRatFunc = poly_core::RationalFunction1<Rational>;
/// Truncated univariate Laurent series over ℚ.
pub type QSeries = poly_core::Series<Rational>;
/// Dense matrix over ℚ.
pub type QMatrix = poly_core::Matrix<Rational>;
/// Univariate polynomial over `f64`, for quick numerical experiments.
pub type F64Poly = poly_core::UniPoly<f64>;
/// Dense matrix over `f64`.
pub type F64Matrix = poly_core::Matrix<f64>;
