//! Exact polynomial algebra: dense univariate polynomials with Bézout
//! cofactors, sparse two-variable Laurent polynomials with monomial
//! substitution, truncated Laurent series, rational functions and matrices.

mod laurent2;
mod matrix;
mod ratfunc;
mod series;
mod unipoly;

pub use laurent2::{Exp2, LaurentPoly2, Monomial, Var, Vars};
pub use matrix::Matrix;
pub use ratfunc::RationalFunction1;
pub use series::{expand_quotient, BiSeries, Series};
pub use unipoly::UniPoly;
