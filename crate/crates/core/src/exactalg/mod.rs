//! Exact arithmetic kernel.
//!
//! Everything the symbolic side of the crate needs lives here: big rationals,
//! Gaussian rationals (to carry the unit `i` that Fourier symbols produce),
//! univariate polynomials in the mesh ratio `lambda`, and truncated power
//! series in `theta` whose coefficients are such polynomials.
//!
//! All values are immutable once built and every operation is a pure
//! function, so they can be shared freely between threads.

mod gaussian;
mod poly;
mod rational;
mod series;

pub use gaussian::GaussRat;
pub use poly::LambdaPoly;
pub use rational::{factorial, ln_abs, parse_rational, rational_to_f64, Rational};
pub use series::ThetaSeries;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("series orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("logarithm needs a series with constant term 1, got {0}")]
    LogConstantTerm(String),
    #[error("exponential needs a series with constant term 0, got {0}")]
    ExpConstantTerm(String),
    #[error("series must have at least one coefficient")]
    EmptySeries,
}
