//! Numeric side of the analysis: the Von Neumann symbol, the log-convergence
//! radius `theta_m`, stability regions over `lambda`, truncated modified
//! equations and their amplification, and figure data.
//!
//! Symbols are evaluated in double precision after the stencil weights have
//! been computed exactly. `theta = 0` and `theta = pi` are always evaluated
//! exactly (`e^{i p pi} = (-1)^p`), never approached through `sin`/`cos`.

mod figures;
mod regions;
mod symmetry;
mod truncation;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::exactalg::{GaussRat, Rational};
use crate::modeq::ModeqError;
use crate::schemes::SchemeSpec;

pub use figures::{figure_data, FigureRow, FigureTable};
pub use regions::{region_scan, LambdaRange, RegionReport, RegionSample};
pub use symmetry::{upwind_symmetry_check, CoefficientPair, SymmetryReport};
pub use truncation::{
    truncated_amplification, truncation_certificate, CertificateParams, StabilityCertificate, Truncation,
    TruncationEval,
};

/// Uniform theta samples on `[0, pi]` used when no grid is requested.
pub const DEFAULT_GRID: usize = 4096;
/// Slack allowed in `|S| <= 1` and `|1 - S| < 1`.
pub const STABILITY_TOL: f64 = 1e-12;
pub const MIN_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("theta grid needs at least {MIN_GRID} intervals, got {0}")]
    GridTooSmall(usize),
    #[error("invalid lambda range: {0}")]
    InvalidRange(String),
    #[error("lambda must be non-negative, got {0}")]
    NegativeLambda(String),
    #[error("lambda = {lambda} lies outside the |1-S|<1 region (max |1-S| = {max_one_minus_s})")]
    OutsideConvergenceSubset { lambda: String, max_one_minus_s: f64 },
    #[error("certificate needs lambda > 0, got {0}")]
    NonPositiveLambda(String),
    #[error("reference order {reference} must exceed the truncation order {n} and not the stored order {stored}")]
    ReferenceOrder { reference: usize, n: usize, stored: usize },
    #[error("symmetry check needs 0 <= lambda <= 1/2, got {0}")]
    SymmetryRange(String),
    #[error("symmetry violated at {0}")]
    SymmetryViolation(String),
    #[error(transparent)]
    Modeq(#[from] ModeqError),
}

/// `theta_k = k pi / intervals` for `k = 0..=intervals`, endpoints exact.
pub fn theta_grid(intervals: usize) -> Vec<f64> {
    let mut points: Vec<f64> = (0..=intervals).map(|k| PI * k as f64 / intervals as f64).collect();
    if let Some(last) = points.last_mut() {
        *last = PI;
    }
    if let Some(first) = points.first_mut() {
        *first = 0.0;
    }
    points
}

/// The symbol `S(theta) = 1 + sum_p w_p e^{i p theta}` with
/// `w_p = lambda B_p(lambda)` at a fixed `lambda`.
#[derive(Debug, Clone)]
pub struct Symbol {
    weights: Vec<(i64, Complex64)>,
    at_pi: Complex64,
}

impl Symbol {
    pub fn new(scheme: &SchemeSpec, lambda: f64) -> Self {
        match Rational::from_float(lambda) {
            Some(l) => Self::exact(scheme, &l),
            None => Self { weights: scheme.weights(lambda), at_pi: Complex64::new(f64::NAN, f64::NAN) },
        }
    }

    pub fn exact(scheme: &SchemeSpec, lambda: &Rational) -> Self {
        let exact = scheme.weights_exact(lambda);
        let mut at_pi = GaussRat::from_int(1);
        for (p, w) in &exact {
            at_pi = if p.rem_euclid(2) == 0 { &at_pi + w } else { &at_pi - w };
        }
        Self { weights: exact.into_iter().map(|(p, w)| (p, w.to_complex())).collect(), at_pi: at_pi.to_complex() }
    }

    pub fn weights(&self) -> &[(i64, Complex64)] {
        &self.weights
    }

    /// `S(theta)` for real `theta`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        if theta == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        if theta.abs() == PI {
            return self.at_pi;
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for &(p, w) in &self.weights {
            let (s, c) = (p as f64 * theta).sin_cos();
            acc += w * Complex64::new(c, s);
        }
        acc
    }

    /// `S`, `S'` and `S''` at a complex argument.
    pub fn eval_complex(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let mut s = Complex64::new(1.0, 0.0);
        let mut ds = Complex64::zero();
        let mut dds = Complex64::zero();
        for &(p, w) in &self.weights {
            let pf = p as f64;
            let e = w * (Complex64::i() * pf * z).exp();
            s += e;
            ds += Complex64::i() * pf * e;
            dds -= pf * pf * e;
        }
        (s, ds, dds)
    }
}

/// `S(theta)` at `lambda`.
pub fn eval_symbol(scheme: &SchemeSpec, lambda: f64, theta: f64) -> Complex64 {
    Symbol::new(scheme, lambda).eval(theta)
}

/// Largest `theta* <= pi` such that `|1 - S(theta)| < 1` at every grid point
/// below `theta*`. The first crossing is refined by bisection between the
/// last passing and the first failing grid point.
pub fn compute_theta_m(scheme: &SchemeSpec, lambda: f64, grid: usize) -> Result<f64, SpectraError> {
    if grid < MIN_GRID {
        return Err(SpectraError::GridTooSmall(grid));
    }
    Ok(theta_m_of(&Symbol::new(scheme, lambda), &theta_grid(grid)))
}

pub(crate) fn theta_m_of(symbol: &Symbol, thetas: &[f64]) -> f64 {
    let inside = |t: f64| (Complex64::new(1.0, 0.0) - symbol.eval(t)).norm() < 1.0;
    let Some(k) = thetas.iter().position(|&t| t < PI && !inside(t)) else {
        return PI;
    };
    if k == 0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (thetas[k - 1], thetas[k]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
