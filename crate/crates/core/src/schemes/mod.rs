//! Explicit two-level schemes of the form
//! `u_j^{n+1} = u_j^n + lambda * sum_p B_p(lambda) u_{j+p}^n` with
//! `lambda = dt / dx^q`, together with the PDE they discretize
//! (`u_t + sum_p A_p d^p u / dx^p = 0`).

mod catalog;
mod parser;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::{GaussRat, LambdaPoly, Rational};

pub use catalog::{builtin_catalog, catalog_entry, CatalogEntry, Golden};
pub use parser::{parse_poly, parse_scheme};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("inconsistent stencil: sum of B_p is {0}, expected 0")]
    Inconsistent(String),
    #[error("duplicate stencil offset {0}")]
    DuplicateOffset(i64),
    #[error("duplicate PDE order {0}")]
    DuplicatePdeOrder(u32),
    #[error("q must be a positive integer, got {0}")]
    InvalidQ(i64),
    #[error("stencil has no nonzero weight")]
    EmptyStencil,
    #[error("PDE needs at least one derivative term of order >= 1")]
    EmptyPde,
    #[error("stencil weight B[{0}] has a non-real coefficient")]
    ComplexWeight(i64),
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
}

/// A validated scheme. Construction enforces consistency
/// (`sum_p B_p(lambda) == 0` as a polynomial identity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeSpec {
    name: String,
    q: u32,
    stencil: BTreeMap<i64, LambdaPoly>,
    pde: BTreeMap<u32, Rational>,
}

impl SchemeSpec {
    pub fn new(
        name: impl Into<String>,
        q: u32,
        stencil: BTreeMap<i64, LambdaPoly>,
        pde: BTreeMap<u32, Rational>,
    ) -> Result<Self, SchemeError> {
        if q == 0 {
            return Err(SchemeError::InvalidQ(0));
        }
        if stencil.values().all(Zero::is_zero) {
            return Err(SchemeError::EmptyStencil);
        }
        if let Some((&p, _)) = stencil.iter().find(|(_, b)| !b.is_real()) {
            return Err(SchemeError::ComplexWeight(p));
        }
        if pde.is_empty() || pde.keys().any(|&p| p == 0) {
            return Err(SchemeError::EmptyPde);
        }
        let total = stencil.values().fold(LambdaPoly::zero(), |acc, b| &acc + b);
        if !total.is_zero() {
            return Err(SchemeError::Inconsistent(total.to_string()));
        }
        Ok(Self { name: name.into(), q, stencil, pde })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn stencil(&self) -> &BTreeMap<i64, LambdaPoly> {
        &self.stencil
    }

    pub fn pde(&self) -> &BTreeMap<u32, Rational> {
        &self.pde
    }

    /// `A_p`, zero when the PDE has no term of that order.
    pub fn pde_coeff(&self, order: u32) -> Rational {
        self.pde.get(&order).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest PDE derivative order `P`.
    pub fn pde_order(&self) -> u32 {
        self.pde.keys().next_back().copied().unwrap_or(0)
    }

    /// `(n_l, n_r)`: cells used to the left and right of `j`.
    pub fn reach(&self) -> (i64, i64) {
        let lo = self.stencil.keys().next().copied().unwrap_or(0);
        let hi = self.stencil.keys().next_back().copied().unwrap_or(0);
        ((-lo).max(0), hi.max(0))
    }

    /// `lambda * B_p(lambda)` for each offset, evaluated exactly.
    pub fn weights_exact(&self, lambda: &Rational) -> Vec<(i64, GaussRat)> {
        self.stencil.iter().map(|(&p, b)| (p, b.eval(lambda).scale(lambda))).collect()
    }

    /// `lambda * B_p(lambda)` evaluated exactly at the dyadic value of
    /// `lambda`, then rounded once to double precision.
    pub fn weights(&self, lambda: f64) -> Vec<(i64, Complex64)> {
        match Rational::from_float(lambda) {
            Some(l) => self.weights_exact(&l).into_iter().map(|(p, w)| (p, w.to_complex())).collect(),
            None => self.stencil.keys().map(|&p| (p, Complex64::new(f64::NAN, 0.0))).collect(),
        }
    }

    /// Renders the scheme in the text format accepted by [`parse_scheme`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scheme {}", self.name);
        let _ = writeln!(out, "q = {}", self.q);
        for (order, a) in &self.pde {
            let _ = writeln!(out, "pde A[{order}] = {a}");
        }
        for (offset, b) in &self.stencil {
            let _ = writeln!(out, "stencil B[{offset}] = {}", render_poly(b));
        }
        out
    }
}

/// Writes a real polynomial using the scheme-file term grammar,
/// e.g. `-1/2 + 1/2*lambda`.
pub fn render_poly(poly: &LambdaPoly) -> String {
    let mut out = String::new();
    for (k, c) in poly.coeffs().iter().enumerate() {
        let c = &c.re;
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let var = match k {
            0 => String::new(),
            1 => "lambda".to_string(),
            _ => format!("lambda^{k}"),
        };
        match (k, mag.is_one()) {
            (0, _) => out.push_str(&mag.to_string()),
            (_, true) => out.push_str(&var),
            (_, false) => {
                let _ = write!(out, "{mag}*{var}");
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
