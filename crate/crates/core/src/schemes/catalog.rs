//! Builtin schemes.
//!
//! `heat_centered` and `upwind_euler` carry golden reference data (the
//! modified-equation coefficients and the stability / log-convergence bounds
//! on `lambda`). `lax_wendroff` has lambda-dependent weights and serves as a
//! stress case without golden data.

use std::collections::BTreeMap;

use super::parser::parse_poly;
use super::SchemeSpec;
use crate::exactalg::{parse_rational, LambdaPoly, Rational};

/// Reference values a catalog scheme must reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Golden {
    /// `(p, mu_p)` with `mu_p` written as a polynomial in `lambda`
    /// (`dx` factored out as `dx^(p-q)`).
    pub mu: Vec<(usize, LambdaPoly)>,
    /// Von Neumann stability holds for `0 <= lambda <= rs_bound`.
    pub rs_bound: Rational,
    /// `|1 - S| < 1` on `[-pi, pi]` holds for `lambda` below this bound.
    pub omega_c_bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub scheme: SchemeSpec,
    pub expected: Option<Golden>,
}

fn poly(text: &str) -> LambdaPoly {
    parse_poly(text).expect("catalog polynomial")
}

fn rat(text: &str) -> Rational {
    parse_rational(text).expect("catalog rational")
}

fn build(name: &str, q: u32, stencil: &[(i64, &str)], pde: &[(u32, &str)]) -> SchemeSpec {
    let stencil = stencil.iter().map(|&(p, b)| (p, poly(b))).collect::<BTreeMap<_, _>>();
    let pde = pde.iter().map(|&(p, a)| (p, rat(a))).collect::<BTreeMap<_, _>>();
    SchemeSpec::new(name, q, stencil, pde).expect("catalog scheme is consistent")
}

fn heat_centered() -> CatalogEntry {
    // u_t - u_xx = 0 with the symmetric three-point Laplacian.
    let scheme = build("heat_centered", 2, &[(-1, "1"), (0, "-2"), (1, "1")], &[(2, "-1")]);
    let mu = vec![
        (2, poly("1")),
        (4, poly("1/12 - 1/2*lambda")),
        (6, poly("1/360 - 1/12*lambda + 1/3*lambda^2")),
        (8, poly("1/20160 - 1/160*lambda + 1/12*lambda^2 - 1/4*lambda^3")),
    ];
    CatalogEntry { scheme, expected: Some(Golden { mu, rs_bound: rat("1/2"), omega_c_bound: rat("1/4") }) }
}

fn upwind_euler() -> CatalogEntry {
    // u_t + u_x = 0, one-sided difference from the left.
    let scheme = build("upwind_euler", 1, &[(-1, "1"), (0, "-1")], &[(1, "1")]);
    let mu = vec![
        (1, poly("-1")),
        (2, poly("1/2 - 1/2*lambda")),
        (3, poly("-1/6 + 1/2*lambda - 1/3*lambda^2")),
        (4, poly("1/24 - 7/24*lambda + 1/2*lambda^2 - 1/4*lambda^3")),
    ];
    CatalogEntry { scheme, expected: Some(Golden { mu, rs_bound: rat("1"), omega_c_bound: rat("1/2") }) }
}

fn lax_wendroff() -> CatalogEntry {
    let scheme =
        build("lax_wendroff", 1, &[(-1, "1/2 + 1/2*lambda"), (0, "-lambda"), (1, "-1/2 + 1/2*lambda")], &[(1, "1")]);
    CatalogEntry { scheme, expected: None }
}

pub fn builtin_catalog() -> Vec<CatalogEntry> {
    vec![heat_centered(), upwind_euler(), lax_wendroff()]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    builtin_catalog().into_iter().find(|e| e.scheme.name() == name)
}
