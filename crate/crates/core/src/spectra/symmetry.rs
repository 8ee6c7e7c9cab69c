//! Reflection symmetry of the upwind scheme about `lambda = 1/2`:
//! `S(theta, 1/2 + l) = e^{-i theta} conj(S(theta, 1/2 - l))`, so the moduli
//! agree and so do `lambda * Re G` and its even coefficients.

use serde::Serialize;

use super::{theta_grid, SpectraError, Symbol, MIN_GRID};
use crate::exactalg::Rational;
use crate::modeq::derive_log;
use crate::schemes::catalog_entry;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientPair {
    /// Even index `2p`.
    pub index: usize,
    /// `(1/2 - l) Re alpha_{2p}(1/2 - l)`, exact.
    pub below: String,
    /// `(1/2 + l) Re alpha_{2p}(1/2 + l)`, exact.
    pub above: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub offset: String,
    pub lambda_below: String,
    pub lambda_above: String,
    pub grid: usize,
    pub max_modulus_gap: f64,
    pub coefficients: Vec<CoefficientPair>,
}

pub const MODULUS_TOL: f64 = 1e-12;

/// Checks `|S(theta, 1/2 - l)| = |S(theta, 1/2 + l)|` on a grid and the
/// matching exact identity between even modified-equation coefficients for
/// `2p <= order`.
pub fn upwind_symmetry_check(offset: &Rational, order: usize, grid: usize) -> Result<SymmetryReport, SpectraError> {
    let half = Rational::new(1.into(), 2.into());
    let zero = Rational::from_integer(0.into());
    if *offset < zero || *offset > half {
        return Err(SpectraError::SymmetryRange(offset.to_string()));
    }
    if grid < MIN_GRID {
        return Err(SpectraError::GridTooSmall(grid));
    }
    let scheme = catalog_entry("upwind_euler").expect("builtin").scheme;
    let below = &half - offset;
    let above = &half + offset;

    let (s_below, s_above) = (Symbol::exact(&scheme, &below), Symbol::exact(&scheme, &above));
    let mut max_gap: f64 = 0.0;
    for t in theta_grid(grid) {
        let gap = (s_below.eval(t).norm() - s_above.eval(t).norm()).abs();
        if gap > MODULUS_TOL {
            return Err(SpectraError::SymmetryViolation(format!("theta = {t} (gap {gap:e})")));
        }
        max_gap = max_gap.max(gap);
    }

    let modeq = derive_log(&scheme, order.max(1))?;
    let mut coefficients = Vec::new();
    for index in (2..=order).step_by(2) {
        let lhs = &below * &modeq.alpha_at(index, &below).re;
        let rhs = &above * &modeq.alpha_at(index, &above).re;
        if lhs != rhs {
            return Err(SpectraError::SymmetryViolation(format!("alpha_{index}: {lhs} != {rhs}")));
        }
        coefficients.push(CoefficientPair { index, below: lhs.to_string(), above: rhs.to_string() });
    }
    Ok(SymmetryReport {
        offset: offset.to_string(),
        lambda_below: below.to_string(),
        lambda_above: above.to_string(),
        grid,
        max_modulus_gap: max_gap,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_rational;

    #[test]
    fn quarter_offset_exact() {
        let r = upwind_symmetry_check(&parse_rational("1/4").unwrap(), 8, 4096).unwrap();
        assert_eq!(r.lambda_below, "1/4");
        assert_eq!(r.lambda_above, "3/4");
        assert_eq!(r.coefficients.len(), 4);
        assert!(r.max_modulus_gap <= 1e-12);
    }

    #[test]
    fn fixed_point_and_extremes() {
        let r = upwind_symmetry_check(&parse_rational("0").unwrap(), 6, 256).unwrap();
        assert_eq!(r.max_modulus_gap, 0.0);
        // lambda 0 vs 1: S = 1 and S = e^{-i theta}
        let r = upwind_symmetry_check(&parse_rational("1/2").unwrap(), 6, 256).unwrap();
        assert!(r.coefficients.iter().all(|c| c.below == "0" && c.above == "0"));
    }

    #[test]
    fn out_of_range() {
        assert!(upwind_symmetry_check(&parse_rational("0.6").unwrap(), 4, 256).is_err());
        assert!(upwind_symmetry_check(&parse_rational("-0.1").unwrap(), 4, 256).is_err());
    }
}
