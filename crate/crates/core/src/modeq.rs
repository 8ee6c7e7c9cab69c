//! Modified equations `u_t = sum_p mu_p d^p u / dx^p`.
//!
//! Two independent engines produce the coefficients:
//!
//! * [`derive_log`] takes the logarithm of the Fourier symbol's Taylor
//!   series, since `exp(dt G) = S` with `G(theta) = sum_p alpha_p theta^p`.
//! * [`derive_elimination`] solves `sum_{m>=1} D^m / m! = S - 1` for
//!   `D = dt G` one order at a time, which is the constant-coefficient
//!   elimination of time derivatives carried out in Fourier variables.
//!
//! With `dx = 1`, each result is stored as `c_p` where
//! `mu_p = c_p dx^(p-q)` and `alpha_p = c_p i^p / dx^q`.

use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{factorial, AlgebraError, GaussRat, LambdaPoly, Rational, ThetaSeries};
use crate::schemes::SchemeSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModeqError {
    #[error("series order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("coefficient of theta^{p} is not divisible by lambda: {poly}")]
    InexactLambdaDivision { p: usize, poly: String },
    #[error("mu_{p} has a nonzero imaginary part {imag} for a real stencil")]
    NonReal { p: usize, imag: String },
    #[error("modified equation order {order} is below the PDE order {pde_order}")]
    OrderTooLow { order: usize, pde_order: u32 },
    #[error("scheme is not consistent with its PDE at p={p}: residual {residual}")]
    ConsistencyFailure { p: usize, residual: String },
    #[error("requested truncation {requested} exceeds stored order {stored}")]
    TruncationTooHigh { requested: usize, stored: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModTerm {
    pub p: usize,
    /// `c_p`; `mu_p = c_p dx^grading`.
    pub coeff: LambdaPoly,
    /// `p - q`.
    pub grading: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifiedEq {
    scheme_name: String,
    q: u32,
    terms: Vec<ModTerm>,
}

impl ModifiedEq {
    pub fn scheme_name(&self) -> &str {
        &self.scheme_name
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// Terms for `p = 1..=N`, in order.
    pub fn terms(&self) -> &[ModTerm] {
        &self.terms
    }

    pub fn term(&self, p: usize) -> Option<&ModTerm> {
        p.checked_sub(1).and_then(|k| self.terms.get(k))
    }

    /// `c_p` evaluated at a rational `lambda`.
    pub fn coeff_at(&self, p: usize, lambda: &Rational) -> GaussRat {
        self.term(p).map_or_else(GaussRat::zero, |t| t.coeff.eval(lambda))
    }

    /// `alpha_p(lambda)` for `dx = 1`, i.e. `c_p(lambda) i^p`.
    pub fn alpha_at(&self, p: usize, lambda: &Rational) -> GaussRat {
        &self.coeff_at(p, lambda) * &GaussRat::i_pow(p as i64)
    }

    /// The same equation cut at a lower order.
    pub fn truncated(&self, order: usize) -> Result<ModifiedEq, ModeqError> {
        if order > self.order() {
            return Err(ModeqError::TruncationTooHigh { requested: order, stored: self.order() });
        }
        Ok(ModifiedEq { terms: self.terms[..order].to_vec(), ..self.clone() })
    }

    /// `lambda * sum_p alpha_p theta^p` as an exact series in `theta` with
    /// symbolic `lambda`; its exponential is the symbol's Taylor series.
    pub fn log_symbol_series(&self) -> ThetaSeries {
        let mut coeffs = vec![LambdaPoly::zero()];
        for t in &self.terms {
            coeffs.push(t.coeff.scale(&GaussRat::i_pow(t.p as i64)).mul_lambda());
        }
        ThetaSeries::from_coeffs(coeffs).expect("nonempty")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl Serialize for ModifiedEq {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            p: usize,
            grading: i64,
            coeff: String,
        }
        let terms: Vec<Term> =
            self.terms.iter().map(|t| Term { p: t.p, grading: t.grading, coeff: t.coeff.to_string() }).collect();
        let mut s = serializer.serialize_struct("ModifiedEq", 4)?;
        s.serialize_field("scheme", &self.scheme_name)?;
        s.serialize_field("N", &self.order())?;
        s.serialize_field("q", &self.q)?;
        s.serialize_field("terms", &terms)?;
        s.end()
    }
}

/// Taylor series of the symbol `S(theta) = 1 + lambda sum_p B_p e^{i p theta}`
/// through `theta^order`, with `lambda` kept symbolic.
pub fn symbol_series(scheme: &SchemeSpec, order: usize) -> Result<ThetaSeries, ModeqError> {
    if order == 0 {
        return Err(ModeqError::InvalidOrder(order));
    }
    let mut coeffs = vec![LambdaPoly::one()];
    for r in 1..=order {
        let inv_fact = factorial(r).recip();
        let mut acc = LambdaPoly::zero();
        for (&p, b) in scheme.stencil() {
            if p == 0 || b.is_zero() {
                continue;
            }
            // (i p)^r / r!
            let pr = Rational::from_integer(num_bigint::BigInt::from(p).pow(r as u32));
            let factor = GaussRat::i_pow(r as i64).scale(&(pr * &inv_fact));
            acc = &acc + &b.scale(&factor);
        }
        coeffs.push(acc.mul_lambda());
    }
    Ok(ThetaSeries::from_coeffs(coeffs)?)
}

/// Turns `[theta^p] log S` into the stored `c_p`.
fn assemble(
    scheme: &SchemeSpec,
    log_coeffs: impl IntoIterator<Item = (usize, LambdaPoly)>,
) -> Result<ModifiedEq, ModeqError> {
    let q = scheme.q();
    let mut terms = Vec::new();
    for (p, d) in log_coeffs {
        let over_lambda = d.div_lambda().ok_or_else(|| ModeqError::InexactLambdaDivision { p, poly: d.to_string() })?;
        let coeff = over_lambda.scale(&GaussRat::i_pow(-(p as i64)));
        if !coeff.is_real() {
            return Err(ModeqError::NonReal { p, imag: coeff.imag_part().to_string() });
        }
        terms.push(ModTerm { p, coeff, grading: p as i64 - i64::from(q) });
    }
    Ok(ModifiedEq { scheme_name: scheme.name().to_string(), q, terms })
}

/// Modified equation from the logarithm of the symbol series.
pub fn derive_log(scheme: &SchemeSpec, order: usize) -> Result<ModifiedEq, ModeqError> {
    let log = symbol_series(scheme, order)?.log()?;
    assemble(scheme, (1..=order).map(|p| (p, log.coeff(p).clone())))
}

/// Modified equation by order-by-order elimination.
///
/// With `Q = S - 1` and unknown `D = sum d_p theta^p`, the order-`p` part of
/// `sum_{m>=1} D^m/m! = Q` reads `d_p + sum_{m>=2} [theta^p] D^m / m! = q_p`,
/// and `[theta^p] D^m` for `m >= 2` involves only `d_1..d_{p-1}`.
pub fn derive_elimination(scheme: &SchemeSpec, order: usize) -> Result<ModifiedEq, ModeqError> {
    let symbol = symbol_series(scheme, order)?;
    let n = order;
    // powers[m][k] = [theta^k] D^m
    let mut powers = vec![vec![LambdaPoly::zero(); n + 1]; n + 1];
    let inv_fact: Vec<Rational> = (0..=n).map(|m| factorial(m).recip()).collect();
    for p in 1..=n {
        let mut higher = LambdaPoly::zero();
        for m in 2..=p {
            let mut acc = LambdaPoly::zero();
            for j in 1..=(p + 1 - m) {
                let (d, prev) = (&powers[1][j], &powers[m - 1][p - j]);
                if !d.is_zero() && !prev.is_zero() {
                    acc = &acc + &(d * prev);
                }
            }
            higher = &higher + &acc.scale_rational(&inv_fact[m]);
            powers[m][p] = acc;
        }
        powers[1][p] = symbol.coeff(p) - &higher;
    }
    let d = std::mem::take(&mut powers[1]);
    assemble(scheme, d.into_iter().enumerate().skip(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub scheme: String,
    /// PDE orders whose coefficient was matched exactly by `mu_p = -A_p`.
    pub verified_orders: Vec<u32>,
    /// Smallest positive `dx` power among the nonzero error terms.
    pub leading_error_grading: Option<i64>,
}

/// Checks that the modified equation reduces to the declared PDE as
/// `dx -> 0` at fixed `lambda`.
pub fn consistency_report(scheme: &SchemeSpec, modeq: &ModifiedEq) -> Result<ConsistencyReport, ModeqError> {
    let pde_order = scheme.pde_order();
    if modeq.order() < pde_order as usize {
        return Err(ModeqError::OrderTooLow { order: modeq.order(), pde_order });
    }
    let mut verified = Vec::new();
    let mut leading = None;
    for t in modeq.terms() {
        let a = scheme.pde_coeff(t.p as u32);
        match t.grading {
            g if g < 0 => {
                // a PDE term of order below q has no dx-free counterpart
                let residual = &t.coeff + &LambdaPoly::constant(GaussRat::real(a.clone()));
                if !t.coeff.is_zero() || !a.is_zero() {
                    return Err(ModeqError::ConsistencyFailure { p: t.p, residual: residual.to_string() });
                }
            }
            0 => {
                let residual = &t.coeff + &LambdaPoly::constant(GaussRat::real(a.clone()));
                if !residual.is_zero() {
                    return Err(ModeqError::ConsistencyFailure { p: t.p, residual: residual.to_string() });
                }
                if !a.is_zero() {
                    verified.push(t.p as u32);
                }
            }
            g => {
                if !a.is_zero() {
                    return Err(ModeqError::ConsistencyFailure {
                        p: t.p,
                        residual: format!("A_{} = {a} has no dx-free counterpart", t.p),
                    });
                }
                if leading.is_none() && !t.coeff.is_zero() {
                    leading = Some(g);
                }
            }
        }
    }
    Ok(ConsistencyReport {
        scheme: scheme.name().to_string(),
        verified_orders: verified,
        leading_error_grading: leading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{builtin_catalog, catalog_entry, parse_poly, parse_scheme};

    fn scheme(name: &str) -> SchemeSpec {
        catalog_entry(name).unwrap().scheme
    }

    #[test]
    fn heat_symbol_second_order() {
        // sum_p B_p p^2 = 2, times lambda (i)^2 / 2! = -lambda
        let s = symbol_series(&scheme("heat_centered"), 2).unwrap();
        assert_eq!(s.coeff(0), &LambdaPoly::one());
        assert!(s.coeff(1).is_zero());
        assert_eq!(s.coeff(2), &-LambdaPoly::lambda());
    }

    #[test]
    fn upwind_symbol_first_order() {
        let s = symbol_series(&scheme("upwind_euler"), 1).unwrap();
        assert_eq!(s.coeff(1), &LambdaPoly::monomial(-GaussRat::i(), 1));
        assert_eq!(symbol_series(&scheme("upwind_euler"), 0), Err(ModeqError::InvalidOrder(0)));
    }

    #[test]
    fn constant_term_is_one_for_every_catalog_scheme() {
        for e in builtin_catalog() {
            assert!(symbol_series(&e.scheme, 5).unwrap().coeff(0).is_one());
        }
    }

    #[test]
    fn golden_tables() {
        for e in builtin_catalog() {
            let Some(golden) = e.expected else { continue };
            let n = golden.mu.iter().map(|(p, _)| *p).max().unwrap();
            let m = derive_log(&e.scheme, n).unwrap();
            for (p, mu) in golden.mu {
                assert_eq!(&m.term(p).unwrap().coeff, &mu, "{} p={p}", e.scheme.name());
            }
        }
    }

    #[test]
    fn heat_odd_terms_vanish() {
        let m = derive_log(&scheme("heat_centered"), 9).unwrap();
        for t in m.terms().iter().filter(|t| t.p % 2 == 1) {
            assert!(t.coeff.is_zero());
        }
        let gradings: Vec<i64> = m.terms().iter().map(|t| t.grading).collect();
        assert_eq!(gradings, (-1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn elimination_first_order_upwind() {
        let m = derive_elimination(&scheme("upwind_euler"), 1).unwrap();
        assert_eq!(m.term(1).unwrap().coeff, LambdaPoly::from_int(-1));
    }

    #[test]
    fn engines_agree_on_catalog() {
        for e in builtin_catalog() {
            assert_eq!(derive_log(&e.scheme, 9).unwrap(), derive_elimination(&e.scheme, 9).unwrap());
        }
    }

    #[test]
    fn exp_of_modified_equation_rebuilds_symbol() {
        for e in builtin_catalog() {
            let m = derive_log(&e.scheme, 10).unwrap();
            let rebuilt = m.log_symbol_series().exp().unwrap();
            assert_eq!(rebuilt, symbol_series(&e.scheme, 10).unwrap());
        }
    }

    #[test]
    fn consistency_reports() {
        let heat = scheme("heat_centered");
        let r = consistency_report(&heat, &derive_log(&heat, 6).unwrap()).unwrap();
        assert_eq!(r.verified_orders, vec![2]);
        assert_eq!(r.leading_error_grading, Some(2));

        let up = scheme("upwind_euler");
        let r = consistency_report(&up, &derive_log(&up, 4).unwrap()).unwrap();
        assert_eq!(r.verified_orders, vec![1]);
        assert_eq!(r.leading_error_grading, Some(1));

        let lw = scheme("lax_wendroff");
        let r = consistency_report(&lw, &derive_log(&lw, 4).unwrap()).unwrap();
        assert_eq!(r.leading_error_grading, Some(2));
    }

    #[test]
    fn wrong_pde_sign_fails_at_first_order() {
        let text = scheme("upwind_euler").render().replace("A[1] = 1", "A[1] = -1");
        let bad = parse_scheme(&text).unwrap();
        let m = derive_log(&bad, 3).unwrap();
        match consistency_report(&bad, &m) {
            Err(ModeqError::ConsistencyFailure { p, residual }) => {
                assert_eq!(p, 1);
                assert_eq!(residual, "-2");
            }
            other => panic!("{other:?}"),
        }
        let heat = scheme("heat_centered");
        let m = derive_log(&heat, 1).unwrap();
        assert!(matches!(consistency_report(&heat, &m), Err(ModeqError::OrderTooLow { .. })));
    }

    #[test]
    fn json_layout() {
        let m = derive_log(&scheme("heat_centered"), 4).unwrap();
        let v = m.to_json();
        assert_eq!(v["scheme"], "heat_centered");
        assert_eq!(v["N"], 4);
        assert_eq!(v["q"], 2);
        assert_eq!(v["terms"][3]["p"], 4);
        assert_eq!(v["terms"][3]["grading"], 2);
        assert_eq!(v["terms"][3]["coeff"], "(1-6*lambda)/12");
        assert_eq!(v["terms"][0]["coeff"], "0");
    }

    #[test]
    fn lambda_zero_limit_is_well_defined() {
        let m = derive_log(&scheme("heat_centered"), 6).unwrap();
        let zero = Rational::zero();
        assert_eq!(m.coeff_at(4, &zero), GaussRat::real(parse_poly("1/12").unwrap().coeff(0).re));
    }

    #[test]
    fn truncation_bounds() {
        let m = derive_log(&scheme("upwind_euler"), 4).unwrap();
        assert_eq!(m.truncated(2).unwrap().order(), 2);
        assert!(m.truncated(5).is_err());
    }
}
