//! Radius of convergence of `G(theta) = ln(S(theta)) / (lambda dx^q)`.
//!
//! Two independent estimates are provided: a root test that only looks at
//! the modified-equation coefficients, and a search for the complex zero of
//! the symbol `S` nearest the origin (the logarithm's branch points), which
//! never touches those coefficients. For the centered heat scheme the radius
//! is also available in closed form.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactalg::{ln_abs, rational_to_f64, Rational};
use crate::modeq::ModifiedEq;
use crate::schemes::{catalog_entry, SchemeSpec};
use crate::spectra::Symbol;

/// Smallest order accepted by [`radius_root_test`].
pub const MIN_ROOT_TEST_ORDER: usize = 16;
/// `|S(theta*)|` must be at most this at a reported zero.
pub const ZERO_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadiusError {
    #[error("root test needs at least {MIN_ROOT_TEST_ORDER} coefficients, got {0}")]
    TooFewCoefficients(usize),
    #[error("zero search needs lambda > 0, got {0}")]
    NonPositiveLambda(f64),
    #[error("zero search did not converge from any start (min |S| on the search boundary = {boundary_min:e})")]
    NoConvergence { boundary_min: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    RootTest,
    ZeroSearch,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct RadiusDiagnostics {
    /// Nonzero coefficients entering the fit (root test) or Newton starts
    /// that reached a zero (zero search).
    pub coefficients_used: usize,
    /// RMS of the log-linear fit, or `|S(theta*)|` at the reported zero.
    pub residual: f64,
    /// Located complex zero `(re, im)`.
    pub zero: Option<(f64, f64)>,
    /// Set when the radius is infinite (e.g. all error coefficients vanish).
    pub infinite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEstimate {
    #[serde(serialize_with = "finite_or_null")]
    pub value: f64,
    pub method: RadiusMethod,
    pub diagnostics: RadiusDiagnostics,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl RadiusEstimate {
    fn infinite(method: RadiusMethod, coefficients_used: usize) -> Self {
        Self {
            value: f64::INFINITY,
            method,
            diagnostics: RadiusDiagnostics { coefficients_used, infinite: true, ..Default::default() },
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.diagnostics.infinite
    }
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=n {
        let next = &row[k - 1] * BigInt::from(n + 1 - k) / BigInt::from(k);
        row.push(next);
    }
    row
}

/// Bernoulli numbers `B_n` (with `B_1 = -1/2`), computed on demand from
/// `sum_{k=0}^{n} C(n+1, k) B_k = 0` and cached.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl Default for BernoulliTable {
    fn default() -> Self {
        Self { values: vec![Rational::one()] }
    }
}

impl BernoulliTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: usize) -> Rational {
        while self.values.len() <= n {
            let m = self.values.len();
            let row = binomial_row(m + 1);
            let sum = self
                .values
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (k, b)| acc + b * Rational::from_integer(row[k].clone()));
            self.values.push(-sum / Rational::from_integer((m + 1).into()));
        }
        self.values[n].clone()
    }
}

pub fn bernoulli(n: usize) -> Rational {
    BernoulliTable::new().get(n)
}

/// `E_0(0), ..., E_n(0)` from `2 / (e^t + 1) = sum_n E_n(0) t^n / n!`, i.e.
/// `2 E_n(0) = 2 [n = 0] - sum_{k<n} C(n, k) E_k(0)`.
pub fn euler_zeros(n: usize) -> Vec<Rational> {
    let mut values: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let row = binomial_row(m);
        let sum = values
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, e)| acc + e * Rational::from_integer(row[k].clone()));
        let base = if m == 0 { Rational::from_integer(2.into()) } else { Rational::zero() };
        values.push((base - sum) / Rational::from_integer(2.into()));
    }
    values
}

/// Euler polynomial `E_n(x)` at `x = 0`.
pub fn euler_poly_at_zero(n: usize) -> Rational {
    euler_zeros(n).pop().expect("nonempty")
}

/// Root-test radius from the exact coefficients `alpha_p(lambda)`.
///
/// Zero coefficients are dropped and the remaining ones keep their true
/// index `p`; `ln |alpha_p|` is fitted by least squares against `p` over the
/// top third of the surviving error orders (`p > q`), and
/// `R = exp(-slope)`.
pub fn radius_root_test(modeq: &ModifiedEq, lambda: &Rational) -> Result<RadiusEstimate, RadiusError> {
    if modeq.order() < MIN_ROOT_TEST_ORDER {
        return Err(RadiusError::TooFewCoefficients(modeq.order()));
    }
    let q = modeq.q() as usize;
    let points: Vec<(f64, f64)> = (q + 1..=modeq.order())
        .filter_map(|p| {
            let c = modeq.coeff_at(p, lambda);
            (!c.is_zero()).then(|| (p as f64, 0.5 * ln_abs(&c.norm_sqr())))
        })
        .collect();
    let used = match points.len() {
        0 => return Ok(RadiusEstimate::infinite(RadiusMethod::RootTest, 0)),
        1 => 1,
        n => n.div_ceil(3).max(2),
    };
    let window = &points[points.len() - used..];
    let (value, residual) = if let [(p, ln_a)] = window {
        ((-ln_a / p).exp(), 0.0)
    } else {
        let (slope, intercept, rms) = least_squares(window);
        let _ = intercept;
        ((-slope).exp(), rms)
    };
    Ok(RadiusEstimate {
        value,
        method: RadiusMethod::RootTest,
        diagnostics: RadiusDiagnostics { coefficients_used: used, residual, zero: None, infinite: false },
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

const SEARCH_RE: f64 = 2.0 * PI;
const SEARCH_IM: f64 = 6.0;

fn in_rectangle(z: Complex64) -> bool {
    z.re.abs() <= SEARCH_RE + 1e-9 && z.im.abs() <= SEARCH_IM + 1e-9
}

/// Damped iteration on `S / S'` (quadratic even at repeated zeros), then a
/// polish on `S'` when the zero looks repeated, since `S` alone only pins
/// a double zero to about the square root of machine precision.
fn newton_from(symbol: &Symbol, start: Complex64) -> Option<Complex64> {
    let mut z = start;
    let (mut s, mut ds, mut dds) = symbol.eval_complex(z);
    for _ in 0..200 {
        if s.norm() < 1e-300 {
            break;
        }
        let denom = ds * ds - s * dds;
        let step = if denom.norm() > 0.0 {
            s * ds / denom
        } else if ds.norm() > 0.0 {
            s / ds
        } else {
            return None;
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-8 {
            let cand = z - step * t;
            let (cs, cds, cdds) = symbol.eval_complex(cand);
            if cs.is_finite() && cs.norm() < s.norm() {
                z = cand;
                (s, ds, dds) = (cs, cds, cdds);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || (step * t).norm() < 1e-15 * z.norm().max(1.0) {
            break;
        }
        if z.re.abs() > 4.0 * SEARCH_RE || z.im.abs() > 4.0 * SEARCH_IM {
            return None;
        }
    }
    if !s.is_finite() || s.norm() > ZERO_RESIDUAL_TOL {
        return None;
    }
    // S' also (nearly) vanishes: treat as a double zero
    if ds.norm() < 1e-6 * dds.norm().max(1.0) && dds.norm() > 0.0 {
        let mut w = z;
        for _ in 0..8 {
            let (_, dw, ddw) = symbol.eval_complex(w);
            let step = dw / ddw;
            w -= step;
            if step.norm() < 1e-16 * w.norm().max(1.0) {
                break;
            }
        }
        let (sw, _, _) = symbol.eval_complex(w);
        if sw.norm() <= ZERO_RESIDUAL_TOL && (w - z).norm() < 1e-4 {
            z = w;
        }
    }
    Some(z)
}

fn boundary_min(symbol: &Symbol) -> f64 {
    let samples = 4000;
    let mut min = f64::INFINITY;
    for k in 0..=samples {
        let t = k as f64 / samples as f64;
        let x = -SEARCH_RE + 2.0 * SEARCH_RE * t;
        let y = -SEARCH_IM + 2.0 * SEARCH_IM * t;
        for z in [
            Complex64::new(x, -SEARCH_IM),
            Complex64::new(x, SEARCH_IM),
            Complex64::new(-SEARCH_RE, y),
            Complex64::new(SEARCH_RE, y),
        ] {
            min = min.min(symbol.eval_complex(z).0.norm());
        }
    }
    min
}

/// Radius as `|theta*|` for the zero `theta*` of `S` nearest the origin
/// inside `[-2 pi, 2 pi] x [-6, 6]`. Ties go to the smaller real part, then
/// the smaller imaginary part.
pub fn radius_zero_search(scheme: &SchemeSpec, lambda: f64) -> Result<RadiusEstimate, RadiusError> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(RadiusError::NonPositiveLambda(lambda));
    }
    let symbol = Symbol::new(scheme, lambda);
    let mut zeros = Vec::new();
    for i in 0..=32 {
        for j in 0..=24 {
            let start = Complex64::new(-SEARCH_RE + i as f64 * PI / 8.0, -SEARCH_IM + j as f64 * 0.5);
            if let Some(z) = newton_from(&symbol, start) {
                if in_rectangle(z) {
                    zeros.push(z);
                }
            }
        }
    }
    if zeros.is_empty() {
        let boundary_min = boundary_min(&symbol);
        if boundary_min > 1e-6 {
            return Ok(RadiusEstimate::infinite(RadiusMethod::ZeroSearch, 0));
        }
        return Err(RadiusError::NoConvergence { boundary_min });
    }
    let found = zeros.len();
    let best = zeros
        .into_iter()
        .min_by(|a, b| {
            let (na, nb) = (a.norm(), b.norm());
            if (na - nb).abs() > 1e-9 {
                na.total_cmp(&nb)
            } else {
                a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
            }
        })
        .expect("nonempty");
    Ok(RadiusEstimate {
        value: best.norm(),
        method: RadiusMethod::ZeroSearch,
        diagnostics: RadiusDiagnostics {
            coefficients_used: found,
            residual: symbol.eval_complex(best).0.norm(),
            zero: Some((best.re, best.im)),
            infinite: false,
        },
    })
}

/// Centered heat scheme: `S = 1 - 4 lambda sin^2(theta/2)` has its first
/// real zero at `2 asin(1 / (2 sqrt(lambda)))` when `lambda >= 1/4`. Below
/// that the zeros are complex and the zero search is used instead.
pub fn heat_closed_form_radius(lambda: &Rational) -> Result<RadiusEstimate, RadiusError> {
    let quarter = Rational::new(1.into(), 4.into());
    let l = rational_to_f64(lambda);
    if *lambda < quarter {
        let heat = catalog_entry("heat_centered").expect("builtin").scheme;
        return radius_zero_search(&heat, l);
    }
    let value = 2.0 * (1.0 / (2.0 * l.sqrt())).min(1.0).asin();
    Ok(RadiusEstimate {
        value,
        method: RadiusMethod::ClosedForm,
        diagnostics: RadiusDiagnostics { zero: Some((value, 0.0)), ..Default::default() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_rational;
    use crate::modeq::derive_log;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn scheme(name: &str) -> SchemeSpec {
        catalog_entry(name).unwrap().scheme
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), r("1"));
        assert_eq!(bernoulli(1), r("-1/2"));
        assert_eq!(bernoulli(2), r("1/6"));
        assert_eq!(bernoulli(12), r("-691/2730"));
        let mut table = BernoulliTable::new();
        for p in 1..20 {
            assert!(table.get(2 * p + 1).is_zero());
        }
    }

    #[test]
    fn euler_values() {
        assert_eq!(euler_poly_at_zero(0), r("1"));
        assert_eq!(euler_poly_at_zero(1), r("-1/2"));
        assert_eq!(euler_poly_at_zero(2), r("0"));
        assert_eq!(euler_poly_at_zero(3), r("1/4"));
    }

    #[test]
    fn closed_form_values() {
        assert!((heat_closed_form_radius(&r("1/2")).unwrap().value - PI / 2.0).abs() < 1e-15);
        assert!((heat_closed_form_radius(&r("1/4")).unwrap().value - PI).abs() < 1e-15);
        let third = heat_closed_form_radius(&r("1")).unwrap();
        assert!((third.value - PI / 3.0).abs() < 1e-15);
        let search = radius_zero_search(&scheme("heat_centered"), 1.0).unwrap();
        assert!((search.value - PI / 3.0).abs() < 1e-10);
        let below = heat_closed_form_radius(&r("1/5")).unwrap();
        assert_eq!(below.method, RadiusMethod::ZeroSearch);
        assert!(below.value > PI);
    }

    #[test]
    fn zero_search_heat() {
        let half = radius_zero_search(&scheme("heat_centered"), 0.5).unwrap();
        assert!((half.value - PI / 2.0).abs() < 1e-12, "{half:?}");
        let quarter = radius_zero_search(&scheme("heat_centered"), 0.25).unwrap();
        assert!((quarter.value - PI).abs() < 1e-12, "{quarter:?}");
        assert!(quarter.diagnostics.residual <= ZERO_RESIDUAL_TOL);
    }

    #[test]
    fn zero_search_upwind() {
        // e^{-i theta} = -(1 - l)/l  =>  theta = -pi + i ln 3 at l = 1/4
        let est = radius_zero_search(&scheme("upwind_euler"), 0.25).unwrap();
        let expected = (PI * PI + 3f64.ln().powi(2)).sqrt();
        assert!((est.value - expected).abs() < 1e-12, "{est:?}");
        let (re, im) = est.diagnostics.zero.unwrap();
        assert!((re + PI).abs() < 1e-12 && (im - 3f64.ln()).abs() < 1e-12);
        let shift = radius_zero_search(&scheme("upwind_euler"), 1.0).unwrap();
        assert!(shift.is_infinite());
        assert!(radius_zero_search(&scheme("upwind_euler"), 0.0).is_err());
    }

    #[test]
    fn root_test_flags_exact_shift() {
        let m = derive_log(&scheme("upwind_euler"), 16).unwrap();
        let est = radius_root_test(&m, &r("1")).unwrap();
        assert!(est.is_infinite());
        assert_eq!(serde_json::to_value(&est).unwrap()["value"], serde_json::Value::Null);
        let short = derive_log(&scheme("upwind_euler"), 8).unwrap();
        assert_eq!(radius_root_test(&short, &r("1/2")), Err(RadiusError::TooFewCoefficients(8)));
    }

    #[test]
    fn bernoulli_euler_identity() {
        let euler = euler_zeros(30);
        let mut bern = BernoulliTable::new();
        for p in 1..=15usize {
            let rhs = -Rational::from_integer(p.into()) * &euler[2 * p - 1]
                / Rational::from_integer((BigInt::one() << (2 * p)) - 1u32);
            assert_eq!(bern.get(2 * p), rhs, "p = {p}");
        }
    }

    #[test]
    fn heat_alpha_closed_forms() {
        let m = derive_log(&scheme("heat_centered"), 24).unwrap();
        let euler = euler_zeros(23);
        let fact = crate::exactalg::factorial;
        for p in 1..=12usize {
            let sign = if p % 2 == 0 { Rational::one() } else { -Rational::one() };
            let e = &euler[2 * p - 1];
            let four_p = Rational::from_integer(BigInt::from(4).pow(p as u32));
            // lambda = 1/2: alpha = 2 a, a = -(-4)^p E_{2p-1}(0) / (2 (2p)!)
            let a_half = -(&sign * &four_p) * e / (Rational::from_integer(2.into()) * fact(2 * p));
            let alpha = m.alpha_at(2 * p, &r("1/2"));
            assert_eq!(alpha, (a_half * Rational::from_integer(2.into())).into(), "p = {p}");
            // lambda = 1/4: alpha = 4 a, a = -(-1)^p E_{2p-1}(0) / (2p)!
            let a_quarter = -(&sign) * e / fact(2 * p);
            let alpha = m.alpha_at(2 * p, &r("1/4"));
            assert_eq!(alpha, (a_quarter * Rational::from_integer(4.into())).into(), "p = {p}");
        }
    }

    #[test]
    fn root_test_matches_zero_search() {
        let heat = scheme("heat_centered");
        let m = derive_log(&heat, 40).unwrap();
        for l in ["1/4", "3/8", "1/2"] {
            let root = radius_root_test(&m, &r(l)).unwrap().value;
            let zero = radius_zero_search(&heat, rational_to_f64(&r(l))).unwrap().value;
            assert!((root - zero).abs() <= 0.05 * zero, "heat {l}: {root} vs {zero}");
        }
        let upwind = scheme("upwind_euler");
        let m = derive_log(&upwind, 40).unwrap();
        for l in ["1/4", "1/2", "3/4"] {
            let root = radius_root_test(&m, &r(l)).unwrap().value;
            let zero = radius_zero_search(&upwind, rational_to_f64(&r(l))).unwrap().value;
            assert!((root - zero).abs() <= 0.10 * zero, "upwind {l}: {root} vs {zero}");
        }
    }

    #[test]
    fn convergence_subset_implies_large_radius() {
        for (name, lambdas) in [("heat_centered", ["1/10", "1/5", "1/4"]), ("upwind_euler", ["1/5", "1/3", "1/2"])] {
            let s = scheme(name);
            // upwind coefficients oscillate; 40 terms undershoot at lambda = 1/3
            let m = derive_log(&s, 64).unwrap();
            for l in lambdas {
                let lf = rational_to_f64(&r(l));
                assert_eq!(crate::spectra::compute_theta_m(&s, lf, 4096).unwrap(), PI);
                let zero = radius_zero_search(&s, lf).unwrap().value;
                let root = radius_root_test(&m, &r(l)).unwrap().value;
                assert!(zero >= PI - 1e-12 && root >= PI - 1e-12, "{name} {l}: {zero} {root}");
            }
        }
    }
}
