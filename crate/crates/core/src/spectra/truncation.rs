use num_complex::Complex64;
use serde::Serialize;

use super::{theta_grid, SpectraError, Symbol, MIN_GRID, STABILITY_TOL};
use crate::exactalg::{rational_to_f64, Rational};
use crate::modeq::{ModeqError, ModifiedEq};
use crate::schemes::SchemeSpec;

/// Numeric view of a modified equation at fixed `lambda` and `dx`:
/// `P_N(theta) = sum_{p<=N} alpha_p theta^p` and
/// `S_N(theta) = exp(lambda dx^q P_N(theta))`.
#[derive(Debug, Clone)]
pub struct Truncation {
    /// `alphas[p]`, with `alphas[0] = 0`.
    alphas: Vec<Complex64>,
    dt: f64,
}

impl Truncation {
    pub fn new(modeq: &ModifiedEq, lambda: &Rational, dx: f64) -> Self {
        let dxq = dx.powi(modeq.q() as i32);
        let mut alphas = vec![Complex64::new(0.0, 0.0)];
        alphas.extend((1..=modeq.order()).map(|p| modeq.alpha_at(p, lambda).to_complex() / dxq));
        Self { alphas, dt: rational_to_f64(lambda) * dxq }
    }

    pub fn order(&self) -> usize {
        self.alphas.len() - 1
    }

    /// `dt = lambda dx^q`.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// `sum_{p=lo}^{hi} alpha_p theta^p` by Horner's rule.
    pub fn partial_sum(&self, theta: f64, lo: usize, hi: usize) -> Complex64 {
        let hi = hi.min(self.order());
        if lo > hi {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for p in (lo..=hi).rev() {
            acc = acc * theta + self.alphas[p];
        }
        acc * theta.powi(lo as i32)
    }

    pub fn p_n(&self, theta: f64, n: usize) -> Complex64 {
        self.partial_sum(theta, 1, n)
    }

    pub fn s_n(&self, theta: f64, n: usize) -> Complex64 {
        (self.p_n(theta, n) * self.dt).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationEval {
    pub n: usize,
    pub p_n: (f64, f64),
    pub s_n: (f64, f64),
}

impl TruncationEval {
    pub fn p_n(&self) -> Complex64 {
        Complex64::new(self.p_n.0, self.p_n.1)
    }
    pub fn s_n(&self) -> Complex64 {
        Complex64::new(self.s_n.0, self.s_n.1)
    }
}

/// `P_N` and `S_N` of the truncated modified equation at one `theta`.
pub fn truncated_amplification(
    modeq: &ModifiedEq,
    lambda: f64,
    dx: f64,
    theta: f64,
    n: usize,
) -> Result<TruncationEval, SpectraError> {
    if n > modeq.order() {
        return Err(ModeqError::TruncationTooHigh { requested: n, stored: modeq.order() }.into());
    }
    let lambda = Rational::from_float(lambda).ok_or_else(|| SpectraError::NegativeLambda(lambda.to_string()))?;
    let t = Truncation::new(modeq, &lambda, dx);
    let p = t.p_n(theta, n);
    let s = t.s_n(theta, n);
    Ok(TruncationEval { n, p_n: (p.re, p.im), s_n: (s.re, s.im) })
}

/// Inputs of [`truncation_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateParams {
    /// Truncation order `N`.
    pub n: usize,
    /// Frequency support bound `M` of the initial data (`|k| <= M`).
    pub m_support: f64,
    /// Time horizon `T`.
    pub horizon: f64,
    pub dx: f64,
    /// Order at which the full series is cut to estimate the tail; must
    /// not exceed the order of the supplied modified equation.
    pub reference_order: usize,
    pub grid: usize,
}

impl CertificateParams {
    /// Defaults: `dx = 1`, reference order `4N`, 4096 grid intervals.
    pub fn new(n: usize, m_support: f64, horizon: f64) -> Self {
        Self { n, m_support, horizon, dx: 1.0, reference_order: 4 * n, grid: super::DEFAULT_GRID }
    }
}

/// Growth bound for the scheme derived from a stable truncation.
///
/// `a_estimate` is a grid maximum of `|G_ref - P_N| / theta^(N+1)`, not a
/// proven bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub n: usize,
    pub lambda: f64,
    pub dx: f64,
    /// Smallest `C >= 0` with `|S_N| <= 1 + C dt` on the grid.
    pub c: f64,
    pub a_estimate: f64,
    pub m_support: f64,
    pub horizon: f64,
    pub reference_order: usize,
    /// `e^{C T} e^{A T dx^(N+1-q) M^(N+1) / lambda}`.
    pub bound: f64,
    pub a_is_grid_estimate: bool,
}

/// Stability certificate for the scheme from the truncated modified
/// equation, valid where the symbol's logarithm series converges.
/// Refuses when `lambda` is outside the `|1 - S| < 1` region.
pub fn truncation_certificate(
    scheme: &SchemeSpec,
    modeq: &ModifiedEq,
    lambda: &Rational,
    params: &CertificateParams,
) -> Result<StabilityCertificate, SpectraError> {
    let CertificateParams { n, m_support, horizon, dx, reference_order, grid } = *params;
    if grid < MIN_GRID {
        return Err(SpectraError::GridTooSmall(grid));
    }
    if *lambda <= Rational::from_integer(0.into()) {
        return Err(SpectraError::NonPositiveLambda(lambda.to_string()));
    }
    if reference_order <= n || reference_order > modeq.order() {
        return Err(SpectraError::ReferenceOrder { reference: reference_order, n, stored: modeq.order() });
    }
    let thetas = theta_grid(grid);
    let symbol = Symbol::exact(scheme, lambda);
    let max_one_minus_s =
        thetas.iter().map(|&t| (Complex64::new(1.0, 0.0) - symbol.eval(t)).norm()).fold(0.0, f64::max);
    if max_one_minus_s >= 1.0 - STABILITY_TOL {
        return Err(SpectraError::OutsideConvergenceSubset { lambda: lambda.to_string(), max_one_minus_s });
    }

    let trunc = Truncation::new(modeq, lambda, dx);
    let dt = trunc.dt();
    let mut c: f64 = 0.0;
    let mut a: f64 = 0.0;
    for &t in &thetas {
        let growth = trunc.s_n(t, n).norm();
        c = c.max((growth - 1.0) / dt);
        if t > 0.0 {
            let tail = trunc.partial_sum(t, n + 1, reference_order).norm();
            a = a.max(tail / t.powi(n as i32 + 1));
        }
    }
    let q = modeq.q() as i32;
    let lam = rational_to_f64(lambda);
    let exponent = if m_support == 0.0 {
        0.0
    } else {
        a * horizon * dx.powi(n as i32 + 1 - q) * m_support.powi(n as i32 + 1) / lam
    };
    let bound = (c * horizon).exp() * exponent.exp();
    Ok(StabilityCertificate {
        n,
        lambda: lam,
        dx,
        c,
        a_estimate: a,
        m_support,
        horizon,
        reference_order,
        bound,
        a_is_grid_estimate: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_rational;
    use crate::modeq::derive_log;
    use crate::schemes::catalog_entry;
    use std::f64::consts::PI;

    fn heat() -> SchemeSpec {
        catalog_entry("heat_centered").unwrap().scheme
    }

    #[test]
    fn second_order_heat_truncation_at_pi() {
        // P_2 = -theta^2, lambda dx^q = 1/4
        let m = derive_log(&heat(), 8).unwrap();
        let e = truncated_amplification(&m, 0.25, 1.0, PI, 2).unwrap();
        assert!((e.s_n().norm() - (-PI * PI / 4.0).exp()).abs() < 1e-15);
        assert!((e.s_n().norm() - 0.0848).abs() < 1e-3);
        assert!((e.s_n().norm() - (e.p_n().re * 0.25).exp()).abs() < 1e-15);
    }

    #[test]
    fn truncation_is_one_at_zero() {
        let m = derive_log(&catalog_entry("lax_wendroff").unwrap().scheme, 6).unwrap();
        let e = truncated_amplification(&m, 0.7, 0.01, 0.0, 6).unwrap();
        assert_eq!(e.s_n(), Complex64::new(1.0, 0.0));
        assert!(truncated_amplification(&m, 0.7, 1.0, 0.3, 7).is_err());
    }

    #[test]
    fn dx_cancels_in_amplification() {
        let m = derive_log(&heat(), 8).unwrap();
        let a = truncated_amplification(&m, 0.25, 1.0, 1.3, 8).unwrap().s_n();
        let b = truncated_amplification(&m, 0.25, 0.01, 1.3, 8).unwrap().s_n();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn certificate_inside_convergence_region() {
        let m = derive_log(&heat(), 16).unwrap();
        let lambda = parse_rational("1/5").unwrap();
        let cert = truncation_certificate(&heat(), &m, &lambda, &CertificateParams::new(4, PI, 1.0)).unwrap();
        assert_eq!(cert.c, 0.0);
        assert!(cert.bound.is_finite() && cert.bound >= 1.0);
        assert!(cert.a_estimate > 0.0);

        let zero_support = CertificateParams { m_support: 0.0, ..CertificateParams::new(4, PI, 1.0) };
        let cert = truncation_certificate(&heat(), &m, &lambda, &zero_support).unwrap();
        assert_eq!(cert.bound, (cert.c * cert.horizon).exp());
    }

    #[test]
    fn certificate_refused_outside() {
        let m = derive_log(&heat(), 16).unwrap();
        let lambda = parse_rational("0.6").unwrap();
        let err = truncation_certificate(&heat(), &m, &lambda, &CertificateParams::new(4, PI, 1.0));
        assert!(matches!(err, Err(SpectraError::OutsideConvergenceSubset { .. })));
        let short = derive_log(&heat(), 8).unwrap();
        let err = truncation_certificate(
            &heat(),
            &short,
            &parse_rational("0.2").unwrap(),
            &CertificateParams::new(4, PI, 1.0),
        );
        assert!(matches!(err, Err(SpectraError::ReferenceOrder { .. })));
    }
}
