use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::truncation::Truncation;
use super::{theta_grid, theta_m_of, SpectraError, Symbol, MIN_GRID, STABILITY_TOL};
use crate::exactalg::{rational_to_f64, Rational};
use crate::modeq::{derive_log, ModifiedEq};
use crate::schemes::SchemeSpec;

/// `count` equally spaced exact samples from `lo` to `hi` inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaRange {
    pub lo: Rational,
    pub hi: Rational,
    pub count: usize,
}

impl LambdaRange {
    pub fn new(lo: Rational, hi: Rational, count: usize) -> Result<Self, SpectraError> {
        if lo < Rational::from_integer(0.into()) {
            return Err(SpectraError::InvalidRange(format!("lower end {lo} is negative")));
        }
        if lo >= hi {
            return Err(SpectraError::InvalidRange(format!("empty range {lo}..{hi}")));
        }
        if count < 2 {
            return Err(SpectraError::InvalidRange(format!("need at least 2 samples, got {count}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn step(&self) -> Rational {
        (&self.hi - &self.lo) / Rational::from_integer((self.count - 1).into())
    }

    pub fn samples(&self) -> Vec<Rational> {
        let step = self.step();
        (0..self.count).map(|k| &self.lo + &step * Rational::from_integer(k.into())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSample {
    pub lambda: f64,
    pub lambda_exact: String,
    pub max_abs_s: f64,
    pub max_abs_one_minus_s: f64,
    pub theta_m: f64,
    pub in_rs: bool,
    pub in_omega_c: bool,
    /// `Re P_N <= tol` on the grid, per truncation order.
    pub trunc_stable: BTreeMap<usize, bool>,
    /// Smallest `C >= 0` with `|S_N| <= 1 + C dt` on the grid (`dx = 1`).
    pub trunc_growth: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub scheme: String,
    pub grid: usize,
    pub tolerance: f64,
    pub samples: Vec<RegionSample>,
    /// Last sample of the leading run of Von Neumann stable samples.
    pub rs_boundary: Option<f64>,
    /// Last sample of the leading run with `|1 - S| < 1` everywhere.
    pub omega_c_boundary: Option<f64>,
    pub trunc_boundary: BTreeMap<usize, Option<f64>>,
}

impl RegionReport {
    pub fn to_csv(&self) -> String {
        use crate::output::fmt_float;
        let orders: Vec<usize> = self.trunc_boundary.keys().copied().collect();
        let mut out = String::from("lambda,max_abs_S,max_abs_one_minus_S,theta_m,in_Rs,in_Omega_c");
        for n in &orders {
            out.push_str(&format!(",trunc_stable_N{n},trunc_growth_N{n}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{}",
                fmt_float(s.lambda),
                fmt_float(s.max_abs_s),
                fmt_float(s.max_abs_one_minus_s),
                fmt_float(s.theta_m),
                s.in_rs,
                s.in_omega_c
            ));
            for n in &orders {
                out.push_str(&format!(",{},{}", s.trunc_stable[n], fmt_float(s.trunc_growth[n])));
            }
            out.push('\n');
        }
        out
    }
}

fn leading_boundary(samples: &[RegionSample], pred: impl Fn(&RegionSample) -> bool) -> Option<f64> {
    samples.iter().take_while(|s| pred(s)).last().map(|s| s.lambda)
}

fn classify(
    scheme: &SchemeSpec,
    modeq: Option<&ModifiedEq>,
    lambda: &Rational,
    thetas: &[f64],
    orders: &[usize],
) -> RegionSample {
    let symbol = Symbol::exact(scheme, lambda);
    let one = Complex64::new(1.0, 0.0);
    let (mut max_s, mut max_one_minus): (f64, f64) = (0.0, 0.0);
    for &t in thetas {
        let s = symbol.eval(t);
        max_s = max_s.max(s.norm());
        max_one_minus = max_one_minus.max((one - s).norm());
    }
    let mut trunc_stable = BTreeMap::new();
    let mut trunc_growth = BTreeMap::new();
    if let Some(modeq) = modeq {
        let trunc = Truncation::new(modeq, lambda, 1.0);
        for &n in orders {
            let mut max_re = f64::NEG_INFINITY;
            let mut max_growth: f64 = 0.0;
            for &t in thetas {
                let p = trunc.p_n(t, n);
                max_re = max_re.max(p.re);
                max_growth = max_growth.max((p * trunc.dt()).exp().norm());
            }
            trunc_stable.insert(n, max_re <= STABILITY_TOL);
            let c = if max_growth <= 1.0 {
                0.0
            } else if trunc.dt() > 0.0 {
                (max_growth - 1.0) / trunc.dt()
            } else {
                f64::INFINITY
            };
            trunc_growth.insert(n, c);
        }
    }
    RegionSample {
        lambda: rational_to_f64(lambda),
        lambda_exact: lambda.to_string(),
        max_abs_s: max_s,
        max_abs_one_minus_s: max_one_minus,
        theta_m: theta_m_of(&symbol, thetas),
        in_rs: max_s <= 1.0 + STABILITY_TOL,
        in_omega_c: max_one_minus < 1.0 - STABILITY_TOL,
        trunc_stable,
        trunc_growth,
    }
}

/// Classifies each `lambda` sample: Von Neumann stability, membership of
/// the `|1 - S| < 1` region, and stability of each requested truncation.
/// Samples are processed in parallel; the report keeps them in `lambda`
/// order.
pub fn region_scan(
    scheme: &SchemeSpec,
    range: &LambdaRange,
    grid: usize,
    orders: &[usize],
) -> Result<RegionReport, SpectraError> {
    if grid < MIN_GRID {
        return Err(SpectraError::GridTooSmall(grid));
    }
    let modeq = match orders.iter().max() {
        Some(&n) => Some(derive_log(scheme, n.max(1))?),
        None => None,
    };
    let thetas = theta_grid(grid);
    let samples: Vec<RegionSample> =
        range.samples().par_iter().map(|l| classify(scheme, modeq.as_ref(), l, &thetas, orders)).collect();
    let trunc_boundary = orders.iter().map(|&n| (n, leading_boundary(&samples, |s| s.trunc_stable[&n]))).collect();
    Ok(RegionReport {
        scheme: scheme.name().to_string(),
        grid,
        tolerance: STABILITY_TOL,
        rs_boundary: leading_boundary(&samples, |s| s.in_rs),
        omega_c_boundary: leading_boundary(&samples, |s| s.in_omega_c),
        samples,
        trunc_boundary,
    })
}
