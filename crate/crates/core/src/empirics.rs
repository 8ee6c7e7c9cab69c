//! Runs a scheme on a periodic grid and checks the result against the symbol.
//!
//! A discrete Fourier mode `e^{2 pi i m j / M}` is an exact eigenvector of
//! any constant-coefficient stencil, so one step must multiply it by
//! `S(2 pi m / M)` up to rounding.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{rational_to_f64, Rational};
use crate::modeq::ModifiedEq;
use crate::output::fmt_float;
use crate::schemes::SchemeSpec;
use crate::spectra::{Symbol, Truncation};

pub const MIN_GRID_SIZE: usize = 4;
/// Per-point spread allowed in the one-step ratio `u'_j / u_j`.
pub const RATIO_TOL: f64 = 1e-12;
/// Amplitudes beyond this are reported as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmpiricsError {
    #[error("grid needs at least {MIN_GRID_SIZE} points, got {0}")]
    GridTooSmall(usize),
    #[error("stencil spans {width} cells but the grid has only {size}")]
    StencilTooWide { width: usize, size: usize },
    #[error("mode {mode} out of range for a grid of {size} points")]
    ModeOutOfRange { mode: usize, size: usize },
    #[error("mode {mode}: one-step ratio varies by {spread:e} across the grid")]
    NonConstantRatio { mode: usize, spread: f64 },
    #[error("truncation order {requested} exceeds the stored order {stored}")]
    TruncationTooHigh { requested: usize, stored: usize },
}

/// Periodic grid samples `u_j`, `j = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub values: Vec<Complex64>,
    pub dx: f64,
    pub lambda: f64,
}

impl GridState {
    pub fn new(values: Vec<Complex64>, dx: f64, lambda: f64) -> Result<Self, EmpiricsError> {
        if values.len() < MIN_GRID_SIZE {
            return Err(EmpiricsError::GridTooSmall(values.len()));
        }
        Ok(Self { values, dx, lambda })
    }

    /// Single Fourier mode `u_j = e^{2 pi i m j / M}`, unit spacing.
    pub fn mode(size: usize, mode: usize, lambda: f64) -> Result<Self, EmpiricsError> {
        if size < MIN_GRID_SIZE {
            return Err(EmpiricsError::GridTooSmall(size));
        }
        if mode >= size {
            return Err(EmpiricsError::ModeOutOfRange { mode, size });
        }
        let values = (0..size).map(|j| mode_value(mode, j, size)).collect();
        Ok(Self { values, dx: 1.0, lambda })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `dt = lambda dx^q`.
    pub fn dt(&self, q: u32) -> f64 {
        self.lambda * self.dx.powi(q as i32)
    }
}

/// `e^{2 pi i m j / M}` with the phase reduced exactly modulo `M` first.
fn mode_value(mode: usize, j: usize, size: usize) -> Complex64 {
    let k = (mode * j) % size;
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size as f64)
}

/// Mode `m` as an angle in `(-pi, pi]`.
pub fn mode_theta(mode: usize, size: usize) -> f64 {
    if 2 * mode <= size {
        2.0 * PI * mode as f64 / size as f64
    } else {
        -2.0 * PI * (size - mode) as f64 / size as f64
    }
}

struct Stepper {
    weights: Vec<(i64, Complex64)>,
}

impl Stepper {
    fn new(scheme: &SchemeSpec, lambda: f64, size: usize) -> Result<Self, EmpiricsError> {
        let (left, right) = scheme.reach();
        let width = (left + right) as usize;
        if width >= size {
            return Err(EmpiricsError::StencilTooWide { width, size });
        }
        Ok(Self { weights: scheme.weights(lambda) })
    }

    fn apply(&self, values: &[Complex64], out: &mut [Complex64]) {
        let m = values.len() as i64;
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = values[j];
            for &(p, w) in &self.weights {
                acc += w * values[(j as i64 + p).rem_euclid(m) as usize];
            }
            *slot = acc;
        }
    }
}

/// One time step `u_j <- u_j + lambda sum_p B_p(lambda) u_{j+p}`.
pub fn step(scheme: &SchemeSpec, state: &GridState) -> Result<GridState, EmpiricsError> {
    let stepper = Stepper::new(scheme, state.lambda, state.len())?;
    let mut next = vec![Complex64::new(0.0, 0.0); state.len()];
    stepper.apply(&state.values, &mut next);
    Ok(GridState { values: next, dx: state.dx, lambda: state.lambda })
}

/// Ratio `u'_j / u_j` after one step on mode `m` of an `M`-point grid.
pub fn measured_amplification(
    scheme: &SchemeSpec,
    lambda: f64,
    mode: usize,
    size: usize,
) -> Result<Complex64, EmpiricsError> {
    let state = GridState::mode(size, mode, lambda)?;
    let next = step(scheme, &state)?;
    let ratios: Vec<Complex64> = next.values.iter().zip(&state.values).map(|(a, b)| a / b).collect();
    let first = ratios[0];
    let spread = ratios.iter().map(|r| (r - first).norm()).fold(0.0, f64::max);
    if spread > RATIO_TOL {
        return Err(EmpiricsError::NonConstantRatio { mode, spread });
    }
    Ok(first)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveRow {
    pub mode: usize,
    pub theta: f64,
    /// `|u_0|` after the run, starting from unit amplitude.
    pub measured: f64,
    pub predicted_s: f64,
    pub predicted_sn: f64,
    /// `|predicted - measured|`, relative to the unit initial amplitude.
    pub gap_s: f64,
    pub gap_sn: f64,
    /// First step at which the amplitude exceeded [`DIVERGENCE_LIMIT`].
    pub diverged_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveTable {
    pub scheme: String,
    pub lambda: f64,
    pub order: usize,
    pub steps: usize,
    pub grid_size: usize,
    pub rows: Vec<EvolveRow>,
}

impl EvolveTable {
    pub fn max_gap_sn(&self) -> f64 {
        self.rows.iter().map(|r| r.gap_sn).fold(0.0, f64::max)
    }

    pub fn max_gap_s(&self) -> f64 {
        self.rows.iter().map(|r| r.gap_s).fold(0.0, f64::max)
    }

    pub fn diverged(&self) -> impl Iterator<Item = &EvolveRow> {
        self.rows.iter().filter(|r| r.diverged_at.is_some())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,theta,measured,predicted_S,predicted_SN,gap_S,gap_SN\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.mode,
                fmt_float(r.theta),
                fmt_float(r.measured),
                fmt_float(r.predicted_s),
                fmt_float(r.predicted_sn),
                fmt_float(r.gap_s),
                fmt_float(r.gap_sn)
            );
        }
        out
    }
}

fn evolve_mode(stepper: &Stepper, mode: usize, size: usize, steps: usize) -> (f64, Option<usize>) {
    let mut cur: Vec<Complex64> = (0..size).map(|j| mode_value(mode, j, size)).collect();
    let mut next = cur.clone();
    for n in 1..=steps {
        stepper.apply(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        let amp = cur[0].norm();
        if !amp.is_finite() || amp > DIVERGENCE_LIMIT {
            return (f64::INFINITY, Some(n));
        }
    }
    (cur[0].norm(), None)
}

/// Evolves every mode of an `M`-point grid for `steps` steps and compares
/// the final amplitude with `|S|^steps` and `|S_N|^steps`.
pub fn evolve_and_compare(
    scheme: &SchemeSpec,
    modeq: &ModifiedEq,
    lambda: &Rational,
    order: usize,
    steps: usize,
    size: usize,
) -> Result<EvolveTable, EmpiricsError> {
    if order > modeq.order() {
        return Err(EmpiricsError::TruncationTooHigh { requested: order, stored: modeq.order() });
    }
    if size < MIN_GRID_SIZE {
        return Err(EmpiricsError::GridTooSmall(size));
    }
    let lf = rational_to_f64(lambda);
    let stepper = Stepper::new(scheme, lf, size)?;
    let symbol = Symbol::exact(scheme, lambda);
    let trunc = Truncation::new(modeq, lambda, 1.0);
    let rows = (0..size)
        .into_par_iter()
        .map(|mode| {
            let theta = mode_theta(mode, size);
            let (measured, diverged_at) = evolve_mode(&stepper, mode, size, steps);
            let predicted_s = symbol.eval(theta).norm().powi(steps as i32);
            let predicted_sn = trunc.s_n(theta, order).norm().powi(steps as i32);
            EvolveRow {
                mode,
                theta,
                measured,
                predicted_s,
                predicted_sn,
                gap_s: (predicted_s - measured).abs(),
                gap_sn: (predicted_sn - measured).abs(),
                diverged_at,
            }
        })
        .collect();
    Ok(EvolveTable { scheme: scheme.name().to_string(), lambda: lf, order, steps, grid_size: size, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_rational;
    use crate::modeq::derive_log;
    use crate::schemes::catalog_entry;
    use crate::spectra::eval_symbol;

    fn scheme(name: &str) -> SchemeSpec {
        catalog_entry(name).unwrap().scheme
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_grid_unchanged() {
        for name in ["heat_centered", "upwind_euler", "lax_wendroff"] {
            let state = GridState::new(vec![c(3.5, -1.0); 10], 0.1, 0.4).unwrap();
            let next = step(&scheme(name), &state).unwrap();
            for v in &next.values {
                assert!((v - c(3.5, -1.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn heat_negates_alternating_grid() {
        let vals: Vec<_> = (0..8).map(|j| c(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let next = step(&scheme("heat_centered"), &GridState::new(vals.clone(), 1.0, 0.5).unwrap()).unwrap();
        for (a, b) in next.values.iter().zip(&vals) {
            assert_eq!(*a, -b);
        }
    }

    #[test]
    fn upwind_courant_one_shifts() {
        let vals: Vec<_> = (0..7).map(|j| c(j as f64 * j as f64, 1.0 - j as f64)).collect();
        let next = step(&scheme("upwind_euler"), &GridState::new(vals.clone(), 1.0, 1.0).unwrap()).unwrap();
        for j in 0..7 {
            assert_eq!(next.values[j], vals[(j + 6) % 7]);
        }
    }

    #[test]
    fn stencil_must_fit() {
        assert_eq!(GridState::new(vec![c(0.0, 0.0); 3], 1.0, 0.5), Err(EmpiricsError::GridTooSmall(3)));
        let err = measured_amplification(&scheme("heat_centered"), 0.5, 4, 4).unwrap_err();
        assert_eq!(err, EmpiricsError::ModeOutOfRange { mode: 4, size: 4 });
    }

    #[test]
    fn amplification_examples() {
        let heat = scheme("heat_centered");
        assert!((measured_amplification(&heat, 0.5, 0, 16).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((measured_amplification(&heat, 0.5, 4, 8).unwrap() - c(-1.0, 0.0)).norm() < 1e-12);
        let up = measured_amplification(&scheme("upwind_euler"), 0.5, 16, 64).unwrap();
        assert!((up - c(0.5, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn amplification_matches_symbol() {
        for name in ["heat_centered", "upwind_euler", "lax_wendroff"] {
            let s = scheme(name);
            for lambda in [0.125, 0.25, 0.5, 0.75, 1.0] {
                for m in 0..64 {
                    let got = measured_amplification(&s, lambda, m, 64).unwrap();
                    let want = eval_symbol(&s, lambda, mode_theta(m, 64));
                    assert!((got - want).norm() < 1e-12, "{name} {lambda} {m}");
                }
            }
        }
    }

    #[test]
    fn stability_dichotomy() {
        let heat = scheme("heat_centered");
        for m in 0..64 {
            let g = measured_amplification(&heat, 0.49, m, 64).unwrap();
            assert!(g.norm() <= 1.0 + 1e-12);
        }
        assert!(measured_amplification(&heat, 0.51, 32, 64).unwrap().norm() > 1.0);
    }

    #[test]
    fn evolve_heat_quarter() {
        let heat = scheme("heat_centered");
        let m = derive_log(&heat, 8).unwrap();
        let table = evolve_and_compare(&heat, &m, &parse_rational("1/4").unwrap(), 8, 100, 64).unwrap();
        assert!(table.max_gap_sn() < 1e-3, "{}", table.max_gap_sn());
        assert!(table.max_gap_s() < 1e-12);
        assert_eq!(table.diverged().count(), 0);
        assert!(table.to_csv().starts_with("mode,theta,measured,predicted_S,predicted_SN,gap_S,gap_SN\n"));
    }

    #[test]
    fn evolve_heat_unstable_diverges_at_pi() {
        let heat = scheme("heat_centered");
        let m = derive_log(&heat, 4).unwrap();
        let table = evolve_and_compare(&heat, &m, &parse_rational("0.6").unwrap(), 4, 3000, 16).unwrap();
        let pi_mode = &table.rows[8];
        assert_eq!(pi_mode.theta, PI);
        // 1.4^n > 1e300 first at n = 2053
        assert_eq!(pi_mode.diverged_at, Some(2053));
    }

    #[test]
    fn zero_steps_give_ones() {
        let up = scheme("upwind_euler");
        let m = derive_log(&up, 4).unwrap();
        let table = evolve_and_compare(&up, &m, &parse_rational("1/2").unwrap(), 4, 0, 8).unwrap();
        for r in &table.rows {
            assert_eq!((r.measured, r.predicted_s, r.predicted_sn), (1.0, 1.0, 1.0));
        }
    }
}
