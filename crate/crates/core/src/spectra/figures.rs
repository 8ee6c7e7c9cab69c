use serde::Serialize;

use super::truncation::Truncation;
use super::{theta_grid, SpectraError, Symbol};
use crate::exactalg::{rational_to_f64, Rational};
use crate::modeq::derive_log;
use crate::output::{fmt_float, lambda_label};
use crate::schemes::SchemeSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub theta: f64,
    pub abs_s: f64,
    /// `|S_N|` for each requested `N`, in request order.
    pub abs_s_n: Vec<f64>,
}

/// `|S|` against `|S_N|` over `theta in [0, pi]` for one `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub scheme: String,
    pub lambda: f64,
    pub lambda_label: String,
    pub orders: Vec<usize>,
    pub rows: Vec<FigureRow>,
}

impl FigureTable {
    /// `<scheme>_lambda<value>.csv`
    pub fn file_name(&self) -> String {
        format!("{}_lambda{}.csv", self.scheme, self.lambda_label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,abs_S");
        for n in &self.orders {
            out.push_str(&format!(",abs_S_N{n}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&fmt_float(row.theta));
            out.push(',');
            out.push_str(&fmt_float(row.abs_s));
            for v in &row.abs_s_n {
                out.push(',');
                out.push_str(&fmt_float(*v));
            }
            out.push('\n');
        }
        out
    }

    /// `max_theta | |S_N| - |S| |` over rows with `theta` in `[lo, hi]`,
    /// for the `k`-th requested order.
    pub fn max_gap(&self, k: usize, lo: f64, hi: f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.theta >= lo && r.theta <= hi)
            .map(|r| (r.abs_s_n[k] - r.abs_s).abs())
            .fold(0.0, f64::max)
    }
}

pub fn figure_data(
    scheme: &SchemeSpec,
    lambdas: &[Rational],
    orders: &[usize],
    grid: usize,
) -> Result<Vec<FigureTable>, SpectraError> {
    if lambdas.is_empty() {
        return Ok(Vec::new());
    }
    if grid < super::MIN_GRID {
        return Err(SpectraError::GridTooSmall(grid));
    }
    let modeq = derive_log(scheme, orders.iter().copied().max().unwrap_or(1).max(1))?;
    let thetas = theta_grid(grid);
    let mut tables = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        if *lambda < Rational::from_integer(0.into()) {
            return Err(SpectraError::NegativeLambda(lambda.to_string()));
        }
        let symbol = Symbol::exact(scheme, lambda);
        let trunc = Truncation::new(&modeq, lambda, 1.0);
        let rows = thetas
            .iter()
            .map(|&t| FigureRow {
                theta: t,
                abs_s: symbol.eval(t).norm(),
                abs_s_n: orders.iter().map(|&n| trunc.s_n(t, n).norm()).collect(),
            })
            .collect();
        tables.push(FigureTable {
            scheme: scheme.name().to_string(),
            lambda: rational_to_f64(lambda),
            lambda_label: lambda_label(lambda),
            orders: orders.to_vec(),
            rows,
        });
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_rational;
    use crate::schemes::catalog_entry;

    #[test]
    fn empty_lambdas_give_no_tables() {
        let heat = catalog_entry("heat_centered").unwrap().scheme;
        assert!(figure_data(&heat, &[], &[2, 8], 4096).unwrap().is_empty());
    }

    #[test]
    fn layout() {
        let heat = catalog_entry("heat_centered").unwrap().scheme;
        let l = [parse_rational("1/2").unwrap(), parse_rational("1/4").unwrap()];
        let tables = figure_data(&heat, &l, &[2, 8], 128).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0].file_name(), "heat_centered_lambda0.5.csv");
        assert_eq!(tables[1].file_name(), "heat_centered_lambda0.25.csv");
        assert_eq!(tables[0].rows.len(), 129);
        let csv = tables[1].to_csv();
        assert_eq!(csv.lines().next(), Some("theta,abs_S,abs_S_N2,abs_S_N8"));
        // S(0) = S_N(0) = 1
        assert_eq!(tables[1].rows[0].abs_s_n, vec![1.0, 1.0]);
    }
}
