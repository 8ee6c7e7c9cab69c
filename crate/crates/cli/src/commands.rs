use std::fmt::Write as _;

use fdmod_core::empirics::evolve_and_compare;
use fdmod_core::exactalg::{rational_to_f64, Rational};
use fdmod_core::modeq::{derive_elimination, derive_log};
use fdmod_core::output::{fmt_float, lambda_label};
use fdmod_core::radius::{
    heat_closed_form_radius, radius_root_test, radius_zero_search, RadiusError, MIN_ROOT_TEST_ORDER,
};
use fdmod_core::schemes::catalog_entry;
use fdmod_core::spectra::{
    figure_data, region_scan, truncation_certificate, upwind_symmetry_check, CertificateParams, SpectraError,
};
use fdmod_core::{ModeqError, SchemeSpec};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

const DEFAULT_MODEQ_ORDER: usize = 8;
const DEFAULT_ROOT_TEST_ORDER: usize = 40;
const DEFAULT_SYMMETRY_ORDER: usize = 12;

fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn modeq_err(e: ModeqError) -> CliError {
    CliError::Input(e.to_string())
}

fn spectra_err(e: SpectraError) -> CliError {
    match e {
        SpectraError::SymmetryViolation(_) => CliError::CrossCheck(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn require_lambdas(config: &RunConfig) -> Result<Vec<Rational>, CliError> {
    let lambdas = config.lambda_values();
    if lambdas.is_empty() {
        return Err(CliError::Input("no lambda given (use --lambdas or --lambda-range)".into()));
    }
    Ok(lambdas)
}

pub fn cmd_modeq(config: &RunConfig) -> Result<(), CliError> {
    let scheme = config.scheme();
    let orders = config.orders_or(&[DEFAULT_MODEQ_ORDER]);
    let top = *orders.iter().max().expect("nonempty");
    let full = derive_log(scheme, top).map_err(modeq_err)?;
    if config.verify {
        let other = derive_elimination(scheme, top).map_err(modeq_err)?;
        if let Some(t) = full.terms().iter().zip(other.terms()).find(|(a, b)| a != b) {
            return Err(CliError::CrossCheck(format!(
                "engines disagree at p = {}: {} vs {}",
                t.0.p, t.0.coeff, t.1.coeff
            )));
        }
        eprintln!("verified: log and elimination engines agree through order {top}");
    }
    let eqs = orders.iter().map(|&n| full.truncated(n)).collect::<Result<Vec<_>, _>>().map_err(modeq_err)?;
    let (name, body) = match config.format_or(Format::Json) {
        Format::Json => {
            let docs: Vec<Value> = eqs.iter().map(|m| m.to_json()).collect();
            let value = if docs.len() == 1 { docs.into_iter().next().expect("one") } else { Value::Array(docs) };
            (format!("{}_modeq.json", scheme.name()), to_pretty(&value))
        }
        Format::Csv => {
            let mut out = String::from("N,p,grading,coeff\n");
            for m in &eqs {
                for t in m.terms() {
                    let _ = writeln!(out, "{},{},{},{}", m.order(), t.p, t.grading, t.coeff);
                }
            }
            (format!("{}_modeq.csv", scheme.name()), out)
        }
    };
    config.emit(&name, &body)
}

pub fn cmd_regions(config: &RunConfig) -> Result<(), CliError> {
    let scheme = config.scheme();
    let range =
        config.range.as_ref().ok_or_else(|| CliError::Input("regions needs --lambda-range LO:HI:COUNT".into()))?;
    let orders = config.orders_or(&[]);
    let report = region_scan(scheme, range, config.grid, &orders).map_err(spectra_err)?;
    let json = to_pretty(&serde_json::to_value(&report).expect("serializable"));
    let csv = report.to_csv();
    let mut summary = String::new();
    let fmt_boundary = |b: Option<f64>| b.map_or_else(|| "none".to_string(), fmt_float);
    let _ = writeln!(summary, "R_s boundary: {}", fmt_boundary(report.rs_boundary));
    let _ = writeln!(summary, "Omega_c boundary: {}", fmt_boundary(report.omega_c_boundary));
    for (n, b) in &report.trunc_boundary {
        let _ = writeln!(summary, "truncation N={n} stable through: {}", fmt_boundary(*b));
    }
    if config.out.is_some() {
        config.emit(&format!("{}_regions.json", scheme.name()), &json)?;
        config.emit(&format!("{}_regions.csv", scheme.name()), &csv)?;
        print!("{summary}");
    } else {
        print!("{}", if config.format_or(Format::Json) == Format::Json { json } else { csv });
        eprint!("{summary}");
    }
    Ok(())
}

fn is_heat_centered(scheme: &SchemeSpec) -> bool {
    let heat = catalog_entry("heat_centered").expect("builtin").scheme;
    heat.q() == scheme.q() && heat.stencil() == scheme.stencil() && heat.pde() == scheme.pde()
}

fn radius_err(e: RadiusError) -> CliError {
    match e {
        RadiusError::NoConvergence { .. } => CliError::CrossCheck(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

pub fn cmd_radius(config: &RunConfig) -> Result<(), CliError> {
    let scheme = config.scheme();
    let lambdas = require_lambdas(config)?;
    let order = config.orders_or(&[DEFAULT_ROOT_TEST_ORDER.min(config.max_order)])[0];
    if order < MIN_ROOT_TEST_ORDER {
        return Err(CliError::Input(format!("root test needs -N >= {MIN_ROOT_TEST_ORDER}")));
    }
    let modeq = derive_log(scheme, order).map_err(modeq_err)?;
    let heat = is_heat_centered(scheme);
    let mut results = Vec::with_capacity(lambdas.len());
    for lambda in &lambdas {
        let root = radius_root_test(&modeq, lambda).map_err(radius_err)?;
        let zero = radius_zero_search(scheme, rational_to_f64(lambda)).map_err(radius_err)?;
        let mut entry = json!({
            "lambda": rational_to_f64(lambda),
            "lambda_exact": lambda.to_string(),
            "root_test": root,
            "zero_search": zero,
        });
        if heat {
            entry["closed_form"] =
                serde_json::to_value(heat_closed_form_radius(lambda).map_err(radius_err)?).expect("serializable");
        }
        results.push(entry);
    }
    config.emit(
        &format!("{}_radius.json", scheme.name()),
        &to_pretty(&json!({
            "scheme": scheme.name(),
            "N": order,
            "results": results,
        })),
    )
}

pub fn cmd_figures(config: &RunConfig, steps: usize, modes: usize) -> Result<(), CliError> {
    let scheme = config.scheme();
    let lambdas = require_lambdas(config)?;
    let orders = config.orders_or(&[2, 8]);
    let tables = figure_data(scheme, &lambdas, &orders, config.grid).map_err(spectra_err)?;
    let modeq = derive_log(scheme, *orders.iter().max().expect("nonempty")).map_err(modeq_err)?;
    let out = config.out.clone().unwrap_or_else(|| ".".into());
    let mut config = config.clone();
    config.out = Some(out);
    let mut written = Vec::new();
    for (table, lambda) in tables.iter().zip(&lambdas) {
        let stem = table.file_name().trim_end_matches(".csv").to_string();
        let name = match config.format_or(Format::Csv) {
            Format::Csv => {
                config.emit(&table.file_name(), &table.to_csv())?;
                table.file_name()
            }
            Format::Json => {
                let name = format!("{stem}.json");
                config.emit(&name, &to_pretty(&serde_json::to_value(table).expect("serializable")))?;
                name
            }
        };
        written.push(name);
        for &n in &orders {
            let run = evolve_and_compare(scheme, &modeq, lambda, n, steps, modes)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let name = format!("evolve_{}_lambda{}_N{n}.csv", scheme.name(), lambda_label(lambda));
            config.emit(&name, &run.to_csv())?;
            written.push(name);
        }
    }
    for name in written {
        println!("{}", config.out.as_ref().expect("set").join(name).display());
    }
    Ok(())
}

pub fn cmd_certify(config: &RunConfig, support: f64, horizon: f64, dx: f64) -> Result<(), CliError> {
    let scheme = config.scheme();
    let lambdas = require_lambdas(config)?;
    let n = config.orders_or(&[4])[0];
    let reference = (4 * n).min(config.max_order);
    if reference <= n {
        return Err(CliError::Input(format!(
            "-N {n} leaves no room for a reference order below the cap {}",
            config.max_order
        )));
    }
    let modeq = derive_log(scheme, reference).map_err(modeq_err)?;
    let params = CertificateParams {
        dx,
        reference_order: reference,
        grid: config.grid,
        ..CertificateParams::new(n, support, horizon)
    };
    let certs = lambdas
        .iter()
        .map(|l| truncation_certificate(scheme, &modeq, l, &params))
        .collect::<Result<Vec<_>, _>>()
        .map_err(spectra_err)?;
    config.emit(
        &format!("{}_certificate.json", scheme.name()),
        &to_pretty(&serde_json::to_value(&certs).expect("serializable")),
    )
}

pub fn cmd_symmetry(config: &RunConfig) -> Result<(), CliError> {
    let mut offsets = config.lambda_values();
    if offsets.is_empty() {
        offsets = ["1/10", "1/4", "2/5"].iter().map(|s| s.parse().expect("literal")).collect();
    }
    let order = config.orders_or(&[DEFAULT_SYMMETRY_ORDER])[0];
    let reports = offsets
        .iter()
        .map(|l| upwind_symmetry_check(l, order, config.grid))
        .collect::<Result<Vec<_>, _>>()
        .map_err(spectra_err)?;
    config.emit("upwind_symmetry.json", &to_pretty(&serde_json::to_value(&reports).expect("serializable")))
}
