use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdmod_core::exactalg::{parse_rational, Rational};
use fdmod_core::schemes::{catalog_entry, parse_scheme};
use fdmod_core::spectra::{LambdaRange, DEFAULT_GRID};
use fdmod_core::SchemeSpec;

use crate::CliError;

pub const MAX_ORDER_VAR: &str = "MODEQ_MAX_ORDER";
pub const DEFAULT_MAX_ORDER: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "fdmod", version, about = "Modified equations and Von Neumann analysis of finite-difference schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the modified equation (JSON with exact coefficients).
    Modeq(CommonArgs),
    /// Scan lambda for the stability and log-convergence regions.
    Regions(CommonArgs),
    /// Estimate the radius of convergence of the modified equation series.
    Radius(CommonArgs),
    /// Write |S| and |S_N| curves plus grid-run comparisons as CSV.
    Figures {
        #[command(flatten)]
        common: CommonArgs,
        /// Time steps for the grid-run comparison.
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Grid points (and Fourier modes) for the grid run.
        #[arg(long, default_value_t = 64)]
        modes: usize,
    },
    /// Growth bound for the scheme from a stable truncation.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        /// Frequency support bound M of the initial data.
        #[arg(long, default_value_t = 1.0)]
        support: f64,
        /// Time horizon T.
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1.0)]
        dx: f64,
    },
    /// Check the upwind reflection symmetry about lambda = 1/2 (lambdas are offsets).
    Symmetry(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Built-in scheme name.
    #[arg(long, conflicts_with = "file")]
    pub catalog: Option<String>,
    /// Scheme description file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Truncation / series orders, comma separated.
    #[arg(short = 'N', value_delimiter = ',')]
    pub orders: Vec<usize>,
    /// Lambda values, comma separated (decimals or fractions).
    #[arg(long, value_delimiter = ',', value_parser = rational_arg, conflicts_with = "lambda_range")]
    pub lambdas: Vec<Rational>,
    /// Evenly spaced lambdas LO:HI:COUNT.
    #[arg(long)]
    pub lambda_range: Option<String>,
    /// Theta grid intervals on [0, pi].
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default: csv for figures, json otherwise).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Cross-check against the independent elimination engine.
    #[arg(long)]
    pub verify: bool,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).ok_or_else(|| format!("not a number: '{s}'"))
}

/// Command-line arguments resolved into checked values.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scheme: Option<SchemeSpec>,
    pub lambdas: Vec<Rational>,
    pub range: Option<LambdaRange>,
    pub orders: Vec<usize>,
    pub grid: usize,
    pub out: Option<PathBuf>,
    format: Option<Format>,
    pub verify: bool,
    pub max_order: usize,
}

impl RunConfig {
    pub fn resolve(args: CommonArgs, needs_scheme: bool) -> Result<Self, CliError> {
        let max_order = max_order_from_env()?;
        let scheme = match (&args.catalog, &args.file) {
            (Some(name), None) => Some(
                catalog_entry(name)
                    .map(|e| e.scheme)
                    .ok_or_else(|| CliError::Input(format!("unknown catalog scheme '{name}'")))?,
            ),
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                Some(parse_scheme(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?)
            }
            (None, None) if needs_scheme => {
                return Err(CliError::Input("one of --catalog or --file is required".into()))
            }
            _ => None,
        };
        let range = args.lambda_range.as_deref().map(parse_range).transpose()?;
        if let Some(&n) = args.orders.iter().find(|&&n| n > max_order) {
            return Err(CliError::Input(format!("order {n} exceeds {MAX_ORDER_VAR} = {max_order}")));
        }
        if args.orders.contains(&0) {
            return Err(CliError::Input("orders must be positive".into()));
        }
        Ok(Self {
            scheme,
            lambdas: args.lambdas,
            range,
            orders: args.orders,
            grid: args.grid,
            out: args.out,
            format: args.format,
            verify: args.verify,
            max_order,
        })
    }

    pub fn scheme(&self) -> &SchemeSpec {
        self.scheme.as_ref().expect("scheme resolved")
    }

    pub fn orders_or(&self, default: &[usize]) -> Vec<usize> {
        if self.orders.is_empty() {
            default.to_vec()
        } else {
            self.orders.clone()
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Explicit lambdas, or the samples of `--lambda-range`.
    pub fn lambda_values(&self) -> Vec<Rational> {
        match &self.range {
            Some(r) => r.samples(),
            None => self.lambdas.clone(),
        }
    }

    /// Writes `contents` to `<out>/<name>`, or to stdout without `--out`.
    pub fn emit(&self, name: &str, contents: &str) -> Result<(), CliError> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
                let path = dir.join(name);
                fs::write(&path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
            }
            None => {
                print!("{contents}");
                Ok(())
            }
        }
    }
}

fn max_order_from_env() -> Result<usize, CliError> {
    match std::env::var(MAX_ORDER_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("{MAX_ORDER_VAR} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn parse_range(s: &str) -> Result<LambdaRange, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(CliError::Input(format!("--lambda-range expects LO:HI:COUNT, got '{s}'")));
    };
    let lo = rational_arg(lo).map_err(CliError::Input)?;
    let hi = rational_arg(hi).map_err(CliError::Input)?;
    let count = count.trim().parse::<usize>().map_err(|_| CliError::Input(format!("bad sample count '{count}'")))?;
    LambdaRange::new(lo, hi, count).map_err(|e| CliError::Input(e.to_string()))
}
