//! Exact modified equations and Von Neumann analysis for explicit linear
//! finite-difference schemes `u_j^{n+1} = u_j^n + lambda sum_p B_p(lambda) u_{j+p}`.
//!
//! Modified-equation coefficients are polynomials in `lambda` with exact
//! rational coefficients. Everything numeric (symbol values, regions, radii,
//! grid runs) starts from weights computed exactly and rounded once.

pub mod empirics;
pub mod exactalg;
pub mod modeq;
pub mod output;
pub mod radius;
pub mod schemes;
pub mod spectra;

pub use empirics::{EmpiricsError, EvolveTable, GridState};
pub use exactalg::{AlgebraError, GaussRat, LambdaPoly, Rational, ThetaSeries};
pub use modeq::{derive_elimination, derive_log, ModTerm, ModeqError, ModifiedEq};
pub use radius::{RadiusError, RadiusEstimate, RadiusMethod};
pub use schemes::{builtin_catalog, catalog_entry, parse_scheme, SchemeError, SchemeSpec};
pub use spectra::{LambdaRange, RegionReport, SpectraError, StabilityCertificate, Symbol};
