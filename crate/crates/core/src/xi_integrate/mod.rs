//! ξ-space integration of traced parametrix terms into curvature densities.
//!
//! Densities are per spinor component: the Clifford trace is divided by
//! `tr 1 = 2`, and the ξ-measure is plain `d²ξ`, so that coefficients are
//! rational multiples of `π`.

mod angular;
mod density;
mod displays;
mod pure_h;
mod radial;
mod sandwich;

pub use angular::{angular_average, circle_moment};
pub use density::{
    curvature_density, sample_grid, trace_integral, CurvatureDensity, DensityPart, GridSample, PointData,
};
pub use displays::{
    compare, expand_display, reference_displays, verify_displays, DisplayCheck, DisplaySource, DisplayStatus,
    DisplayTerm, RecomputedDisplays, ReferenceDisplay,
};
pub use pure_h::{integrate_pure_h, log_laplacian, total_derivative_coefficient};
pub use radial::{beta, radial_integral, RadialIntegral};
pub use sandwich::{
    classify, factor_group, group_by_shape, integrate_sandwich, kernel, resolvent_integral, SandwichMonomial,
    SandwichShape, SandwichTerm, Slot,
};

use num_rational::BigRational;
use thiserror::Error;

use crate::specfun::SpecFunError;
use crate::symcalc::{clifford_trace, Basis, Clifford, SymbolError, SymbolPoly};

#[derive(Debug, Error, PartialEq)]
pub enum XiError {
    #[error("radial integral diverges: ξ² power {k} against b₀ power {m}")]
    Divergent { k: u32, m: u32 },
    #[error("symbol is not traced and averaged: {0}")]
    NotPrepared(String),
    #[error("term does not reduce to H^α Φ(Δ)(X) H^β form: {0}")]
    NonFactorable(String),
    #[error("matrix data has inconsistent size: {0}")]
    Shape(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Clifford trace, angular average and division by `tr 1`.
pub fn prepare(s: &SymbolPoly) -> SymbolPoly {
    angular_average(&clifford_trace(s)).scale(&BigRational::new(1.into(), 2.into()))
}

pub(crate) fn check_prepared(basis: &Basis) -> Result<(), XiError> {
    if basis.clifford != Clifford::One || basis.xi.xi1 != 0 || basis.xi.xi2 != 0 {
        return Err(XiError::NotPrepared(format!("{:?} {:?}", basis.clifford, basis.xi)));
    }
    Ok(())
}
