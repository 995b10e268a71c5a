//! Truncated Fourier-space Dirac operators on `T²` and numerical `ζ(0)`.
//!
//! Operators act on `span{e^{2πik·x} ⊗ ℂ² ⊗ ℂⁿ : |k_i| ≤ N}`. Products with
//! smooth multipliers are formed as Galerkin compressions, spectra come from a
//! dense Hermitian eigensolver and `ζ(0)` from a fit of the heat trace.

pub mod function;
pub mod gauss_bonnet;
pub mod heat;
pub mod operator;
pub mod profiles;

pub use function::{Coefficient, FourierCoeffs, MatrixFunction, DEFAULT_GRID};
pub use gauss_bonnet::{extrapolate, gauss_bonnet_report, Extrapolated, Extrapolation, GbOptions, GbReport, GbRow};
pub use heat::{fit_spectrum, fit_weighted, localized_trace, zeta_at_zero, FitOptions, HeatTraceFit, TWindow};
pub use operator::{
    assemble_hda, assemble_rescaled, build_dirac, build_mult, dimension, dirac_spectrum, modes, Compression, Guard,
    TruncatedOperator,
};
pub use profiles::{custom_fields, profile_fields, CustomProfile, Profile, ProfileFields, ProfileParams, ROTATION_AMPLITUDE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("{name} is not Hermitian (defect {defect:.3e})")]
    NotHermitian { name: &'static str, defect: f64 },
    #[error("{name} is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { name: &'static str, min_eigenvalue: f64 },
    #[error("assembled operator is not Hermitian (relative defect {defect:.3e})")]
    OperatorNotHermitian { defect: f64 },
    #[error("multiplier has band limit {band} > 2N = {}", 2 * cutoff)]
    BandLimit { band: usize, cutoff: usize },
    #[error("eigensolver did not converge")]
    Eigen,
    #[error("empty or inverted t-window [{lo:.3e}, {hi:.3e}] with {points} points")]
    Window { lo: f64, hi: f64, points: usize },
    #[error("heat-trace fit residual {rel_residual:.3e} exceeds {limit:.1e}")]
    FitResidual { rel_residual: f64, limit: f64 },
    #[error("{0}")]
    Input(String),
}
