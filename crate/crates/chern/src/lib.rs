//! First Chern classes of projection fields and eigenline bundles on closed
//! surfaces.
//!
//! Explicit projections are integrated through the density
//! `(i/2π) Tr(p dp∧dp)`; eigenbundles of sampled matrix fields go through
//! gauge-invariant link variables on the faces of the sampling mesh.

pub mod bands;
pub mod embed;
pub mod projection;
pub mod surface;

pub use bands::{
    band_frames, diagonalizability_verdict, image_frames, plaquette_chern, projection_chern_plaquette, BandChern,
    ChernReport, Frames, HField, GAP_THRESHOLD,
};
pub use embed::embed_in_surface;
pub use projection::{
    bott_matrix, bott_projection, chern_density, chern_number_density, make_torus_projection, BumpTriple, ChernDensity,
    ProjectionCheck, ProjectionField, PROJECTION_TOL,
};
pub use surface::{connected_sum, Surface};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChernError {
    #[error("bad grid: {0}")]
    Grid(String),
    #[error("not a projection: residual {residual:.3e}")]
    NotProjection { residual: f64 },
    #[error("projection rank changes from {from} to {to}")]
    RankChange { from: usize, to: usize },
    #[error("bump triple violates {what} (residual {residual:.3e})")]
    BumpConstraint { what: &'static str, residual: f64 },
    #[error("field is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("bands touch: relative gap {min_gap:.3e} below {threshold:.1e}")]
    GapClosure { min_gap: f64, threshold: f64 },
    #[error("Chern integral {value} is not within {tol:.1e} of an integer")]
    Resolution { value: f64, tol: f64 },
    #[error("tube field is not constant near its boundary (deviation {deviation:.3e})")]
    NonConstantBoundary { deviation: f64 },
    #[error("eigensolver did not converge")]
    Eigen,
}
