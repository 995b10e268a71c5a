//! Link-variable (plaquette) Chern numbers and the diagonalizability verdict.

use std::f64::consts::PI;

use faer::{c64, Mat, Side};
use serde::Serialize;

use crate::projection::ProjectionField;
use crate::surface::Surface;
use crate::ChernError;

/// Default relative spectral gap below which bands count as touching.
pub const GAP_THRESHOLD: f64 = 1e-3;

/// Orthonormal frames (columns) of a vector bundle sampled at vertices.
pub type Frames = Vec<Mat<c64>>;

/// `c = −(1/2π) Σ_faces arg Π det(V_a† V_b)`, faces counterclockwise.
pub fn plaquette_chern(surface: &Surface, frames: &Frames) -> f64 {
    let mut flux = 0.0;
    for face in surface.faces() {
        let mut prod = c64::new(1.0, 0.0);
        for k in 0..face.len() {
            let (a, b) = (face[k], face[(k + 1) % face.len()]);
            let overlap = frames[a].adjoint() * &frames[b];
            let link = overlap.determinant();
            prod *= link / link.norm().max(1e-300);
        }
        flux += prod.arg();
    }
    -flux / (2.0 * PI)
}

/// Frames spanning the image of each projection.
pub fn image_frames(p: &ProjectionField) -> Result<Frames, ChernError> {
    p.values
        .iter()
        .map(|m| {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| ChernError::Eigen)?;
            let vals = evd.S().column_vector();
            let keep: Vec<usize> = (0..vals.nrows()).filter(|&i| vals[i].re > 0.5).collect();
            let u = evd.U();
            Ok(Mat::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])]))
        })
        .collect()
}

/// Plaquette Chern number of the image bundle of a projection field.
pub fn projection_chern_plaquette(p: &ProjectionField) -> Result<f64, ChernError> {
    Ok(plaquette_chern(&p.surface, &image_frames(p)?))
}

/// A positive Hermitian field sampled on a closed surface.
#[derive(Clone, Debug)]
pub struct HField {
    pub surface: Surface,
    pub values: Vec<Mat<c64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandChern {
    pub band: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub chern: i64,
    /// `|flux/2π − chern|`
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernReport {
    pub bands: Vec<BandChern>,
    pub total: i64,
    pub min_relative_gap: f64,
    pub diagonalizable: bool,
}

/// Eigenvalues (ascending) and one unit eigenvector per band at every vertex.
pub fn band_frames(field: &HField) -> Result<(Vec<Vec<f64>>, Vec<Frames>), ChernError> {
    let n = field.values.first().map_or(0, |m| m.nrows());
    let mut lambdas = Vec::with_capacity(field.values.len());
    let mut frames: Vec<Frames> = vec![Vec::with_capacity(field.values.len()); n];
    for m in &field.values {
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| ChernError::Eigen)?;
        let u = evd.U();
        lambdas.push(evd.S().column_vector().iter().map(|x| x.re).collect());
        for (i, f) in frames.iter_mut().enumerate() {
            f.push(Mat::from_fn(n, 1, |r, _| u[(r, i)]));
        }
    }
    Ok((lambdas, frames))
}

/// Per-band Chern numbers of the eigenline bundles; diagonalizable iff all vanish.
pub fn diagonalizability_verdict(field: &HField, gap_threshold: f64) -> Result<ChernReport, ChernError> {
    if field.values.len() != field.surface.vertex_count() {
        return Err(ChernError::Grid("field and surface sizes differ".into()));
    }
    for m in &field.values {
        let defect = (m - m.adjoint()).norm_max();
        if defect > 1e-10 {
            return Err(ChernError::NotHermitian { defect });
        }
    }
    let (lambdas, frames) = band_frames(field)?;
    let mut min_gap = f64::INFINITY;
    for l in &lambdas {
        let scale = l.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        for w in l.windows(2) {
            min_gap = min_gap.min((w[1] - w[0]) / scale);
        }
    }
    if min_gap < gap_threshold {
        return Err(ChernError::GapClosure { min_gap, threshold: gap_threshold });
    }
    let bands: Vec<BandChern> = frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let c = plaquette_chern(&field.surface, f);
            let vals = lambdas.iter().map(|l| l[i]);
            BandChern {
                band: i,
                lambda_min: vals.clone().fold(f64::INFINITY, f64::min),
                lambda_max: vals.fold(f64::NEG_INFINITY, f64::max),
                chern: c.round() as i64,
                residual: (c - c.round()).abs(),
            }
        })
        .collect();
    let total = bands.iter().map(|b| b.chern).sum();
    let diagonalizable = bands.iter().all(|b| b.chern == 0);
    Ok(ChernReport { bands, total, min_relative_gap: min_gap, diagonalizable })
}
