//! Extension of a tube-supported projection to a closed surface of genus `g`.

use faer::{c64, Mat};

use crate::projection::ProjectionField;
use crate::surface::{connected_sum, first_copy_vertex, Surface};
use crate::ChernError;

const CONSTANT_TOL: f64 = 1e-12;

/// Extends `tube` (a torus-chart field, constant near `t = 0`) by its
/// boundary value to the connected sum of `genus` tori. Genus 1 returns the
/// torus field itself.
pub fn embed_in_surface(tube: &ProjectionField, genus: usize) -> Result<ProjectionField, ChernError> {
    let Surface::Torus { nt, ns } = tube.surface else {
        return Err(ChernError::Grid("the tube chart must be a torus grid".into()));
    };
    let boundary = tube.values[0].clone();
    // rows t_0, t_1 and t_{nt−1} border the hole and the seam t = 0 ≡ 1
    let mut deviation = 0.0f64;
    for i in [nt - 1, 0, 1, 2] {
        for j in 0..ns {
            deviation = deviation.max((&tube.values[i * ns + j] - &boundary).norm_max());
        }
    }
    if deviation > CONSTANT_TOL {
        return Err(ChernError::NonConstantBoundary { deviation });
    }
    if genus == 0 {
        return Err(ChernError::Grid("genus must be at least 1".into()));
    }
    if genus == 1 {
        return Ok(tube.clone());
    }
    let surface = connected_sum(nt, ns, genus)?;
    let mut values: Vec<Mat<c64>> = vec![boundary; surface.vertex_count()];
    for i in 0..nt {
        for j in 0..ns {
            values[first_copy_vertex(nt, ns, i, j)] = tube.values[i * ns + j].clone();
        }
    }
    Ok(ProjectionField { surface, values })
}
