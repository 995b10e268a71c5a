//! Projection fields, their first Chern class density, and the explicit
//! Bott and torus projections.

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::Serialize;

use crate::surface::Surface;
use crate::ChernError;

/// Residual allowed for `P² = P`, `P† = P`.
pub const PROJECTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ProjectionField {
    pub surface: Surface,
    pub values: Vec<Mat<c64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionCheck {
    pub idempotency: f64,
    pub hermiticity: f64,
    pub rank: usize,
}

fn max_entry(m: &Mat<c64>) -> f64 {
    let mut d = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            d = d.max(m[(r, c)].norm());
        }
    }
    d
}

fn trace(m: &Mat<c64>) -> c64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

impl ProjectionField {
    pub fn sample(surface: Surface, f: impl Fn(f64, f64) -> Mat<c64>) -> Result<ProjectionField, ChernError> {
        let values = (0..surface.vertex_count())
            .map(|v| {
                let (a, b) = surface.coords(v).ok_or_else(|| ChernError::Grid("mesh has no chart".into()))?;
                Ok(f(a, b))
            })
            .collect::<Result<_, ChernError>>()?;
        Ok(ProjectionField { surface, values })
    }

    pub fn n(&self) -> usize {
        self.values[0].nrows()
    }

    /// Largest residuals of `P² = P` and `P† = P`, and the common rank.
    pub fn check(&self) -> Result<ProjectionCheck, ChernError> {
        let mut idem = 0.0f64;
        let mut herm = 0.0f64;
        let mut rank = None;
        for p in &self.values {
            idem = idem.max(max_entry(&(p * p - p)));
            herm = herm.max(max_entry(&(p - p.adjoint())));
            let r = trace(p).re.round() as usize;
            match rank {
                None => rank = Some(r),
                Some(r0) if r0 != r => return Err(ChernError::RankChange { from: r0, to: r }),
                _ => {}
            }
        }
        Ok(ProjectionCheck { idempotency: idem, hermiticity: herm, rank: rank.unwrap_or(0) })
    }

    pub fn validate(&self) -> Result<ProjectionCheck, ChernError> {
        let c = self.check()?;
        let residual = c.idempotency.max(c.hermiticity);
        if residual > PROJECTION_TOL {
            return Err(ChernError::NotProjection { residual });
        }
        Ok(c)
    }
}

/// `p(x) = ½(1 + x·σ)` on the unit sphere.
pub fn bott_matrix(x: [f64; 3]) -> Mat<c64> {
    Mat::from_fn(2, 2, |r, c| match (r, c) {
        (0, 0) => c64::new(0.5 * (1.0 + x[2]), 0.0),
        (0, 1) => c64::new(0.5 * x[0], -0.5 * x[1]),
        (1, 0) => c64::new(0.5 * x[0], 0.5 * x[1]),
        _ => c64::new(0.5 * (1.0 - x[2]), 0.0),
    })
}

pub fn bott_projection(surface: Surface) -> Result<ProjectionField, ChernError> {
    if !matches!(surface, Surface::Sphere { .. }) {
        return Err(ChernError::Grid("the Bott projection lives on the sphere grid".into()));
    }
    ProjectionField::sample(surface, |th, ph| bott_matrix([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]))
}

/// Density of `c₁ = (i/2π) Tr(p dp∧dp)` in chart coordinates, `d·du∧dv`.
#[derive(Clone, Debug, Serialize)]
pub struct ChernDensity {
    pub nu: usize,
    pub nv: usize,
    pub du: f64,
    pub dv: f64,
    /// Row-major over `(u_i, v_j)`.
    pub values: Vec<f64>,
    /// Quadrature weight of each row (trapezoid ends on the sphere).
    pub row_weights: Vec<f64>,
}

impl ChernDensity {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nv + j]
    }

    pub fn integral(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nu {
            let row: f64 = self.values[i * self.nv..(i + 1) * self.nv].iter().sum();
            acc += self.row_weights[i] * row;
        }
        acc * self.du * self.dv
    }
}

/// Fourth-order central differences; the sphere is continued across the
/// poles by `(−θ, φ) ↦ (θ, φ+π)`.
pub fn chern_density(p: &ProjectionField) -> Result<ChernDensity, ChernError> {
    let (nu, nv, du, dv, periodic_u) = match p.surface {
        Surface::Sphere { n_theta, n_phi } => (n_theta + 1, n_phi, PI / n_theta as f64, 2.0 * PI / n_phi as f64, false),
        Surface::Torus { nt, ns } => (nt, ns, 1.0 / nt as f64, 1.0 / ns as f64, true),
        Surface::Mesh { .. } => return Err(ChernError::Grid("density needs chart coordinates".into())),
    };
    let at = |i: i64, j: i64| -> &Mat<c64> {
        let (mut i, mut j) = (i, j);
        if periodic_u {
            i = i.rem_euclid(nu as i64);
        } else {
            let last = nu as i64 - 1;
            if i < 0 {
                i = -i;
                j += nv as i64 / 2;
            } else if i > last {
                i = 2 * last - i;
                j += nv as i64 / 2;
            }
        }
        &p.values[i as usize * nv + j.rem_euclid(nv as i64) as usize]
    };
    let d4 = |m2: &Mat<c64>, m1: &Mat<c64>, p1: &Mat<c64>, p2: &Mat<c64>, h: f64| -> Mat<c64> {
        Mat::from_fn(m1.nrows(), m1.ncols(), |r, c| {
            (-p2[(r, c)] + p1[(r, c)] * 8.0 - m1[(r, c)] * 8.0 + m2[(r, c)]) / (12.0 * h)
        })
    };
    let mut values = Vec::with_capacity(nu * nv);
    for i in 0..nu as i64 {
        for j in 0..nv as i64 {
            let pu = d4(at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j), du);
            let pv = d4(at(i, j - 2), at(i, j - 1), at(i, j + 1), at(i, j + 2), dv);
            let comm = &pu * &pv - &pv * &pu;
            let t = trace(&(at(i, j) * comm));
            values.push((c64::new(0.0, 1.0) * t).re / (2.0 * PI));
        }
    }
    let mut row_weights = vec![1.0; nu];
    if !periodic_u {
        row_weights[0] = 0.5;
        row_weights[nu - 1] = 0.5;
    }
    Ok(ChernDensity { nu, nv, du, dv, values, row_weights })
}

/// Quadrature of the density; fails when the result is not within `tol` of an integer.
pub fn chern_number_density(p: &ProjectionField, tol: f64) -> Result<f64, ChernError> {
    let c = chern_density(p)?.integral();
    if (c - c.round()).abs() > tol {
        return Err(ChernError::Resolution { value: c, tol });
    }
    Ok(c)
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

/// `f, g, h` on `[0,1]`: `f` rises on `rise`, equals 1 between, falls on
/// `fall`; `g = √(f(1−f))` on `rise`, `h = √(f(1−f))` on `fall`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpTriple {
    pub eps: f64,
    pub rise: (f64, f64),
    pub fall: (f64, f64),
}

impl Default for BumpTriple {
    fn default() -> BumpTriple {
        BumpTriple { eps: 0.1, rise: (0.1, 0.4), fall: (0.6, 0.9) }
    }
}

fn inside(t: f64, (a, b): (f64, f64)) -> bool {
    a < t && t < b
}

impl BumpTriple {
    pub fn f(&self, t: f64) -> f64 {
        let up = smoothstep((t - self.rise.0) / (self.rise.1 - self.rise.0));
        let down = smoothstep((t - self.fall.0) / (self.fall.1 - self.fall.0));
        up * (1.0 - down)
    }

    fn root(&self, t: f64) -> f64 {
        let f = self.f(t);
        (f * (1.0 - f)).max(0.0).sqrt()
    }

    pub fn g(&self, t: f64) -> f64 {
        if inside(t, self.rise) { self.root(t) } else { 0.0 }
    }

    pub fn h(&self, t: f64) -> f64 {
        if inside(t, self.fall) { self.root(t) } else { 0.0 }
    }

    /// Checks `g·h = 0`, `f² + g² + h² = f` and `f = 0` within `eps` of the ends.
    pub fn validate(&self, samples: usize) -> Result<(), ChernError> {
        let mut overlap = 0.0f64;
        let mut sphere = 0.0f64;
        let mut edge = 0.0f64;
        for k in 0..=samples {
            let t = k as f64 / samples as f64;
            let (f, g, h) = (self.f(t), self.g(t), self.h(t));
            overlap = overlap.max((g * h).abs());
            sphere = sphere.max((f * f + g * g + h * h - f).abs());
            if t < self.eps || t > 1.0 - self.eps {
                edge = edge.max(f.abs());
            }
        }
        for (what, residual) in [("g·h = 0", overlap), ("f² + g² + h² = f", sphere), ("f = 0 near the ends", edge)] {
            if residual > 1e-12 {
                return Err(ChernError::BumpConstraint { what, residual });
            }
        }
        Ok(())
    }

    pub fn matrix(&self, t: f64, s: f64) -> Mat<c64> {
        let (f, g, h) = (self.f(t), self.g(t), self.h(t));
        let e = c64::new((2.0 * PI * s).cos(), (2.0 * PI * s).sin());
        let off = c64::new(h, 0.0) + e * g;
        Mat::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => c64::new(f, 0.0),
            (0, 1) => off,
            (1, 0) => off.conj(),
            _ => c64::new(1.0 - f, 0.0),
        })
    }

    /// `4gg′f − 4g²f′ − 2gg′` from closed-form derivatives, on the support of `g`.
    pub fn torus_density(&self, t: f64) -> f64 {
        let w = self.rise.1 - self.rise.0;
        let u = ((t - self.rise.0) / w).clamp(0.0, 1.0);
        let (f, g) = (self.f(t), self.g(t));
        if g == 0.0 {
            return 0.0;
        }
        let fp = 30.0 * u * u * (1.0 - u) * (1.0 - u) / w;
        let gp = fp * (1.0 - 2.0 * f) / (2.0 * g);
        4.0 * g * gp * f - 4.0 * g * g * fp - 2.0 * g * gp
    }
}

/// The 2×2 projection `(f, h + g e^{2πis}; h + g e^{−2πis}, 1 − f)` on the
/// `(t, s)` torus.
pub fn make_torus_projection(b: &BumpTriple, surface: Surface) -> Result<ProjectionField, ChernError> {
    b.validate(20_000)?;
    if !matches!(surface, Surface::Torus { .. }) {
        return Err(ChernError::Grid("the torus projection needs a torus grid".into()));
    }
    let p = ProjectionField::sample(surface, |t, s| b.matrix(t, s))?;
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bott_north_pole_and_trace() {
        let p = bott_matrix([0.0, 0.0, 1.0]);
        assert_eq!(p[(0, 0)], c64::new(1.0, 0.0));
        assert_eq!(p[(1, 1)], c64::new(0.0, 0.0));
        let f = bott_projection(Surface::sphere(20, 10).unwrap()).unwrap();
        let c = f.validate().unwrap();
        assert_eq!(c.rank, 1);
        assert!(c.idempotency < 1e-15);
    }

    #[test]
    fn constant_projection_has_zero_density() {
        let p = ProjectionField::sample(Surface::torus(8, 8).unwrap(), |_, _| bott_matrix([0.6, 0.0, 0.8])).unwrap();
        let d = chern_density(&p).unwrap();
        assert!(d.values.iter().all(|x| *x == 0.0));
        assert_eq!(chern_number_density(&p, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn shipped_bumps_satisfy_constraints() {
        let b = BumpTriple::default();
        b.validate(100_000).unwrap();
        assert_eq!(b.matrix(0.05, 0.3), Mat::from_fn(2, 2, |r, c| c64::new(if r == 1 && c == 1 { 1.0 } else { 0.0 }, 0.0)));
        // middle of supp g: h = 0
        let t = 0.25;
        let m = b.matrix(t, 0.2);
        let e = c64::new((0.4 * PI).cos(), (0.4 * PI).sin());
        assert!((m[(0, 1)] - e * b.g(t)).norm() < 1e-15);
        assert_eq!(m[(0, 0)].re, b.f(t));
    }

    #[test]
    fn overlapping_supports_are_rejected() {
        let b = BumpTriple { eps: 0.1, rise: (0.1, 0.6), fall: (0.4, 0.9) };
        assert!(matches!(b.validate(1000), Err(ChernError::BumpConstraint { what: "g·h = 0", .. })));
        assert!(make_torus_projection(&b, Surface::torus(16, 8).unwrap()).is_err());
        let raw = ProjectionField::sample(Surface::torus(64, 8).unwrap(), |t, s| b.matrix(t, s)).unwrap();
        assert!(matches!(raw.validate(), Err(ChernError::NotProjection { .. })));
    }
}
