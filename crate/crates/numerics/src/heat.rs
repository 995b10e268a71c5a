//! Heat traces `Tr(M_f e^{−tD²})` and the small-`t` fit that yields `ζ(0)`.

use std::f64::consts::PI;

use faer::linalg::solvers::SolveLstsq;
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::function::MatrixFunction;
use crate::operator::{build_mult, TruncatedOperator};
use crate::NumericsError;

/// Log-spaced window `t ∈ [c₁/(2πN_ref)², c₂]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TWindow {
    pub c1: f64,
    pub c2: f64,
    pub points: usize,
    /// Cutoff that sets the small-`t` end; the largest cutoff of a sweep so
    /// every cutoff is fitted on the same window.
    pub n_ref: usize,
}

impl TWindow {
    pub fn for_cutoff(n_ref: usize) -> TWindow {
        TWindow { c1: 40.0, c2: 0.012, points: 25, n_ref }
    }

    pub fn t_min(&self) -> f64 {
        self.c1 / (2.0 * PI * self.n_ref as f64).powi(2)
    }

    pub fn grid(&self) -> Result<Vec<f64>, NumericsError> {
        let lo = self.t_min();
        if !(lo > 0.0 && lo < self.c2 && self.points >= 6) {
            return Err(NumericsError::Window { lo, hi: self.c2, points: self.points });
        }
        let (a, b) = (lo.ln(), self.c2.ln());
        Ok((0..self.points).map(|i| (a + (b - a) * i as f64 / (self.points - 1) as f64).exp()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Highest power of `t` in the model `c₋₁/t + c₀ + c₁t + …`.
    pub degree: usize,
    /// Eigenvalues of `op²` below `kernel_rel_tol · max λ²` count as kernel.
    pub kernel_rel_tol: f64,
    /// Relative residual RMS above which a fit is rejected.
    pub max_rel_residual: f64,
}

impl Default for FitOptions {
    fn default() -> FitOptions {
        FitOptions { degree: 2, kernel_rel_tol: 1e-8, max_rel_residual: 1e-3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatTraceFit {
    pub t_grid: Vec<f64>,
    pub traces: Vec<f64>,
    /// `c₋₁, c₀, c₁, …`
    pub coeffs: Vec<f64>,
    /// Kernel count (or kernel weight for localized traces).
    pub kernel_dim: f64,
    /// Eigenvalues within 10× above the kernel threshold.
    pub gray_zone: usize,
    pub zeta0: f64,
    pub rel_residual: f64,
    pub condition: f64,
    pub jackknife_se: f64,
    /// Largest shift of `ζ(0)` when two points are dropped at either end.
    pub sensitivity: f64,
    pub bracket: (f64, f64),
}

impl HeatTraceFit {
    pub fn c0(&self) -> f64 {
        self.coeffs[1]
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.bracket.1 - self.bracket.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bracket.0 <= x && x <= self.bracket.1
    }
}

/// Least-squares fit of the model on `(t, y)`; returns coefficients and
/// the condition number of the column-scaled design.
fn fit_model(t: &[f64], y: &[f64], degree: usize) -> Result<(Vec<f64>, f64), NumericsError> {
    let cols = degree + 2;
    let t_mid = (t[0] * t[t.len() - 1]).sqrt();
    let design = Mat::<f64>::from_fn(t.len(), cols, |r, c| (t[r] / t_mid).powi(c as i32 - 1));
    let sv = design.singular_values().map_err(|_| NumericsError::Eigen)?;
    let condition = sv[0] / sv[sv.len() - 1];
    let rhs = Mat::<f64>::from_fn(t.len(), 1, |r, _| y[r]);
    let sol = design.qr().solve_lstsq(&rhs);
    let coeffs = (0..cols).map(|c| sol[(c, 0)] / t_mid.powi(c as i32 - 1)).collect();
    Ok((coeffs, condition))
}

fn model(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().enumerate().map(|(i, c)| c * t.powi(i as i32 - 1)).sum()
}

/// Fits `Σ_i w_i e^{−tμ_i}` for squared eigenvalues `μ_i` and weights `w_i`.
pub fn fit_weighted(
    squares: &[f64],
    weights: &[f64],
    window: &TWindow,
    opts: &FitOptions,
) -> Result<HeatTraceFit, NumericsError> {
    let t_grid = window.grid()?;
    let top = squares.iter().cloned().fold(0.0, f64::max);
    let tol = opts.kernel_rel_tol * top;
    let kernel_dim: f64 = squares.iter().zip(weights).filter(|(m, _)| **m <= tol).map(|(_, w)| w).sum();
    let gray_zone = squares.iter().filter(|m| **m > tol && **m <= 10.0 * tol).count();
    let traces: Vec<f64> =
        t_grid.iter().map(|t| squares.iter().zip(weights).map(|(m, w)| w * (-t * m).exp()).sum()).collect();

    let (coeffs, condition) = fit_model(&t_grid, &traces, opts.degree)?;
    let scale = traces.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    let rms = (t_grid.iter().zip(&traces).map(|(t, y)| (y - model(&coeffs, *t)).powi(2)).sum::<f64>()
        / t_grid.len() as f64)
        .sqrt();
    let rel_residual = rms / scale;
    if rel_residual > opts.max_rel_residual {
        return Err(NumericsError::FitResidual { rel_residual, limit: opts.max_rel_residual });
    }
    let zeta0 = coeffs[1] - kernel_dim;

    let m = t_grid.len();
    let mut loo = Vec::with_capacity(m);
    for skip in 0..m {
        let t: Vec<f64> = t_grid.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x).collect();
        let y: Vec<f64> = traces.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x).collect();
        loo.push(fit_model(&t, &y, opts.degree)?.0[1]);
    }
    let mean = loo.iter().sum::<f64>() / m as f64;
    let jackknife_se = ((m - 1) as f64 / m as f64 * loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>()).sqrt();
    let lower = fit_model(&t_grid[..m - 2], &traces[..m - 2], opts.degree)?.0[1];
    let upper = fit_model(&t_grid[2..], &traces[2..], opts.degree)?.0[1];
    let sensitivity = (lower - coeffs[1]).abs().max((upper - coeffs[1]).abs());
    let half = 3.0 * jackknife_se + sensitivity + 1e-9 * zeta0.abs().max(1.0);

    Ok(HeatTraceFit {
        t_grid,
        traces,
        coeffs,
        kernel_dim,
        gray_zone,
        zeta0,
        rel_residual,
        condition,
        jackknife_se,
        sensitivity,
        bracket: (zeta0 - half, zeta0 + half),
    })
}

/// Fits `Tr e^{−tλ²}` from a spectrum `λ`.
pub fn fit_spectrum(spectrum: &[f64], window: &TWindow, opts: &FitOptions) -> Result<HeatTraceFit, NumericsError> {
    let squares: Vec<f64> = spectrum.iter().map(|x| x * x).collect();
    fit_weighted(&squares, &vec![1.0; squares.len()], window, opts)
}

/// `ζ_{op}(0) = c₀ − dim ker` from the heat-trace fit.
pub fn zeta_at_zero(op: &TruncatedOperator, window: &TWindow, opts: &FitOptions) -> Result<HeatTraceFit, NumericsError> {
    fit_spectrum(&op.eigenvalues()?, window, opts)
}

/// Fits `Tr(M_f e^{−t op²})`; `zeta0` estimates `ζ_{f,op}(0)`.
pub fn localized_trace(
    op: &TruncatedOperator,
    f: &MatrixFunction,
    window: &TWindow,
    opts: &FitOptions,
) -> Result<HeatTraceFit, NumericsError> {
    let mf = build_mult(f, op.cutoff)?;
    let (vals, vecs) = op.eigen()?;
    let fv = &mf.matrix * &vecs;
    let weights: Vec<f64> = (0..vals.len())
        .map(|i| (0..vecs.nrows()).map(|r| vecs[(r, i)].conj() * fv[(r, i)]).sum::<c64>().re)
        .collect();
    let squares: Vec<f64> = vals.iter().map(|x| x * x).collect();
    fit_weighted(&squares, &weights, window, opts)
}
