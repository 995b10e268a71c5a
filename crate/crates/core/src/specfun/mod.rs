//! Spectral functions of the modular operator `Δ(x) = H⁻⁴ x H⁴` and their
//! action on matrices written in the eigenbasis of `H`.

mod scalar;

pub use scalar::{eval_f, eval_f_delta, eval_f_unweighted, eval_g, eval_q, log_dd1, log_dd2, SERIES_RADIUS};

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecFunError {
    #[error("{name} is defined for positive arguments, got {arg}")]
    Domain { name: &'static str, arg: f64 },
    #[error("{name} takes {expected} argument(s)")]
    Arity { name: &'static str, expected: usize },
    #[error("matrix is {got}×{got} but the action has {expected} eigenvalues")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigenvalue {0} is not positive")]
    NonPositiveEigenvalue(f64),
}

/// The closed-form functions that appear in the curvature densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpectralFunction {
    /// Linear-in-`A` terms.
    G,
    /// Diagonal restriction `Q(s, 1)` of the quadratic function.
    F,
    /// `δ(A)` terms.
    #[serde(rename = "F_delta")]
    FDelta,
    /// Quadratic terms; two arguments.
    Q,
}

impl SpectralFunction {
    pub const ALL: [SpectralFunction; 4] =
        [SpectralFunction::G, SpectralFunction::F, SpectralFunction::FDelta, SpectralFunction::Q];

    pub fn name(self) -> &'static str {
        match self {
            SpectralFunction::G => "G",
            SpectralFunction::F => "F",
            SpectralFunction::FDelta => "F_delta",
            SpectralFunction::Q => "Q",
        }
    }

    pub fn from_name(name: &str) -> Option<SpectralFunction> {
        SpectralFunction::ALL.into_iter().find(|f| f.name().eq_ignore_ascii_case(name))
    }

    pub fn arity(self) -> usize {
        match self {
            SpectralFunction::Q => 2,
            _ => 1,
        }
    }

    pub fn eval(self, s: f64) -> Result<f64, SpecFunError> {
        match self {
            SpectralFunction::G => eval_g(s),
            SpectralFunction::F => eval_f(s),
            SpectralFunction::FDelta => eval_f_delta(s),
            SpectralFunction::Q => Err(SpecFunError::Arity { name: "Q", expected: 2 }),
        }
    }

    pub fn eval2(self, s: f64, t: f64) -> Result<f64, SpecFunError> {
        match self {
            SpectralFunction::Q => eval_q(s, t),
            other => Err(SpecFunError::Arity { name: other.name(), expected: 1 }),
        }
    }
}

/// `Δ` on `n×n` matrices for `H = diag(λ₁, …, λ_n)`: `Δ(x)_{ij} = s_{ij} x_{ij}`
/// with `s_{ij} = (λ_j/λ_i)⁴`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaAction {
    lambdas: Vec<f64>,
}

impl DeltaAction {
    pub fn new(lambdas: Vec<f64>) -> Result<DeltaAction, SpecFunError> {
        if let Some(&bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(SpecFunError::NonPositiveEigenvalue(bad));
        }
        Ok(DeltaAction { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn ratio(&self, i: usize, j: usize) -> f64 {
        (self.lambdas[j] / self.lambdas[i]).powi(4)
    }

    fn check_dims(&self, x: MatRef<'_, c64>) -> Result<(), SpecFunError> {
        let n = self.n();
        if x.nrows() != n || x.ncols() != n {
            return Err(SpecFunError::DimensionMismatch { expected: n, got: x.nrows().max(x.ncols()) });
        }
        Ok(())
    }
}

/// `f(Δ)(x)`: entrywise `f(s_{ij}) x_{ij}`.
pub fn apply(f: SpectralFunction, act: &DeltaAction, x: MatRef<'_, c64>) -> Result<Mat<c64>, SpecFunError> {
    act.check_dims(x)?;
    let n = act.n();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = x[(i, j)] * f.eval(act.ratio(i, j))?;
        }
    }
    Ok(out)
}

/// `Q(Δ⁽¹⁾, Δ⁽¹⁾Δ⁽²⁾)(x·y)`: `Σ_k Q(s_{ik}, s_{ij}) x_{ik} y_{kj}`.
///
/// The first argument is the modular ratio across the left factor, the
/// second across the whole product.
pub fn apply2(
    f: SpectralFunction,
    act: &DeltaAction,
    x: MatRef<'_, c64>,
    y: MatRef<'_, c64>,
) -> Result<Mat<c64>, SpecFunError> {
    act.check_dims(x)?;
    act.check_dims(y)?;
    let n = act.n();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let t = act.ratio(i, j);
            let mut acc = c64::new(0.0, 0.0);
            for k in 0..n {
                acc += x[(i, k)] * y[(k, j)] * f.eval2(act.ratio(i, k), t)?;
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub s: f64,
    pub t: Option<f64>,
    pub value: f64,
}

/// Values of `f` on a grid; arity-2 functions are tabulated on `grid × t_grid`.
pub fn table(f: SpectralFunction, grid: &[f64], t_grid: &[f64]) -> Result<Vec<TableRow>, SpecFunError> {
    let mut rows = Vec::new();
    for &s in grid {
        if f.arity() == 1 {
            rows.push(TableRow { s, t: None, value: f.eval(s)? });
        } else {
            for &t in t_grid {
                rows.push(TableRow { s, t: Some(t), value: f.eval2(s, t)? });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, f: impl Fn(usize, usize) -> c64) -> Mat<c64> {
        Mat::from_fn(n, n, f)
    }

    #[test]
    fn equal_eigenvalues_scale_by_value_at_one() {
        let act = DeltaAction::new(vec![1.3, 1.3, 1.3]).unwrap();
        let x = mat(3, |i, j| c64::new(i as f64 + 1.0, j as f64 - 0.5));
        let y = apply(SpectralFunction::G, &act, x.as_ref()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((y[(i, j)] - x[(i, j)] / 3.0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn two_by_two_entries() {
        let act = DeltaAction::new(vec![1.0, 2f64.powf(0.25)]).unwrap();
        let x = mat(2, |_, _| c64::new(1.0, 0.0));
        let y = apply(SpectralFunction::G, &act, x.as_ref()).unwrap();
        assert!((y[(0, 1)].re - eval_g(2.0).unwrap()).abs() < 1e-14);
        assert!((y[(1, 0)].re - eval_g(0.5).unwrap()).abs() < 1e-14);
        assert!((y[(0, 0)].re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn f_trace_of_hermitian_vanishes() {
        let act = DeltaAction::new(vec![0.6, 1.1, 1.9]).unwrap();
        let x = mat(3, |i, j| if i == j { c64::new(i as f64, 0.0) } else { c64::new(0.3, (i as f64) - (j as f64)) });
        let y = apply(SpectralFunction::F, &act, x.as_ref()).unwrap();
        let tr: c64 = (0..3).map(|i| y[(i, i)]).sum();
        assert!(tr.norm() < 1e-15);
    }

    #[test]
    fn apply2_with_identity_right_factor_is_diagonal_restriction() {
        let act = DeltaAction::new(vec![0.8, 1.4]).unwrap();
        let x = mat(2, |i, j| c64::new(1.0 + i as f64, j as f64));
        let id = Mat::<c64>::identity(2, 2);
        let y = apply2(SpectralFunction::Q, &act, x.as_ref(), id.as_ref()).unwrap();
        let z = apply(SpectralFunction::F, &act, x.as_ref()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // Q(s_ij, s_ij) vs F(s_ij) = Q(s_ij, 1) differ off the diagonal
                let expected = x[(i, j)] * eval_q(act.ratio(i, j), act.ratio(i, j)).unwrap();
                assert!((y[(i, j)] - expected).norm() < 1e-14);
            }
            assert!((y[(i, i)] - z[(i, i)]).norm() < 1e-14);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(DeltaAction::new(vec![1.0, 0.0]), Err(SpecFunError::NonPositiveEigenvalue(0.0)));
        let act = DeltaAction::new(vec![1.0]).unwrap();
        let x = Mat::<c64>::zeros(2, 2);
        assert!(matches!(apply(SpectralFunction::G, &act, x.as_ref()), Err(SpecFunError::DimensionMismatch { .. })));
        assert!(SpectralFunction::Q.eval(1.0).is_err());
        assert!(SpectralFunction::G.eval2(1.0, 1.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in SpectralFunction::ALL {
            assert_eq!(SpectralFunction::from_name(f.name()), Some(f));
        }
        assert_eq!(log_grid(1e-3, 1e3, 7)[3], 1.0);
    }
}
