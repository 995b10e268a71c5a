//! Assembled curvature density and its pointwise evaluation.

use faer::{c64, Mat};
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{integrate_pure_h, integrate_sandwich, prepare, SandwichTerm, Slot, XiError};
use crate::specfun::DeltaAction;
use crate::symcalc::{build_a_symbols, build_b_symbols, split_by_a_degree, Generator, SymbolPoly};

/// `R = pure-H part + Σ sandwich terms`; all coefficients are multiples of `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureDensity {
    pub pure_h: SymbolPoly,
    pub sandwich: Vec<SandwichTerm>,
}

/// Which piece of the density a term belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DensityPart {
    PureH,
    /// Linear in `A`, `δH` on the right.
    LinearRight,
    /// Linear in `A`, `δH` on the left.
    LinearLeft,
    Derivative,
    Quadratic,
}

impl SandwichTerm {
    pub fn part(&self) -> DensityPart {
        match self.slot {
            Slot::A(_) if self.left_mult.is_some() => DensityPart::LinearLeft,
            Slot::A(_) => DensityPart::LinearRight,
            Slot::DeltaA(..) => DensityPart::Derivative,
            Slot::AA(..) => DensityPart::Quadratic,
        }
    }
}

/// Local data in the eigenbasis of `H`, with `δ = −i∂`.
#[derive(Clone, Debug)]
pub struct PointData {
    pub lambda: Vec<f64>,
    /// `δ_i(H)` diagonal.
    pub delta_h: [Vec<c64>; 2],
    /// `δ_iδ_j(H)` diagonal.
    pub hess_h: [[Vec<c64>; 2]; 2],
    pub a: [Mat<c64>; 2],
    /// `delta_a[i][j] = δ_j(A_i)`.
    pub delta_a: [[Mat<c64>; 2]; 2],
}

impl PointData {
    /// From ordinary derivatives `∂_i`, converting to `δ_i = −i∂_i`.
    pub fn from_partials(
        lambda: Vec<f64>,
        grad: [Vec<f64>; 2],
        hessian: [[Vec<f64>; 2]; 2],
        a: [Mat<c64>; 2],
        grad_a: [[Mat<c64>; 2]; 2],
    ) -> PointData {
        let mi = c64::new(0.0, -1.0);
        let d1 = |v: &Vec<f64>| v.iter().map(|x| mi * x).collect::<Vec<_>>();
        let d2 = |v: &Vec<f64>| v.iter().map(|x| c64::new(-x, 0.0)).collect::<Vec<_>>();
        let da = |m: &Mat<c64>| Mat::from_fn(m.nrows(), m.ncols(), |i, j| mi * m[(i, j)]);
        PointData {
            delta_h: [d1(&grad[0]), d1(&grad[1])],
            hess_h: [[d2(&hessian[0][0]), d2(&hessian[0][1])], [d2(&hessian[1][0]), d2(&hessian[1][1])]],
            delta_a: [[da(&grad_a[0][0]), da(&grad_a[0][1])], [da(&grad_a[1][0]), da(&grad_a[1][1])]],
            lambda,
            a,
        }
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    fn check(&self) -> Result<(), XiError> {
        let n = self.n();
        let vec_ok = self.delta_h.iter().chain(self.hess_h.iter().flatten()).all(|v| v.len() == n);
        let mat_ok = self.a.iter().chain(self.delta_a.iter().flatten()).all(|m| m.nrows() == n && m.ncols() == n);
        if vec_ok && mat_ok {
            Ok(())
        } else {
            Err(XiError::Shape(format!("expected n = {n} throughout")))
        }
    }

    fn generator_value(&self, g: Generator, a: usize) -> Result<c64, XiError> {
        Ok(match g {
            Generator::HPow(p) => c64::new(self.lambda[a].powi(p), 0.0),
            Generator::DeltaH(d) => self.delta_h[d.index()][a],
            Generator::HessH(i, j) => self.hess_h[i.index()][j.index()][a],
            Generator::LapH => self.hess_h[0][0][a] + self.hess_h[1][1][a],
            other => return Err(XiError::NonFactorable(format!("{} in pure-H density", other.tag()))),
        })
    }
}

fn pi_times(r: &num_rational::BigRational) -> f64 {
    std::f64::consts::PI * r.to_f64().unwrap_or(f64::NAN)
}

impl CurvatureDensity {
    pub fn evaluate_pure_h(&self, p: &PointData) -> Result<Mat<c64>, XiError> {
        p.check()?;
        let n = p.n();
        let mut out = Mat::zeros(n, n);
        for (basis, coeff) in self.pure_h.iter() {
            let c = pi_times(coeff);
            for a in 0..n {
                let mut v = c64::new(c, 0.0);
                for g in &basis.word {
                    v *= p.generator_value(*g, a)?;
                }
                out[(a, a)] += v;
            }
        }
        Ok(out)
    }

    pub fn evaluate_term(term: &SandwichTerm, p: &PointData) -> Result<Mat<c64>, XiError> {
        p.check()?;
        let n = p.n();
        let act = DeltaAction::new(p.lambda.clone())?;
        let c = pi_times(&term.coeff);
        let mult = |m: Option<crate::symcalc::Dir>, a: usize| m.map_or(c64::new(1.0, 0.0), |d| p.delta_h[d.index()][a]);
        let mut out = Mat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let s_ab = act.ratio(a, b);
                let inner = match term.slot {
                    Slot::A(i) => p.a[i.index()][(a, b)] * term.function.eval(s_ab)?,
                    Slot::DeltaA(i, j) => p.delta_a[i.index()][j.index()][(a, b)] * term.function.eval(s_ab)?,
                    Slot::AA(i, j) => {
                        let mut acc = c64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += p.a[i.index()][(a, k)]
                                * p.a[j.index()][(k, b)]
                                * term.function.eval2(act.ratio(a, k), s_ab)?;
                        }
                        acc
                    }
                };
                out[(a, b)] = inner
                    * c
                    * p.lambda[a].powi(term.left_power)
                    * p.lambda[b].powi(term.right_power)
                    * mult(term.left_mult, a)
                    * mult(term.right_mult, b);
            }
        }
        Ok(out)
    }

    /// Sum of the terms belonging to `part`.
    pub fn evaluate_part(&self, part: DensityPart, p: &PointData) -> Result<Mat<c64>, XiError> {
        if part == DensityPart::PureH {
            return self.evaluate_pure_h(p);
        }
        let mut out = Mat::zeros(p.n(), p.n());
        for t in self.sandwich.iter().filter(|t| t.part() == part) {
            out += CurvatureDensity::evaluate_term(t, p)?;
        }
        Ok(out)
    }

    pub fn evaluate(&self, p: &PointData) -> Result<Mat<c64>, XiError> {
        let mut out = self.evaluate_pure_h(p)?;
        for t in &self.sandwich {
            out += CurvatureDensity::evaluate_term(t, p)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "measure": "d^2 xi, per spinor component; coefficients are multiples of pi",
            "pure_h": self.pure_h.to_json(),
            "pure_h_latex": self.pure_h.to_latex(),
            "sandwich": self.sandwich,
            "sandwich_latex": self.sandwich.iter().map(|t| t.latex()).collect::<Vec<_>>(),
        })
    }
}

/// Runs the whole symbolic pipeline: symbols with `A`, parametrix, split,
/// and ξ-integration of every part.
pub fn curvature_density() -> Result<CurvatureDensity, XiError> {
    let a = build_a_symbols(true);
    let b = build_b_symbols(&a)?;
    let split = split_by_a_degree(&b.b2)?;
    let pure_h = integrate_pure_h(&prepare(&split.deg0))?;
    let mut sandwich = Vec::new();
    for part in [&split.lin_a, &split.lin_da, &split.quad_a] {
        sandwich.extend(integrate_sandwich(&prepare(part))?);
    }
    Ok(CurvatureDensity { pure_h, sandwich })
}

#[derive(Clone, Debug)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    pub density: Mat<c64>,
}

/// Evaluates the density on the `res × res` grid of `[0,1)²`.
pub fn sample_grid(
    density: &CurvatureDensity,
    res: usize,
    point: impl Fn(f64, f64) -> PointData,
) -> Result<Vec<GridSample>, XiError> {
    let mut out = Vec::with_capacity(res * res);
    for i in 0..res {
        for j in 0..res {
            let (x, y) = (i as f64 / res as f64, j as f64 / res as f64);
            out.push(GridSample { x, y, density: density.evaluate(&point(x, y))? });
        }
    }
    Ok(out)
}

/// Trapezoid approximation of `∫_{T²} Tr R` from a full uniform grid.
pub fn trace_integral(samples: &[GridSample]) -> c64 {
    let w = 1.0 / samples.len() as f64;
    samples.iter().map(|s| (0..s.density.nrows()).map(|i| s.density[(i, i)]).sum::<c64>() * w).sum()
}
