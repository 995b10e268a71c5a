//! Galerkin truncations of `D`, `hDh` and `H(D+A)H` on the Fourier basis
//! `{e^{2πik·x} ⊗ spinor ⊗ ℂⁿ : |k_i| ≤ N}`.

use std::f64::consts::PI;

use faer::{c64, Mat, Scale, Side};
use serde::Serialize;

use crate::function::{FourierCoeffs, MatrixFunction};
use crate::NumericsError;

/// Coefficients below this fraction of the largest one count as zero when
/// measuring a band limit.
pub const BAND_TOL: f64 = 1e-15;

/// Relative Hermiticity defect tolerated before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Extra Fourier shell used for the intermediate space of a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Guard {
    /// The measured band limit of the multiplier.
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Guard {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Guard, NumericsError> {
        if s == "auto" {
            return Ok(Guard::Auto);
        }
        s.parse().map(Guard::Fixed).map_err(|_| NumericsError::Input(format!("bad guard {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Compression {
    pub guard: usize,
    pub band_limit: usize,
    /// Frobenius mass of the multiplier's Fourier modes beyond the guard.
    pub tail: f64,
    /// True when the guard covers the band limit, so the compressed product
    /// equals the Galerkin matrix of the full operator.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub cutoff: usize,
    pub n: usize,
    pub matrix: Mat<c64>,
    pub compression: Option<Compression>,
}

/// Modes `(k₁,k₂)` with `|k_i| ≤ cutoff`, `k₁` outermost.
pub fn modes(cutoff: usize) -> Vec<(i64, i64)> {
    let c = cutoff as i64;
    (-c..=c).flat_map(|a| (-c..=c).map(move |b| (a, b))).collect()
}

pub fn dimension(cutoff: usize, n: usize) -> usize {
    2 * n * (2 * cutoff + 1).pow(2)
}

/// Writes `Σ_j σ^j ⊗ X_j` into the `2n×2n` block at `(row, col)`.
fn put_sigma(m: &mut Mat<c64>, row: usize, col: usize, n: usize, x1: &Mat<c64>, x2: &Mat<c64>) {
    let i = c64::new(0.0, 1.0);
    for a in 0..n {
        for b in 0..n {
            m[(row + a, col + n + b)] += x1[(a, b)] - i * x2[(a, b)];
            m[(row + n + a, col + b)] += x1[(a, b)] + i * x2[(a, b)];
        }
    }
}

/// `Σ_j σ^j ⊗ [S(k−k′)·2πk′_j + Z_j(k−k′)]` on cutoff `N`.
fn first_order(n: usize, cutoff: usize, sq: Option<&FourierCoeffs>, zeroth: [Option<&FourierCoeffs>; 2]) -> Mat<c64> {
    let ms = modes(cutoff);
    let bs = 2 * n;
    let mut out = Mat::<c64>::zeros(bs * ms.len(), bs * ms.len());
    let id = Mat::<c64>::identity(n, n);
    let zero = Mat::<c64>::zeros(n, n);
    for (p, &(p1, p2)) in ms.iter().enumerate() {
        for (q, &(q1, q2)) in ms.iter().enumerate() {
            let d = (p1 - q1, p2 - q2);
            let s = match sq {
                Some(c) => c.get(d.0, d.1),
                None if d == (0, 0) => &id,
                None => &zero,
            };
            let mut x = [s * Scale(c64::new(2.0 * PI * q1 as f64, 0.0)), s * Scale(c64::new(2.0 * PI * q2 as f64, 0.0))];
            for (xj, z) in x.iter_mut().zip(zeroth) {
                if let Some(z) = z {
                    *xj += z.get(d.0, d.1);
                }
            }
            put_sigma(&mut out, p * bs, q * bs, n, &x[0], &x[1]);
        }
    }
    out
}

/// `f̂(k−k′) ⊗ 1_spin` from cutoff `cols` to cutoff `rows`.
fn multiplication(coeffs: &FourierCoeffs, rows: usize, cols: usize) -> Mat<c64> {
    let n = coeffs.n();
    let (mr, mc) = (modes(rows), modes(cols));
    let bs = 2 * n;
    let mut out = Mat::<c64>::zeros(bs * mr.len(), bs * mc.len());
    for (p, &(p1, p2)) in mr.iter().enumerate() {
        for (q, &(q1, q2)) in mc.iter().enumerate() {
            let c = coeffs.get(p1 - q1, p2 - q2);
            for s in 0..2 {
                for a in 0..n {
                    for b in 0..n {
                        out[(p * bs + s * n + a, q * bs + s * n + b)] = c[(a, b)];
                    }
                }
            }
        }
    }
    out
}

impl TruncatedOperator {
    fn finish(cutoff: usize, n: usize, mut matrix: Mat<c64>, compression: Option<Compression>) -> Result<TruncatedOperator, NumericsError> {
        let defect = relative_hermitian_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(NumericsError::OperatorNotHermitian { defect });
        }
        let sym = Mat::from_fn(matrix.nrows(), matrix.ncols(), |r, c| (matrix[(r, c)] + matrix[(c, r)].conj()) * 0.5);
        matrix = sym;
        Ok(TruncatedOperator { cutoff, n, matrix, compression })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermitian_defect(&self) -> f64 {
        relative_hermitian_defect(&self.matrix)
    }

    /// True when no two distinct Fourier modes are coupled.
    pub fn is_block_diagonal(&self) -> bool {
        let bs = 2 * self.n;
        let m = &self.matrix;
        (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| r / bs == c / bs || m[(r, c)] == c64::new(0.0, 0.0)))
    }

    /// Eigenvalues in nondecreasing order; mode-diagonal operators are solved
    /// block by block.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, NumericsError> {
        let mut out = if self.is_block_diagonal() {
            let bs = 2 * self.n;
            let mut v = Vec::with_capacity(self.dim());
            for b in 0..self.dim() / bs {
                let block = self.matrix.submatrix(b * bs, b * bs, bs, bs).to_owned();
                v.extend(block.self_adjoint_eigenvalues(Side::Lower).map_err(|_| NumericsError::Eigen)?);
            }
            v
        } else {
            self.matrix.self_adjoint_eigenvalues(Side::Lower).map_err(|_| NumericsError::Eigen)?
        };
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Eigenvalues and orthonormal eigenvectors (columns).
    pub fn eigen(&self) -> Result<(Vec<f64>, Mat<c64>), NumericsError> {
        let evd = self.matrix.self_adjoint_eigen(Side::Lower).map_err(|_| NumericsError::Eigen)?;
        let vals = evd.S().column_vector().iter().map(|x| x.re).collect();
        Ok((vals, evd.U().to_owned()))
    }
}

fn relative_hermitian_defect(m: &Mat<c64>) -> f64 {
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..=r {
            defect = defect.max((m[(r, c)] - m[(c, r)].conj()).norm());
            scale = scale.max(m[(r, c)].norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        defect / scale
    }
}

/// `D = σ¹δ₁ + σ²δ₂ ⊗ 1_n`, block diagonal in `k`.
pub fn build_dirac(cutoff: usize, n: usize) -> Result<TruncatedOperator, NumericsError> {
    if cutoff == 0 {
        return Err(NumericsError::Input("cutoff must be at least 1".into()));
    }
    TruncatedOperator::finish(cutoff, n, first_order(n, cutoff, None, [None, None]), None)
}

/// Closed-form spectrum of `build_dirac`: `±2π|k|`, each `n` times.
pub fn dirac_spectrum(cutoff: usize, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dimension(cutoff, n));
    for (k1, k2) in modes(cutoff) {
        let r = 2.0 * PI * ((k1 * k1 + k2 * k2) as f64).sqrt();
        for _ in 0..n {
            out.push(r);
            out.push(-r);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Multiplication by `f` with blocks `f̂(k−k′) ⊗ 1_spin`.
pub fn build_mult(f: &MatrixFunction, cutoff: usize) -> Result<TruncatedOperator, NumericsError> {
    let coeffs = f.coefficients();
    let band = coeffs.band_limit(BAND_TOL);
    if band > 2 * cutoff {
        return Err(NumericsError::BandLimit { band, cutoff });
    }
    let matrix = multiplication(&coeffs, cutoff, cutoff);
    let out = TruncatedOperator { cutoff, n: f.n(), matrix, compression: None };
    if f.hermitian_defect() <= 1e-12 {
        return TruncatedOperator::finish(cutoff, f.n(), out.matrix, None);
    }
    Ok(out)
}

fn resolve_guard(coeffs: &FourierCoeffs, guard: Guard) -> Compression {
    let band_limit = coeffs.band_limit(BAND_TOL);
    let guard = match guard {
        Guard::Auto => band_limit,
        Guard::Fixed(g) => g,
    };
    Compression { guard, band_limit, tail: coeffs.tail_norm(guard), exact: guard >= band_limit }
}

/// `P_N M_m (D + σ·A) M_m P_N` through the explicit cutoff `N + guard`.
fn sandwich_through_guard(
    m: &FourierCoeffs,
    a: Option<[&FourierCoeffs; 2]>,
    cutoff: usize,
    guard: usize,
) -> Mat<c64> {
    let n = m.n();
    let big = cutoff + guard;
    let b = multiplication(m, big, cutoff);
    let middle = first_order(n, big, None, a.map_or([None, None], |[a1, a2]| [Some(a1), Some(a2)]));
    b.adjoint() * (&middle * &b)
}

/// `D_h = hDh` for a positive Hermitian field `h`.
pub fn assemble_rescaled(h: &MatrixFunction, cutoff: usize, guard: Guard) -> Result<TruncatedOperator, NumericsError> {
    h.check_positive("h")?;
    let coeffs = h.coefficients();
    let comp = resolve_guard(&coeffs, guard);
    let matrix = if comp.exact {
        // hDh = Σ σ^j (h²δ_j + h δ_j(h))
        let sq = h.mul(h).coefficients();
        let z = [h.mul(&h.delta(0)).coefficients(), h.mul(&h.delta(1)).coefficients()];
        first_order(h.n(), cutoff, Some(&sq), [Some(&z[0]), Some(&z[1])])
    } else {
        sandwich_through_guard(&coeffs, None, cutoff, comp.guard)
    };
    TruncatedOperator::finish(cutoff, h.n(), matrix, Some(comp))
}

/// `D_{A,H} = H(D + σ¹A₁ + σ²A₂)H` for diagonal positive `H` and Hermitian `A_i`.
pub fn assemble_hda(
    big_h: &MatrixFunction,
    a: &[MatrixFunction; 2],
    cutoff: usize,
    guard: Guard,
) -> Result<TruncatedOperator, NumericsError> {
    big_h.check_positive("H")?;
    if !big_h.is_diagonal(1e-12) {
        return Err(NumericsError::Input("H must be diagonal".into()));
    }
    for ai in a {
        let defect = ai.hermitian_defect();
        if defect > 1e-12 {
            return Err(NumericsError::NotHermitian { name: "A", defect });
        }
    }
    let coeffs = big_h.coefficients();
    let comp = resolve_guard(&coeffs, guard);
    let matrix = if comp.exact {
        let sq = big_h.mul(big_h).coefficients();
        let z = [0, 1].map(|j| big_h.mul(&big_h.delta(j)).add(&big_h.mul(&a[j]).mul(big_h)).coefficients());
        first_order(big_h.n(), cutoff, Some(&sq), [Some(&z[0]), Some(&z[1])])
    } else {
        let ac = [a[0].coefficients(), a[1].coefficients()];
        sandwich_through_guard(&coeffs, Some([&ac[0], &ac[1]]), cutoff, comp.guard)
    };
    TruncatedOperator::finish(cutoff, big_h.n(), matrix, Some(comp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::DEFAULT_GRID;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn dirac_n1_cutoff1_enumeration() {
        let d = build_dirac(1, 1).unwrap();
        assert_eq!(d.dim(), 18);
        assert!(d.is_block_diagonal());
        assert_eq!(d.hermitian_defect(), 0.0);
        let ev = d.eigenvalues().unwrap();
        let s = 2.0 * PI;
        let q = 2.0 * PI * 2f64.sqrt();
        let mut want = vec![0.0, 0.0];
        want.extend([s, -s, s, -s, s, -s, s, -s, q, -q, q, -q, q, -q, q, -q]);
        want.sort_by(f64::total_cmp);
        assert!(close(&ev, &want, 1e-12));
        let full = d.matrix.self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert!(close(&full, &want, 1e-12));
    }

    #[test]
    fn dirac_kernel_is_constant_spinors() {
        for n in 1..=3 {
            let ev = build_dirac(2, n).unwrap().eigenvalues().unwrap();
            assert_eq!(ev.iter().filter(|x| x.abs() < 1e-12).count(), 2 * n);
            assert!(close(&ev, &dirac_spectrum(2, n), 1e-12));
        }
    }

    #[test]
    fn identity_multiplier() {
        let m = build_mult(&MatrixFunction::identity(2, 16), 2).unwrap();
        assert!((&m.matrix - Mat::<c64>::identity(m.dim(), m.dim())).norm_max() < 1e-14);
    }

    #[test]
    fn single_mode_is_a_shift() {
        let f = MatrixFunction::from_fn(1, 16, |x, _| {
            let ph = 2.0 * PI * x;
            Mat::from_fn(1, 1, |_, _| c64::new(ph.cos(), ph.sin()))
        });
        let m = build_mult(&f, 1).unwrap();
        let ms = modes(1);
        for (p, &(p1, p2)) in ms.iter().enumerate() {
            for (q, &(q1, q2)) in ms.iter().enumerate() {
                let want = if p1 == q1 + 1 && p2 == q2 { 1.0 } else { 0.0 };
                for s in 0..2 {
                    assert!((m.matrix[(2 * p + s, 2 * q + s)] - c64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn band_limit_violation() {
        let f = MatrixFunction::scalar(1, 32, |x, _| (2.0 * PI * 5.0 * x).cos());
        assert!(matches!(build_mult(&f, 2), Err(NumericsError::BandLimit { band: 5, cutoff: 2 })));
    }

    #[test]
    fn constant_rescaling_scales_spectrum() {
        let c = 1.7;
        let h = MatrixFunction::scalar(2, 16, |_, _| c);
        let ev = assemble_rescaled(&h, 3, Guard::Auto).unwrap().eigenvalues().unwrap();
        let want: Vec<f64> = dirac_spectrum(3, 2).iter().map(|x| c * c * x).collect();
        assert!(close(&ev, &want, 1e-10));
    }

    #[test]
    fn constant_unitary_conjugation() {
        let big_h = MatrixFunction::diagonal(2, DEFAULT_GRID, |a, x, y| {
            if a == 0 { (0.3 * (2.0 * PI * x).cos()).exp() } else { (0.2 * (2.0 * PI * y).sin()).exp() }
        });
        let t = 0.7f64;
        let u = Mat::from_fn(2, 2, |r, c| if r == c { c64::new(t.cos(), 0.0) } else { c64::new(0.0, t.sin()) });
        let h = big_h.map(|m| &u * m * u.adjoint());
        let e1 = assemble_rescaled(&h, 3, Guard::Auto).unwrap().eigenvalues().unwrap();
        let e2 = assemble_rescaled(&big_h, 3, Guard::Auto).unwrap().eigenvalues().unwrap();
        assert!(close(&e1, &e2, 1e-9));
    }

    #[test]
    fn guard_path_agrees_with_exact_assembly() {
        let h = MatrixFunction::scalar(1, 32, |x, y| 1.0 + 0.2 * (2.0 * PI * x).cos() + 0.1 * (2.0 * PI * y).sin());
        let exact = assemble_rescaled(&h, 3, Guard::Auto).unwrap();
        let c = exact.compression.clone().unwrap();
        assert_eq!((c.band_limit, c.exact), (1, true));
        let through = assemble_rescaled(&h, 3, Guard::Fixed(1)).unwrap();
        assert!((&exact.matrix - &through.matrix).norm_max() < 1e-10);
        let short = assemble_rescaled(&h, 3, Guard::Fixed(0)).unwrap();
        assert!(!short.compression.unwrap().exact);
        assert!((&exact.matrix - &short.matrix).norm_max() > 1e-3);
    }

    #[test]
    fn generic_rescaling_is_hermitian_with_full_kernel() {
        let h = MatrixFunction::scalar(2, DEFAULT_GRID, |x, y| (0.3 * (2.0 * PI * x).cos() + 0.2 * (2.0 * PI * y).sin()).exp());
        let op = assemble_rescaled(&h, 6, Guard::Auto).unwrap();
        assert!(op.hermitian_defect() < 1e-15);
        let ev = op.eigenvalues().unwrap();
        assert_eq!(ev.iter().filter(|x| x.abs() < 1e-6).count(), 4);
    }

    #[test]
    fn hda_without_a_matches_rescaled() {
        let big_h = MatrixFunction::diagonal(2, 64, |a, x, y| (0.3 * (2.0 * PI * (x + a as f64 * y)).cos()).exp());
        let zero = MatrixFunction::constant(64, Mat::zeros(2, 2));
        let e1 = assemble_hda(&big_h, &[zero.clone(), zero], 3, Guard::Auto).unwrap();
        let e2 = assemble_rescaled(&big_h, 3, Guard::Auto).unwrap();
        assert!((&e1.matrix - &e2.matrix).norm_max() < 1e-12);
    }

    #[test]
    fn negative_factor_is_rejected() {
        let h = MatrixFunction::scalar(1, 16, |x, _| (2.0 * PI * x).sin());
        assert!(matches!(assemble_rescaled(&h, 2, Guard::Auto), Err(NumericsError::NotPositive { .. })));
    }
}
