//! Matrix-valued functions on the torus, sampled on a uniform grid.

use faer::{c64, Mat, Scale, Side};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::NumericsError;

/// Default sampling grid; enough for the analytic profiles shipped here.
pub const DEFAULT_GRID: usize = 128;

/// `f: T² → M_n(ℂ)` stored as samples at `(i/grid, j/grid)`.
#[derive(Clone, Debug)]
pub struct MatrixFunction {
    n: usize,
    grid: usize,
    samples: Vec<Mat<c64>>,
}

impl MatrixFunction {
    pub fn from_fn(n: usize, grid: usize, f: impl Fn(f64, f64) -> Mat<c64>) -> MatrixFunction {
        let mut samples = Vec::with_capacity(grid * grid);
        for i in 0..grid {
            for j in 0..grid {
                let m = f(i as f64 / grid as f64, j as f64 / grid as f64);
                assert_eq!((m.nrows(), m.ncols()), (n, n), "sample has wrong shape");
                samples.push(m);
            }
        }
        MatrixFunction { n, grid, samples }
    }

    pub fn identity(n: usize, grid: usize) -> MatrixFunction {
        MatrixFunction::constant(grid, Mat::identity(n, n))
    }

    pub fn constant(grid: usize, m: Mat<c64>) -> MatrixFunction {
        let n = m.nrows();
        MatrixFunction { n, grid, samples: vec![m; grid * grid] }
    }

    /// `φ(x)·Id`.
    pub fn scalar(n: usize, grid: usize, phi: impl Fn(f64, f64) -> f64) -> MatrixFunction {
        MatrixFunction::from_fn(n, grid, |x, y| Mat::<c64>::identity(n, n) * Scale(c64::new(phi(x, y), 0.0)))
    }

    /// `diag(φ₀(x), …, φ_{n−1}(x))`.
    pub fn diagonal(n: usize, grid: usize, phi: impl Fn(usize, f64, f64) -> f64) -> MatrixFunction {
        MatrixFunction::from_fn(n, grid, |x, y| {
            Mat::from_fn(n, n, |r, c| if r == c { c64::new(phi(r, x, y), 0.0) } else { c64::new(0.0, 0.0) })
        })
    }

    /// Evaluates a finite Fourier series `Σ ĉ(k) e^{2πik·x}` on the grid.
    pub fn from_coefficients(n: usize, grid: usize, terms: &[((i64, i64), Mat<c64>)]) -> MatrixFunction {
        MatrixFunction::from_fn(n, grid, |x, y| {
            let mut m = Mat::<c64>::zeros(n, n);
            for ((k1, k2), c) in terms {
                let ph = 2.0 * std::f64::consts::PI * (*k1 as f64 * x + *k2 as f64 * y);
                m += c * Scale(c64::new(ph.cos(), ph.sin()));
            }
            m
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn sample(&self, i: usize, j: usize) -> &Mat<c64> {
        &self.samples[i * self.grid + j]
    }

    fn zip(&self, other: &MatrixFunction, f: impl Fn(&Mat<c64>, &Mat<c64>) -> Mat<c64>) -> MatrixFunction {
        assert_eq!(self.grid, other.grid, "grids differ");
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| f(a, b)).collect();
        MatrixFunction { n: self.n, grid: self.grid, samples }
    }

    pub fn map(&self, f: impl Fn(&Mat<c64>) -> Mat<c64>) -> MatrixFunction {
        let samples: Vec<Mat<c64>> = self.samples.iter().map(f).collect();
        let n = samples.first().map_or(self.n, |m| m.nrows());
        MatrixFunction { n, grid: self.grid, samples }
    }

    /// Pointwise product `self·other`.
    pub fn mul(&self, other: &MatrixFunction) -> MatrixFunction {
        self.zip(other, |a, b| a * b)
    }

    pub fn add(&self, other: &MatrixFunction) -> MatrixFunction {
        self.zip(other, |a, b| a + b)
    }

    pub fn adjoint(&self) -> MatrixFunction {
        self.map(|m| m.adjoint().to_owned())
    }

    pub fn coefficients(&self) -> FourierCoeffs {
        let g = self.grid;
        let n = self.n;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(g);
        let mut data = vec![Mat::<c64>::zeros(n, n); g * g];
        let norm = 1.0 / (g * g) as f64;
        let mut buf = vec![c64::new(0.0, 0.0); g * g];
        for r in 0..n {
            for c in 0..n {
                for (b, s) in buf.iter_mut().zip(&self.samples) {
                    *b = s[(r, c)];
                }
                for row in buf.chunks_mut(g) {
                    fft.process(row);
                }
                let mut col = vec![c64::new(0.0, 0.0); g];
                for j in 0..g {
                    for i in 0..g {
                        col[i] = buf[i * g + j];
                    }
                    fft.process(&mut col);
                    for i in 0..g {
                        buf[i * g + j] = col[i];
                    }
                }
                for (d, b) in data.iter_mut().zip(&buf) {
                    d[(r, c)] = b * norm;
                }
            }
        }
        FourierCoeffs { n, grid: g, data }
    }

    /// `δ_j f = −i∂_j f`, computed spectrally.
    pub fn delta(&self, dir: usize) -> MatrixFunction {
        let mut coeffs = self.coefficients();
        let g = self.grid as i64;
        for i in 0..g {
            for j in 0..g {
                let k = [wrap(i, g), wrap(j, g)][dir];
                // the Nyquist mode has no consistent real derivative
                let factor = if 2 * k.abs() == g { 0.0 } else { 2.0 * std::f64::consts::PI * k as f64 };
                let m = &mut coeffs.data[(i * g + j) as usize];
                *m = &*m * Scale(c64::new(factor, 0.0));
            }
        }
        coeffs.synthesize()
    }

    /// `max_x ‖f(x) − f(x)†‖`, entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| {
                let mut d = 0.0f64;
                for r in 0..self.n {
                    for c in 0..self.n {
                        d = d.max((m[(r, c)] - m[(c, r)].conj()).norm());
                    }
                }
                d
            })
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all samples of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| {
                let herm = Mat::from_fn(self.n, self.n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
                herm.self_adjoint_eigenvalues(Side::Lower).map_or(f64::NAN, |v| v[0])
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.samples.iter().all(|m| {
            (0..self.n).all(|r| (0..self.n).all(|c| r == c || m[(r, c)].norm() <= tol))
        })
    }

    /// Checks the hypotheses of a conformal factor: Hermitian and positive definite.
    pub fn check_positive(&self, name: &'static str) -> Result<(), NumericsError> {
        let defect = self.hermitian_defect();
        if defect > 1e-12 {
            return Err(NumericsError::NotHermitian { name, defect });
        }
        let min = self.min_eigenvalue();
        if !(min > 0.0) {
            return Err(NumericsError::NotPositive { name, min_eigenvalue: min });
        }
        Ok(())
    }
}

fn wrap(i: i64, g: i64) -> i64 {
    if i <= g / 2 {
        i
    } else {
        i - g
    }
}

/// Fourier coefficients `ĉ(k)`, stored with FFT ordering.
#[derive(Clone, Debug)]
pub struct FourierCoeffs {
    n: usize,
    grid: usize,
    data: Vec<Mat<c64>>,
}

impl FourierCoeffs {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `ĉ(k₁,k₂)` for `|k_i| < grid/2`.
    pub fn get(&self, k1: i64, k2: i64) -> &Mat<c64> {
        let g = self.grid as i64;
        let i = k1.rem_euclid(g) as usize;
        let j = k2.rem_euclid(g) as usize;
        &self.data[i * self.grid + j]
    }

    fn max_abs(m: &Mat<c64>) -> f64 {
        let mut d = 0.0f64;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                d = d.max(m[(r, c)].norm());
            }
        }
        d
    }

    /// Frobenius mass of the modes with `|k|_∞ > k`.
    pub fn tail_norm(&self, k: usize) -> f64 {
        let g = self.grid as i64;
        let mut acc = 0.0;
        for i in 0..g {
            for j in 0..g {
                if wrap(i, g).unsigned_abs() as usize > k || wrap(j, g).unsigned_abs() as usize > k {
                    acc += self.data[(i * g + j) as usize].squared_norm_l2();
                }
            }
        }
        acc.sqrt()
    }

    /// Smallest `K` with every coefficient outside `[−K,K]²` below `rel_tol · max|ĉ|`.
    pub fn band_limit(&self, rel_tol: f64) -> usize {
        let g = self.grid as i64;
        let peak = self.data.iter().map(FourierCoeffs::max_abs).fold(0.0, f64::max);
        let mut k = 0usize;
        for i in 0..g {
            for j in 0..g {
                if FourierCoeffs::max_abs(&self.data[(i * g + j) as usize]) > rel_tol * peak {
                    k = k.max(wrap(i, g).unsigned_abs() as usize).max(wrap(j, g).unsigned_abs() as usize);
                }
            }
        }
        k
    }

    /// Inverse transform back to samples.
    pub fn synthesize(&self) -> MatrixFunction {
        let g = self.grid;
        let n = self.n;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(g);
        let mut samples = vec![Mat::<c64>::zeros(n, n); g * g];
        let mut buf = vec![c64::new(0.0, 0.0); g * g];
        for r in 0..n {
            for c in 0..n {
                for (b, d) in buf.iter_mut().zip(&self.data) {
                    *b = d[(r, c)];
                }
                for row in buf.chunks_mut(g) {
                    fft.process(row);
                }
                let mut col = vec![c64::new(0.0, 0.0); g];
                for j in 0..g {
                    for i in 0..g {
                        col[i] = buf[i * g + j];
                    }
                    fft.process(&mut col);
                    for i in 0..g {
                        buf[i * g + j] = col[i];
                    }
                }
                for (s, b) in samples.iter_mut().zip(&buf) {
                    s[(r, c)] = *b;
                }
            }
        }
        MatrixFunction { n, grid: g, samples }
    }
}

/// One explicit Fourier coefficient of a matrix entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub row: usize,
    pub col: usize,
    pub k1: i64,
    pub k2: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Builds the Fourier series listed entry by entry.
pub fn from_coefficient_list(n: usize, grid: usize, list: &[Coefficient]) -> Result<MatrixFunction, NumericsError> {
    let mut terms = Vec::with_capacity(list.len());
    for c in list {
        if c.row >= n || c.col >= n {
            return Err(NumericsError::Input(format!("coefficient entry ({}, {}) outside {n}×{n}", c.row, c.col)));
        }
        let mut m = Mat::<c64>::zeros(n, n);
        m[(c.row, c.col)] = c64::new(c.re, c.im);
        terms.push(((c.k1, c.k2), m));
    }
    Ok(MatrixFunction::from_coefficients(n, grid, &terms))
}

/// `exp(iX)` pointwise for a Hermitian field `X`.
pub fn unitary_exp(x: &MatrixFunction) -> Result<MatrixFunction, NumericsError> {
    let defect = x.hermitian_defect();
    if defect > 1e-12 {
        return Err(NumericsError::NotHermitian { name: "unitary generator", defect });
    }
    Ok(x.map(|m| {
        let evd = m.self_adjoint_eigen(Side::Lower).expect("small Hermitian eigenproblem");
        let u = evd.U();
        let s = evd.S().column_vector();
        let n = m.nrows();
        Mat::from_fn(n, n, |r, c| {
            (0..n).map(|k| u[(r, k)] * c64::new(s[k].re.cos(), s[k].re.sin()) * u[(c, k)].conj()).sum()
        })
    }))
}

/// `exp(X)` pointwise for a Hermitian field `X`; positive definite by construction.
pub fn positive_exp(x: &MatrixFunction) -> Result<MatrixFunction, NumericsError> {
    let defect = x.hermitian_defect();
    if defect > 1e-12 {
        return Err(NumericsError::NotHermitian { name: "logarithm", defect });
    }
    Ok(x.map(|m| {
        let evd = m.self_adjoint_eigen(Side::Lower).expect("small Hermitian eigenproblem");
        let u = evd.U();
        let s = evd.S().column_vector();
        let n = m.nrows();
        Mat::from_fn(n, n, |r, c| (0..n).map(|k| u[(r, k)] * s[k].re.exp() * u[(c, k)].conj()).sum())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_coefficients() {
        let f = MatrixFunction::from_fn(1, 16, |x, y| {
            let ph = 2.0 * PI * (2.0 * x - y);
            Mat::from_fn(1, 1, |_, _| c64::new(3.0 * ph.cos(), 3.0 * ph.sin()))
        });
        let c = f.coefficients();
        assert!((c.get(2, -1)[(0, 0)] - c64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(c.get(1, 0)[(0, 0)].norm() < 1e-12);
        assert_eq!(c.band_limit(1e-12), 2);
        assert!(c.tail_norm(2) < 1e-12);
    }

    #[test]
    fn spectral_derivative_of_cosine() {
        let f = MatrixFunction::scalar(1, 32, |x, _| (2.0 * PI * x).cos());
        let d = f.delta(0);
        for i in 0..32 {
            let x = i as f64 / 32.0;
            let want = c64::new(0.0, 2.0 * PI * (2.0 * PI * x).sin());
            assert!((d.sample(i, 3)[(0, 0)] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn synthesis_inverts_analysis() {
        let f = MatrixFunction::from_fn(2, 32, |x, y| {
            Mat::from_fn(2, 2, |r, c| c64::new((x + r as f64).sin() * (2.0 * PI * y).cos(), (c as f64) * x))
        });
        let g = f.coefficients().synthesize();
        for i in 0..32 {
            for j in 0..32 {
                assert!((f.sample(i, j) - g.sample(i, j)).norm_max() < 1e-12);
            }
        }
    }

    #[test]
    fn positivity_is_checked() {
        let good = MatrixFunction::scalar(2, 16, |x, _| (0.3 * (2.0 * PI * x).cos()).exp());
        assert!(good.check_positive("h").is_ok());
        let bad = MatrixFunction::scalar(2, 16, |x, _| (2.0 * PI * x).cos());
        assert!(matches!(bad.check_positive("h"), Err(NumericsError::NotPositive { .. })));
    }

    #[test]
    fn exponentials_of_generators() {
        let x = MatrixFunction::from_fn(2, 8, |x, _| {
            let t = (2.0 * PI * x).cos();
            Mat::from_fn(2, 2, |r, c| if r == c { c64::new(0.0, 0.0) } else { c64::new(t, 0.0) })
        });
        let u = unitary_exp(&x).unwrap();
        let uu = u.mul(&u.adjoint());
        for i in 0..8 {
            assert!((uu.sample(i, 0) - Mat::<c64>::identity(2, 2)).norm_max() < 1e-12);
        }
        let p = positive_exp(&x).unwrap();
        assert!(p.min_eigenvalue() > 0.0);
    }
}
