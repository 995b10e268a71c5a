//! Named conformal profiles `h = UHU*` and profiles read from explicit
//! Fourier coefficients.

use std::f64::consts::PI;

use faer::{c64, Mat, Scale};
use serde::{Deserialize, Serialize};

use crate::function::{from_coefficient_list, unitary_exp, Coefficient, MatrixFunction, DEFAULT_GRID};
use crate::operator::{assemble_hda, assemble_rescaled, Guard, TruncatedOperator};
use crate::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// `h = 1`.
    P1,
    /// `h = e^{0.3cos2πx₁}·1`.
    P2,
    /// `H = diag(e^{0.3cos2πx₁}, e^{0.2sin2πx₂}, …)`, `U = exp(iθσ_rot)`, `θ = a·cos2πx₂`.
    P3,
    /// Same `H`, `U = 1`, with the explicit field `A_j = ∂_jθ·σ_rot`.
    P4,
}

impl std::str::FromStr for Profile {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Profile, NumericsError> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(Profile::P1),
            "P2" => Ok(Profile::P2),
            "P3" => Ok(Profile::P3),
            "P4" => Ok(Profile::P4),
            _ => Err(NumericsError::Input(format!("unknown profile {s:?}"))),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Default amplitude of the rotation angle `θ` in P3/P4.
pub const ROTATION_AMPLITUDE: f64 = PI / 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub n: usize,
    pub grid: usize,
    pub rotation: f64,
}

impl ProfileParams {
    pub fn new(n: usize) -> ProfileParams {
        ProfileParams { n, grid: DEFAULT_GRID, rotation: ROTATION_AMPLITUDE }
    }
}

/// A profile explicitly given by Fourier coefficients.
///
/// `H` is diagonal, `U = exp(iX)` for the Hermitian generator `X`. When `a1`
/// or `a2` is nonempty the operator is `H(D+A)H`, otherwise `hDh` with `h = UHU*`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CustomProfile {
    pub n: usize,
    pub h: Vec<Coefficient>,
    #[serde(default)]
    pub u_generator: Vec<Coefficient>,
    #[serde(default)]
    pub a1: Vec<Coefficient>,
    #[serde(default)]
    pub a2: Vec<Coefficient>,
}

#[derive(Clone, Debug)]
pub struct ProfileFields {
    pub n: usize,
    /// The full conformal factor `h = UHU*`.
    pub h: MatrixFunction,
    pub big_h: MatrixFunction,
    pub a: Option<[MatrixFunction; 2]>,
    /// The unitary of `h = UHU*`, when it is not the identity.
    pub u: Option<MatrixFunction>,
}

impl ProfileFields {
    /// `hDh`, or `H(D+A)H` when the profile carries an explicit `A`.
    pub fn operator(&self, cutoff: usize, guard: Guard) -> Result<TruncatedOperator, NumericsError> {
        match &self.a {
            Some(a) => assemble_hda(&self.big_h, a, cutoff, guard),
            None => assemble_rescaled(&self.h, cutoff, guard),
        }
    }

    /// The field `A` of the unitarily equivalent `H(D+A)H`: the explicit one,
    /// or `A_j = U*δ_j(U)`.
    pub fn gauge_field(&self) -> [MatrixFunction; 2] {
        if let Some(a) = &self.a {
            return a.clone();
        }
        let grid = self.big_h.grid();
        match &self.u {
            Some(u) => [u.adjoint().mul(&u.delta(0)), u.adjoint().mul(&u.delta(1))],
            None => std::array::from_fn(|_| MatrixFunction::constant(grid, Mat::zeros(self.n, self.n))),
        }
    }
}

/// `σ_rot`: swaps the first two basis vectors.
fn sigma_rot(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |r, c| if (r, c) == (0, 1) || (r, c) == (1, 0) { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

fn log_h(a: usize, x: f64, y: f64) -> f64 {
    match a {
        0 => 0.3 * (2.0 * PI * x).cos(),
        1 => 0.2 * (2.0 * PI * y).sin(),
        _ => 0.1 * (2.0 * PI * (x + a as f64 * y)).cos(),
    }
}

pub fn profile_fields(profile: Profile, p: &ProfileParams) -> Result<ProfileFields, NumericsError> {
    let (n, grid) = (p.n, p.grid);
    if n == 0 {
        return Err(NumericsError::Input("matrix size must be positive".into()));
    }
    let scalar = |phi: fn(f64, f64) -> f64| MatrixFunction::scalar(n, grid, phi);
    match profile {
        Profile::P1 => {
            let h = scalar(|_, _| 1.0);
            Ok(ProfileFields { n, big_h: h.clone(), h, a: None, u: None })
        }
        Profile::P2 => {
            let h = scalar(|x, _| (0.3 * (2.0 * PI * x).cos()).exp());
            Ok(ProfileFields { n, big_h: h.clone(), h, a: None, u: None })
        }
        Profile::P3 | Profile::P4 => {
            if n < 2 {
                return Err(NumericsError::Input(format!("{profile} needs n ≥ 2")));
            }
            let big_h = MatrixFunction::diagonal(n, grid, |a, x, y| log_h(a, x, y).exp());
            let amp = p.rotation;
            let rot = sigma_rot(n);
            if profile == Profile::P3 {
                let theta = MatrixFunction::from_fn(n, grid, |_, y| &rot * Scale(c64::new(amp * (2.0 * PI * y).cos(), 0.0)));
                let u = unitary_exp(&theta)?;
                let h = u.mul(&big_h).mul(&u.adjoint());
                Ok(ProfileFields { n, h, big_h, a: None, u: Some(u) })
            } else {
                let a1 = MatrixFunction::constant(grid, Mat::zeros(n, n));
                let a2 = MatrixFunction::from_fn(n, grid, |_, y| {
                    &rot * Scale(c64::new(-2.0 * PI * amp * (2.0 * PI * y).sin(), 0.0))
                });
                Ok(ProfileFields { n, h: big_h.clone(), big_h, a: Some([a1, a2]), u: None })
            }
        }
    }
}

pub fn custom_fields(c: &CustomProfile, grid: usize) -> Result<ProfileFields, NumericsError> {
    let big_h = from_coefficient_list(c.n, grid, &c.h)?;
    big_h.check_positive("H")?;
    if !big_h.is_diagonal(1e-12) {
        return Err(NumericsError::Input("H must be diagonal".into()));
    }
    if !c.a1.is_empty() || !c.a2.is_empty() {
        let a = [from_coefficient_list(c.n, grid, &c.a1)?, from_coefficient_list(c.n, grid, &c.a2)?];
        return Ok(ProfileFields { n: c.n, h: big_h.clone(), big_h, a: Some(a), u: None });
    }
    let u = unitary_exp(&from_coefficient_list(c.n, grid, &c.u_generator)?)?;
    let h = u.mul(&big_h).mul(&u.adjoint());
    Ok(ProfileFields { n: c.n, h, big_h, a: None, u: Some(u) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_positive_and_hermitian() {
        for prof in [Profile::P1, Profile::P2, Profile::P3, Profile::P4] {
            let f = profile_fields(prof, &ProfileParams::new(2)).unwrap();
            assert!(f.h.check_positive("h").is_ok());
            assert!(f.big_h.is_diagonal(1e-14));
        }
        assert!(profile_fields(Profile::P3, &ProfileParams::new(1)).is_err());
    }

    #[test]
    fn derived_gauge_field_matches_the_explicit_one() {
        let p = ProfileParams { grid: 64, ..ProfileParams::new(2) };
        let a3 = profile_fields(Profile::P3, &p).unwrap().gauge_field();
        let a4 = profile_fields(Profile::P4, &p).unwrap().gauge_field();
        for (x, y) in a3.iter().zip(&a4) {
            for i in 0..64 {
                for j in 0..64 {
                    assert!((x.sample(i, j) - y.sample(i, j)).norm_max() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn p4_field_is_the_gauge_of_p3() {
        // A_j = −iU*∂_jU with U = exp(iθσ_rot)
        let p = ProfileParams { grid: 64, ..ProfileParams::new(2) };
        let a2 = profile_fields(Profile::P4, &p).unwrap().a.unwrap()[1].clone();
        let theta = MatrixFunction::from_fn(2, 64, |_, y| sigma_rot(2) * Scale(c64::new(p.rotation * (2.0 * PI * y).cos(), 0.0)));
        let u = unitary_exp(&theta).unwrap();
        let gauge = u.adjoint().mul(&u.delta(1));
        for i in 0..64 {
            for j in 0..64 {
                assert!((gauge.sample(i, j) - a2.sample(i, j)).norm_max() < 1e-10);
            }
        }
    }

    #[test]
    fn custom_profile_round_trip() {
        let c = CustomProfile {
            n: 1,
            h: vec![
                Coefficient { row: 0, col: 0, k1: 0, k2: 0, re: 1.0, im: 0.0 },
                Coefficient { row: 0, col: 0, k1: 1, k2: 0, re: 0.1, im: 0.0 },
                Coefficient { row: 0, col: 0, k1: -1, k2: 0, re: 0.1, im: 0.0 },
            ],
            ..CustomProfile::default()
        };
        let f = custom_fields(&c, 16).unwrap();
        assert!((f.h.sample(0, 0)[(0, 0)].re - 1.2).abs() < 1e-14);
        let bad = CustomProfile { h: vec![Coefficient { row: 0, col: 0, k1: 1, k2: 0, re: 1.0, im: 0.0 }], ..c };
        assert!(custom_fields(&bad, 16).is_err());
    }
}
