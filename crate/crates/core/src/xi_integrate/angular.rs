//! Angular averaging over the unit circle in ξ-space.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::symcalc::{Basis, SymbolPoly, XiPow};

fn double_factorial(n: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut k = n;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// Mean of `cos^a θ sin^b θ` over the circle: `(a−1)!!(b−1)!!/(a+b)!!` for even `a`, `b`.
pub fn circle_moment(a: u32, b: u32) -> BigRational {
    if a % 2 == 1 || b % 2 == 1 {
        return BigRational::from_integer(0.into());
    }
    let num = double_factorial(a.saturating_sub(1)) * double_factorial(b.saturating_sub(1));
    BigRational::new(num, double_factorial(a + b))
}

/// Replaces `ξ₁^a ξ₂^b` by its circle average times `(ξ²)^{(a+b)/2}`:
/// `ξ^iξ^j → ½δ^{ij}ξ²`, odd monomials vanish.
///
/// This is the mean over directions; the `2π` of the full angular integral
/// is applied by the radial integration.
pub fn angular_average(s: &SymbolPoly) -> SymbolPoly {
    s.map_terms(|basis, coeff| {
        let m = circle_moment(basis.xi.xi1, basis.xi.xi2);
        let sq = basis.xi.sq + (basis.xi.xi1 + basis.xi.xi2) / 2;
        SymbolPoly::monomial(coeff * m, Basis { xi: XiPow { xi1: 0, xi2: 0, sq }, ..basis.clone() })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::{Clifford, Dir, Generator};
    use num_traits::Zero;

    #[test]
    fn moments() {
        assert_eq!(circle_moment(2, 0), BigRational::new(1.into(), 2.into()));
        assert_eq!(circle_moment(2, 2), BigRational::new(1.into(), 8.into()));
        assert_eq!(circle_moment(4, 0), BigRational::new(3.into(), 8.into()));
        assert!(circle_moment(1, 0).is_zero());
        assert_eq!(circle_moment(0, 0), BigRational::from_integer(1.into()));
    }

    #[test]
    fn odd_terms_vanish() {
        let p = &SymbolPoly::generator(Generator::DeltaH(Dir::One)) * &SymbolPoly::xi(Dir::One);
        assert!(angular_average(&p).is_zero());
    }

    #[test]
    fn identity_contraction() {
        let x1 = SymbolPoly::xi(Dir::One);
        let x2 = SymbolPoly::xi(Dir::Two);
        let p = &(&x1 * &x1) + &(&x2 * &x2);
        assert_eq!(angular_average(&p), SymbolPoly::xi_squared());
    }

    #[test]
    fn antisymmetric_contraction_vanishes() {
        // ε_{ij} ξ^i ξ^j
        let x1 = SymbolPoly::xi(Dir::One);
        let x2 = SymbolPoly::xi(Dir::Two);
        let p = &(&x1 * &x2) - &(&x2 * &x1);
        assert!(angular_average(&(&SymbolPoly::clifford(Clifford::ISigma3) * &p)).is_zero());
    }
}
