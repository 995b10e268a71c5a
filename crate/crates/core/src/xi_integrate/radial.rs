//! Exact radial integrals `∫₀^∞ r^{2k+1} (1 + a²r²)^{−m} dr`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::XiError;

/// `coeff · a^{a_power}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadialIntegral {
    #[serde(serialize_with = "super::sandwich::ser_rational")]
    pub coeff: BigRational,
    pub a_power: i64,
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Euler Beta function on positive integers.
pub fn beta(p: u64, q: u64) -> BigRational {
    BigRational::new(factorial(p - 1) * factorial(q - 1), factorial(p + q - 1))
}

/// `∫₀^∞ r^{2k+1} dr / (1+a²r²)^m = B(k+1, m−k−1) / (2 a^{2(k+1)})`.
///
/// For `m = k + 2` this is `1 / (2(k+1) a^{2(k+1)})`.
pub fn radial_integral(k: u32, m: u32) -> Result<RadialIntegral, XiError> {
    if m <= k + 1 {
        return Err(XiError::Divergent { k, m });
    }
    let b = beta(u64::from(k) + 1, u64::from(m - k - 1));
    Ok(RadialIntegral { coeff: b / BigRational::from_integer(2.into()), a_power: -2 * (i64::from(k) + 1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Trapezoid rule in `r = e^w`; the integrand decays exponentially in `w`.
    fn quadrature(k: u32, m: u32, a: f64) -> f64 {
        let h = 1e-2;
        (-6000..6000)
            .map(|i| {
                let w = i as f64 * h;
                let rr = w.exp();
                rr.powi(2 * k as i32 + 2) / (1.0 + a * a * rr * rr).powi(m as i32)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn low_orders() {
        assert_eq!(radial_integral(0, 2).unwrap().coeff, r(1, 2));
        assert_eq!(radial_integral(1, 3).unwrap().coeff, r(1, 4));
        assert_eq!(radial_integral(0, 3).unwrap().coeff, r(1, 4));
    }

    #[test]
    fn matches_quadrature() {
        for (k, m) in [(0, 2), (1, 3), (0, 3), (2, 4), (3, 5), (1, 5)] {
            for a in [1.0f64, 0.7, 1.6] {
                let ri = radial_integral(k, m).unwrap();
                let c = ri.coeff.to_f64().unwrap();
                let exact = c * a.powi(ri.a_power as i32);
                assert!((exact - quadrature(k, m, a)).abs() < 1e-12 * exact, "k={k} m={m} a={a}");
            }
        }
    }

    #[test]
    fn special_case_m_equals_k_plus_two() {
        for k in 0..6u32 {
            assert_eq!(radial_integral(k, k + 2).unwrap().coeff, r(1, 2 * (i64::from(k) + 1)));
        }
    }

    #[test]
    fn divergence() {
        assert_eq!(radial_integral(1, 2), Err(XiError::Divergent { k: 1, m: 2 }));
    }
}
