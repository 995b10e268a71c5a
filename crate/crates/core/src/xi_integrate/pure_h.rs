//! ξ-integration of the `A`-independent part.

use num_rational::BigRational;
use num_traits::Zero;

use super::radial::radial_integral;
use super::XiError;
use crate::symcalc::{x_derivative, Basis, Dir, Generator, SymbolPoly};

/// Integrates a prepared (traced, averaged, per-spinor) `A`-free symbol over
/// `ξ ∈ ℝ²`. Each `c b₀^m H^p W (ξ²)^k` becomes `c π B(k+1, m−k−1) H^{p−4(k+1)} W`;
/// the returned coefficients are multiples of `π`.
pub fn integrate_pure_h(deg0: &SymbolPoly) -> Result<SymbolPoly, XiError> {
    let mut out = SymbolPoly::zero();
    for (basis, coeff) in deg0.iter() {
        super::check_prepared(basis)?;
        if basis.mu != 0 {
            return Err(XiError::NotPrepared(format!("resolvent parameter power {} in {}", basis.mu, basis_tag(basis))));
        }
        let mut m = 0u32;
        let mut p = 0i32;
        let mut rest = Vec::new();
        for g in &basis.word {
            match *g {
                Generator::B0Pow(k) => m += k,
                Generator::HPow(k) => p += k,
                Generator::DeltaH(_) | Generator::HessH(..) | Generator::LapH => rest.push(*g),
                Generator::A(_) | Generator::DeltaA(..) => {
                    return Err(XiError::NonFactorable(format!("A-dependent term {} in pure-H part", basis_tag(basis))))
                }
            }
        }
        let k = basis.xi.sq;
        let ri = radial_integral(k, m)?;
        // 2π from the angle, ½ B(·,·) a^{−2(k+1)} from the radius, a² = H⁴
        let c = coeff * ri.coeff * BigRational::from_integer(2.into());
        let h = p + 2 * ri.a_power as i32;
        let mut word = vec![Generator::HPow(h)];
        word.extend(rest);
        out.add_term(c, Basis::from_word(word));
    }
    Ok(out)
}

fn basis_tag(b: &Basis) -> String {
    b.word.iter().map(|g| g.tag()).collect::<Vec<_>>().join(" ")
}

/// `δ₁(H⁻¹δ₁H) + δ₂(H⁻¹δ₂H)`, expanded.
pub fn log_laplacian() -> SymbolPoly {
    let mut out = SymbolPoly::zero();
    for dir in Dir::BOTH {
        let inner = SymbolPoly::word(1, vec![Generator::HPow(-1), Generator::DeltaH(dir)]);
        out += &x_derivative(&inner, dir).expect("first derivatives of H have derivative rules");
    }
    out
}

/// Rational `c` with `density = c · log_laplacian()`, if such a `c` exists.
pub fn total_derivative_coefficient(density: &SymbolPoly) -> Option<BigRational> {
    let target = log_laplacian();
    let (basis, tc) = target.iter().next()?;
    let c = density.coefficient(basis) / tc;
    if c.is_zero() && !density.is_zero() {
        return None;
    }
    (target.scale(&c) == *density).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::{build_a_symbols, build_b_symbols, XiPow};
    use crate::xi_integrate::prepare;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tower_sums() {
        let b = build_b_symbols(&build_a_symbols(false)).unwrap();
        let dens = integrate_pure_h(&prepare(&b.b2)).unwrap();
        let dd = Basis::from_word(vec![Generator::HPow(-2), Generator::DeltaH(Dir::One), Generator::DeltaH(Dir::One)]);
        let lap = Basis::from_word(vec![Generator::HPow(-1), Generator::LapH]);
        assert_eq!(dens.coefficient(&dd), r(-1, 3));
        assert_eq!(dens.coefficient(&lap), r(1, 3));
        assert_eq!(dens.len(), 3);
        assert_eq!(total_derivative_coefficient(&dens), Some(r(1, 3)));
    }

    #[test]
    fn single_tower_term() {
        // 96 b₀⁵ H¹⁴ δ₁Hδ₁H (ξ²)³ → 96 · 2 · (1/2)B(4,1) = 24
        let word = vec![Generator::B0Pow(5), Generator::HPow(14), Generator::DeltaH(Dir::One), Generator::DeltaH(Dir::One)];
        let p = SymbolPoly::monomial(r(96, 1), Basis { xi: XiPow { sq: 3, ..XiPow::default() }, ..Basis::from_word(word) });
        let d = integrate_pure_h(&p).unwrap();
        let dd = Basis::from_word(vec![Generator::HPow(-2), Generator::DeltaH(Dir::One), Generator::DeltaH(Dir::One)]);
        assert_eq!(d.coefficient(&dd), r(24, 1));
    }

    #[test]
    fn rejects_divergent_terms() {
        let p = &SymbolPoly::word(1, vec![Generator::B0Pow(1)]) * &SymbolPoly::xi_squared();
        assert!(matches!(integrate_pure_h(&p), Err(XiError::Divergent { .. })));
    }

    #[test]
    fn log_laplacian_expansion() {
        let l = log_laplacian();
        assert_eq!(l.len(), 3);
        let lap = Basis::from_word(vec![Generator::HPow(-1), Generator::LapH]);
        assert_eq!(l.coefficient(&lap), r(1, 1));
    }
}
