//! Derivatives, symbol composition and the resolvent relation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::monomial::{rat, xi_derivative};
use super::{Basis, Dir, Generator, SymbolError, SymbolPoly, XiPow};

/// `δ_dir = -i∂_dir` applied to a symbol (Leibniz rule over the word).
///
/// Rules: `δ(H^m) = m H^{m-1} δH`, `δ_k(δ_jH) = δ_jδ_k(H)`,
/// `δ_k(A_i) = δ_k(A_i)`, `δ_k(b₀^m) = -m b₀^{m+1} δ_k(a₂)` with `δ_k(a₂) = 4H³δ_k(H)ξ²`.
/// Second derivatives of `H` and derivatives of `A` have no rule.
pub fn x_derivative(p: &SymbolPoly, dir: Dir) -> Result<SymbolPoly, SymbolError> {
    p.try_map_terms(|basis, coeff| {
        let mut out = SymbolPoly::zero();
        for (pos, g) in basis.word.iter().enumerate() {
            let (factor, replacement, extra_xi): (i64, Vec<Generator>, XiPow) = match *g {
                Generator::HPow(m) => (i64::from(m), vec![Generator::HPow(m - 1), Generator::DeltaH(dir)], XiPow::default()),
                Generator::DeltaH(j) => (1, vec![Generator::HessH(j, dir)], XiPow::default()),
                Generator::A(j) => (1, vec![Generator::DeltaA(j, dir)], XiPow::default()),
                Generator::B0Pow(m) => (
                    -4 * i64::from(m),
                    vec![Generator::B0Pow(m + 1), Generator::HPow(3), Generator::DeltaH(dir)],
                    XiPow::squared(),
                ),
                other @ (Generator::HessH(..) | Generator::LapH | Generator::DeltaA(..)) => {
                    return Err(SymbolError::NoDerivativeRule(other));
                }
            };
            if factor == 0 {
                continue;
            }
            let mut word = Vec::with_capacity(basis.word.len() + 2);
            word.extend_from_slice(&basis.word[..pos]);
            word.extend(replacement);
            word.extend_from_slice(&basis.word[pos + 1..]);
            out.add_term(
                coeff * rat(factor),
                Basis { clifford: basis.clifford, xi: basis.xi.mul(extra_xi), mu: basis.mu, word },
            );
        }
        Ok(out)
    })
}

/// `∂/∂ξ_dir` applied to a symbol. Uses `∂_k(b₀^m) = -2m b₀^{m+1} H⁴ ξ_k`.
pub fn xi_partial(p: &SymbolPoly, dir: Dir) -> SymbolPoly {
    p.map_terms(|basis, coeff| {
        let mut out = SymbolPoly::zero();
        for (c, xi) in xi_derivative(basis.xi, dir) {
            out.add_term(coeff * BigRational::from_integer(c), Basis { xi, ..basis.clone() });
        }
        for (pos, g) in basis.word.iter().enumerate() {
            if let Generator::B0Pow(m) = *g {
                let mut word = basis.word.clone();
                word[pos] = Generator::B0Pow(m + 1);
                word.insert(pos + 1, Generator::HPow(4));
                out.add_term(
                    coeff * rat(-2 * i64::from(m)),
                    Basis { clifford: basis.clifford, xi: basis.xi.mul(XiPow::component(dir)), mu: basis.mu, word },
                );
            }
        }
        out
    })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Symbol of the operator product: `Σ_α (1/α!) ∂_ξ^α(a) · δ_x^α(b)`,
/// dropping every contribution of ξ-order below `cutoff`.
///
/// Contributions are truncated before differentiating, so generators without
/// a derivative rule are only rejected when the requested order needs them.
pub fn compose(a: &SymbolPoly, b: &SymbolPoly, cutoff: i64) -> Result<SymbolPoly, SymbolError> {
    let mut out = SymbolPoly::zero();
    for (ba, ca) in a.iter() {
        let ma = SymbolPoly::monomial(ca.clone(), ba.clone());
        for (bb, cb) in b.iter() {
            let budget = ba.order() + bb.order() - cutoff;
            if budget < 0 {
                continue;
            }
            let mb = SymbolPoly::monomial(cb.clone(), bb.clone());
            // da[α₁][α₂] = ∂_ξ1^α₁ ∂_ξ2^α₂ a, likewise for δ on b.
            let budget = budget as u32;
            let mut da_row = ma.clone();
            let mut db_row = mb.clone();
            for a1 in 0..=budget {
                let mut da = da_row.clone();
                let mut db = db_row.clone();
                for a2 in 0..=(budget - a1) {
                    if da.is_zero() {
                        break;
                    }
                    let weight = BigRational::new(BigInt::one(), factorial(a1) * factorial(a2));
                    out += (&da * &db).scale(&weight);
                    if a2 < budget - a1 {
                        da = xi_partial(&da, Dir::Two);
                        if !da.is_zero() {
                            db = x_derivative(&db, Dir::Two)?;
                        }
                    }
                }
                if a1 < budget {
                    da_row = xi_partial(&da_row, Dir::One);
                    if da_row.is_zero() {
                        break;
                    }
                    db_row = x_derivative(&db_row, Dir::One)?;
                }
            }
        }
    }
    Ok(out.truncate_below(cutoff))
}

/// Rewrites with the resolvent identity `(H⁴ξ² + μ) b₀ = 1`, i.e.
/// `ξ² b₀^m = H⁻⁴ b₀^{m-1} − μ H⁻⁴ b₀^m`, applied to the leftmost `b₀` block
/// until every monomial is free of `ξ²` or of `b₀`.
pub fn reduce_resolvent(p: &SymbolPoly) -> SymbolPoly {
    let mut out = SymbolPoly::zero();
    let mut work: Vec<(Basis, BigRational)> = p.iter().map(|(b, c)| (b.clone(), c.clone())).collect();
    while let Some((basis, coeff)) = work.pop() {
        let pos = basis.word.iter().position(|g| matches!(g, Generator::B0Pow(_)));
        let (Some(pos), true) = (pos, basis.xi.sq > 0) else {
            out.add_term(coeff, basis);
            continue;
        };
        let Generator::B0Pow(m) = basis.word[pos] else { unreachable!() };
        let xi = XiPow { sq: basis.xi.sq - 1, ..basis.xi };

        let mut lowered = basis.word.clone();
        if m == 1 {
            lowered[pos] = Generator::HPow(-4);
        } else {
            lowered[pos] = Generator::B0Pow(m - 1);
            lowered.insert(pos + 1, Generator::HPow(-4));
        }
        let mut kept = basis.word.clone();
        kept.insert(pos + 1, Generator::HPow(-4));

        for (c, word, mu) in [(coeff.clone(), lowered, basis.mu), (-coeff, kept, basis.mu + 1)] {
            let mut tmp = SymbolPoly::zero();
            tmp.add_term(c, Basis { clifford: basis.clifford, xi, mu, word });
            work.extend(tmp.iter().map(|(b, c)| (b.clone(), c.clone())));
        }
    }
    out
}
