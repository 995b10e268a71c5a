//! Symbols of `D²_{A,H} = H(D+A)H²(D+A)H` and of its parametrix.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::calculus::{compose, x_derivative, xi_partial};
use super::monomial::rat;
use super::{Basis, Clifford, Dir, Generator, SymbolError, SymbolPoly};

/// Cutoff low enough that compositions of differential operators are exact.
const EXACT: i64 = i64::MIN / 4;

/// Graded symbol `a₂ + a₁ + a₀` of `D²_{A,H}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ASymbols {
    pub a2: SymbolPoly,
    pub a1: SymbolPoly,
    pub a0: SymbolPoly,
}

impl ASymbols {
    pub fn total(&self) -> SymbolPoly {
        &(&self.a2 + &self.a1) + &self.a0
    }
}

/// First three terms `b₀ + b₁ + b₂` of the parametrix of `D²_{A,H} + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BSymbols {
    pub b0: SymbolPoly,
    pub b1: SymbolPoly,
    pub b2: SymbolPoly,
}

impl BSymbols {
    pub fn total(&self) -> SymbolPoly {
        &(&self.b0 + &self.b1) + &self.b2
    }
}

/// `b₂` split by its dependence on the fluctuation `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ADegreeSplit {
    pub deg0: SymbolPoly,
    pub lin_a: SymbolPoly,
    pub lin_da: SymbolPoly,
    pub quad_a: SymbolPoly,
}

impl ADegreeSplit {
    pub fn total(&self) -> SymbolPoly {
        let mut out = self.deg0.clone();
        out += &self.lin_a;
        out += &self.lin_da;
        out += &self.quad_a;
        out
    }
}

/// `σ^k ξ_k`, the symbol of `D = σ¹δ₁ + σ²δ₂`.
pub fn dirac_symbol() -> SymbolPoly {
    Dir::BOTH.iter().fold(SymbolPoly::zero(), |acc, &k| {
        &acc + &(&SymbolPoly::clifford(Clifford::sigma(k)) * &SymbolPoly::xi(k))
    })
}

/// `σ^k A_k`, the Clifford image of the one-form `A`.
pub fn fluctuation_symbol() -> SymbolPoly {
    Dir::BOTH.iter().fold(SymbolPoly::zero(), |acc, &k| {
        &acc + &(&SymbolPoly::clifford(Clifford::sigma(k)) * &SymbolPoly::generator(Generator::A(k)))
    })
}

/// Composes `H(D+A)H²(D+A)H` exactly and splits it by ξ-order.
pub fn build_a_symbols(include_a: bool) -> ASymbols {
    let h = SymbolPoly::generator(Generator::HPow(1));
    let h2 = SymbolPoly::generator(Generator::HPow(2));
    let mut d = dirac_symbol();
    if include_a {
        d = &d + &fluctuation_symbol();
    }
    let chain = [&h, &d, &h2, &d, &h];
    let mut acc = SymbolPoly::one();
    for factor in chain {
        acc = compose(&acc, factor, EXACT).expect("H and A have first and second derivative rules");
    }
    ASymbols { a2: acc.part_of_order(2), a1: acc.part_of_order(1), a0: acc.part_of_order(0) }
}

/// The parametrix recursion
///
/// ```text
/// b₀ = (a₂ + 1)⁻¹
/// b₁ = −(b₀a₁ + ∂_k(b₀)δ_k(a₂)) b₀
/// b₂ = −(b₁a₁ + b₀a₀ + ∂_k(b₀)δ_k(a₁) + ∂_k(b₁)δ_k(a₂) + ½∂_k∂_j(b₀)δ_kδ_j(a₂)) b₀
/// ```
///
/// with `b₀` kept as the opaque generator `b0^1`.
pub fn build_b_symbols(a: &ASymbols) -> Result<BSymbols, SymbolError> {
    let b0 = SymbolPoly::generator(Generator::B0Pow(1));

    let mut inner1 = &b0 * &a.a1;
    for k in Dir::BOTH {
        inner1 += &xi_partial(&b0, k) * &x_derivative(&a.a2, k)?;
    }
    let b1 = -(&inner1 * &b0);

    let mut inner2 = &(&b1 * &a.a1) + &(&b0 * &a.a0);
    for k in Dir::BOTH {
        inner2 += &xi_partial(&b0, k) * &x_derivative(&a.a1, k)?;
        inner2 += &xi_partial(&b1, k) * &x_derivative(&a.a2, k)?;
    }
    let half = BigRational::new(1.into(), 2.into());
    for k in Dir::BOTH {
        let dk_b0 = xi_partial(&b0, k);
        let dk_a2 = x_derivative(&a.a2, k)?;
        for j in Dir::BOTH {
            let term = &xi_partial(&dk_b0, j) * &x_derivative(&dk_a2, j)?;
            inner2 += term.scale(&half);
        }
    }
    let b2 = -(&inner2 * &b0);
    Ok(BSymbols { b0, b1, b2 })
}

/// Partitions monomials by their number of `A` and `δA` factors.
pub fn split_by_a_degree(b2: &SymbolPoly) -> Result<ADegreeSplit, SymbolError> {
    let mut split = ADegreeSplit {
        deg0: SymbolPoly::zero(),
        lin_a: SymbolPoly::zero(),
        lin_da: SymbolPoly::zero(),
        quad_a: SymbolPoly::zero(),
    };
    for (basis, coeff) in b2.iter() {
        let n_a = basis.word.iter().filter(|g| matches!(g, Generator::A(_))).count();
        let n_da = basis.word.iter().filter(|g| matches!(g, Generator::DeltaA(..))).count();
        let target = match (n_a, n_da) {
            (0, 0) => &mut split.deg0,
            (1, 0) => &mut split.lin_a,
            (0, 1) => &mut split.lin_da,
            (2, 0) => &mut split.quad_a,
            _ => return Err(SymbolError::UnexpectedADegree { a: n_a, da: n_da }),
        };
        target.add_term(coeff.clone(), basis.clone());
    }
    Ok(split)
}

/// Replaces every Clifford factor by its spinor trace (`tr 1 = 2`, `tr σ = 0`).
pub fn clifford_trace(s: &SymbolPoly) -> SymbolPoly {
    s.map_terms(|basis, coeff| {
        let t = basis.clifford.trace();
        if t == 0 {
            return SymbolPoly::zero();
        }
        SymbolPoly::monomial(coeff * rat(t), Basis { clifford: Clifford::One, ..basis.clone() })
    })
}

/// Order-by-order residue of `compose(a, b) − 1`, reduced with the resolvent
/// identity. Empty when `b` is a parametrix of `a` down to `cutoff`.
pub fn parametrix_residue(
    a: &SymbolPoly,
    b: &SymbolPoly,
    cutoff: i64,
) -> Result<SymbolPoly, SymbolError> {
    let product = compose(a, b, cutoff)?;
    let residue = super::calculus::reduce_resolvent(&(&product - &SymbolPoly::one()));
    Ok(residue.truncate_below(cutoff))
}

/// Full symbol of `D²_{A,H} + μ`, the operator the parametrix inverts.
pub fn resolved_operator(a: &ASymbols) -> SymbolPoly {
    &a.total() + &SymbolPoly::mu()
}

#[derive(Clone, Debug, Serialize)]
pub struct TermCount {
    pub order: i64,
    pub terms: usize,
}

/// Number of terms per ξ-order, for reporting.
pub fn term_census(p: &SymbolPoly) -> Vec<TermCount> {
    let mut counts = std::collections::BTreeMap::new();
    for (b, c) in p.iter() {
        if !c.is_zero() {
            *counts.entry(b.order()).or_insert(0usize) += 1;
        }
    }
    counts.into_iter().rev().map(|(order, terms)| TermCount { order, terms }).collect()
}
