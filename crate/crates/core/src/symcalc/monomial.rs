//! Monomials and their canonical form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Clifford, Dir, Generator};

/// Powers of `ξ₁`, `ξ₂` and of the scalar `ξ² = ξ₁² + ξ₂²`.
///
/// Canonical form keeps `xi2 ≤ 1` by rewriting `ξ₂² = ξ² − ξ₁²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct XiPow {
    pub xi1: u32,
    pub xi2: u32,
    pub sq: u32,
}

impl XiPow {
    pub fn degree(self) -> i64 {
        i64::from(self.xi1) + i64::from(self.xi2) + 2 * i64::from(self.sq)
    }

    pub fn component(dir: Dir) -> XiPow {
        match dir {
            Dir::One => XiPow { xi1: 1, ..XiPow::default() },
            Dir::Two => XiPow { xi2: 1, ..XiPow::default() },
        }
    }

    pub fn squared() -> XiPow {
        XiPow { sq: 1, ..XiPow::default() }
    }

    pub fn mul(self, rhs: XiPow) -> XiPow {
        XiPow { xi1: self.xi1 + rhs.xi1, xi2: self.xi2 + rhs.xi2, sq: self.sq + rhs.sq }
    }

    pub fn power(self, dir: Dir) -> u32 {
        match dir {
            Dir::One => self.xi1,
            Dir::Two => self.xi2,
        }
    }

    fn with_power(mut self, dir: Dir, p: u32) -> XiPow {
        match dir {
            Dir::One => self.xi1 = p,
            Dir::Two => self.xi2 = p,
        }
        self
    }
}

/// Everything in a monomial except its coefficient.
///
/// `mu` is the power of the resolvent parameter: the principal symbol of the
/// resolved operator is `a₂ + μ` with `μ = 1` carrying ξ-order 2.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Basis {
    pub clifford: Clifford,
    pub xi: XiPow,
    pub mu: u32,
    pub word: Vec<Generator>,
}

impl Basis {
    pub fn identity() -> Basis {
        Basis { clifford: Clifford::One, xi: XiPow::default(), mu: 0, word: Vec::new() }
    }

    pub fn from_word(word: Vec<Generator>) -> Basis {
        Basis { word, ..Basis::identity() }
    }

    /// ξ-order, with every `b₀` counting −2 and `μ` counting +2.
    pub fn order(&self) -> i64 {
        let b0: i64 = self
            .word
            .iter()
            .map(|g| match g {
                Generator::B0Pow(k) => i64::from(*k),
                _ => 0,
            })
            .sum();
        self.xi.degree() + 2 * i64::from(self.mu) - 2 * b0
    }

    pub fn a_degree(&self) -> u32 {
        self.word.iter().map(|g| g.a_degree()).sum()
    }

    /// Raw (non-canonical) product.
    pub fn concat(&self, rhs: &Basis) -> (i8, Basis) {
        let (sign, clifford) = self.clifford.mul(rhs.clifford);
        let mut word = self.word.clone();
        word.extend_from_slice(&rhs.word);
        (sign, Basis { clifford, xi: self.xi.mul(rhs.xi), mu: self.mu + rhs.mu, word })
    }
}

/// A single term `coeff · clifford · ξ^… · μ^… · word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: BigRational,
    pub basis: Basis,
}

impl Monomial {
    pub fn new(coeff: BigRational, basis: Basis) -> Monomial {
        Monomial { coeff, basis }
    }

    pub fn order(&self) -> i64 {
        self.basis.order()
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Expands `coeff · basis` into canonical monomials, appending to `out`.
///
/// Canonical form:
/// * generators inside each maximal commuting block are merged (`H^a H^b → H^{a+b}`,
///   `b₀^a b₀^b → b₀^{a+b}`) and sorted by kind then index;
/// * `δ_2δ_1(H)` is written `δ_1δ_2(H)` and `δ_2δ_2(H)` as `Δ(H) − δ_1δ_1(H)`;
/// * `ξ₂²` is written `ξ² − ξ₁²`.
pub(crate) fn canonicalize(coeff: BigRational, basis: Basis, out: &mut Vec<(Basis, BigRational)>) {
    if coeff.is_zero() {
        return;
    }
    let Basis { clifford, xi, mu, word } = basis;
    let xi_terms = normalize_xi(xi);
    let word_terms = normalize_word(&word);
    for (xi_c, xi_n) in &xi_terms {
        for (w_c, w) in &word_terms {
            let c = &coeff * BigRational::from_integer(xi_c * w_c);
            if !c.is_zero() {
                out.push((Basis { clifford, xi: *xi_n, mu, word: w.clone() }, c));
            }
        }
    }
}

fn normalize_xi(xi: XiPow) -> Vec<(BigInt, XiPow)> {
    let q = xi.xi2 / 2;
    let r = xi.xi2 % 2;
    (0..=q)
        .map(|j| {
            let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            let pow = XiPow { xi1: xi.xi1 + 2 * j, xi2: r, sq: xi.sq + q - j };
            (sign * binomial(q, j), pow)
        })
        .collect()
}

/// Splits a word into its commuting blocks and `A`-type separators,
/// merges/sorts every block and applies the Hessian relations.
pub(crate) fn normalize_word(word: &[Generator]) -> Vec<(BigInt, Vec<Generator>)> {
    let mut merged = Vec::with_capacity(word.len());
    let mut block: Vec<Generator> = Vec::new();
    for &g in word {
        if g.is_commuting() {
            block.push(match g {
                Generator::HessH(Dir::Two, Dir::One) => Generator::HessH(Dir::One, Dir::Two),
                other => other,
            });
        } else {
            flush_block(&mut block, &mut merged);
            merged.push(g);
        }
    }
    flush_block(&mut block, &mut merged);

    // Δ(H) relation, applied to the first δ₂δ₂(H) until none remain.
    let hess22 = Generator::HessH(Dir::Two, Dir::Two);
    match merged.iter().position(|g| *g == hess22) {
        None => vec![(BigInt::one(), merged)],
        Some(pos) => {
            let mut out = Vec::new();
            for (sign, replacement) in [(1, Generator::LapH), (-1, Generator::HessH(Dir::One, Dir::One))] {
                let mut w = merged.clone();
                w[pos] = replacement;
                for (c, nw) in normalize_word(&w) {
                    out.push((c * BigInt::from(sign), nw));
                }
            }
            out
        }
    }
}

fn flush_block(block: &mut Vec<Generator>, out: &mut Vec<Generator>) {
    if block.is_empty() {
        return;
    }
    let mut h = 0i32;
    let mut b0 = 0u32;
    let mut rest = Vec::new();
    for g in block.drain(..) {
        match g {
            Generator::HPow(m) => h += m,
            Generator::B0Pow(k) => b0 += k,
            other => rest.push(other),
        }
    }
    if b0 > 0 {
        out.push(Generator::B0Pow(b0));
    }
    if h != 0 {
        out.push(Generator::HPow(h));
    }
    rest.sort();
    out.extend(rest);
}

/// Indices `(start, end)` of the maximal commuting blocks of a canonical word.
pub fn blocks(word: &[Generator]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, g) in word.iter().enumerate() {
        match (g.is_commuting(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, word.len()));
    }
    out
}

pub(crate) fn xi_derivative(xi: XiPow, dir: Dir) -> Vec<(BigInt, XiPow)> {
    let mut out = Vec::new();
    let p = xi.power(dir);
    if p > 0 {
        out.push((BigInt::from(p), xi.with_power(dir, p - 1)));
    }
    if xi.sq > 0 {
        let lowered = XiPow { sq: xi.sq - 1, ..xi };
        out.push((BigInt::from(2 * xi.sq), lowered.mul(XiPow::component(dir))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    #[test]
    fn commuting_block_is_merged_and_sorted() {
        let w = [DeltaH(Dir::Two), HPow(3), B0Pow(1), HPow(-1), B0Pow(2), DeltaH(Dir::One)];
        let out = normalize_word(&w);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].1, vec![B0Pow(3), HPow(2), DeltaH(Dir::One), DeltaH(Dir::Two)]);
    }

    #[test]
    fn a_generators_split_blocks() {
        let w = [HPow(1), A(Dir::One), HPow(2), B0Pow(1), A(Dir::Two), HPow(1), HPow(-1)];
        let out = normalize_word(&w);
        assert_eq!(out[0].1, vec![HPow(1), A(Dir::One), B0Pow(1), HPow(2), A(Dir::Two)]);
    }

    #[test]
    fn hessian_relations() {
        let out = normalize_word(&[HessH(Dir::Two, Dir::Two), HPow(1)]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], (BigInt::from(1), vec![HPow(1), LapH]));
        assert_eq!(out[1], (BigInt::from(-1), vec![HPow(1), HessH(Dir::One, Dir::One)]));
        let sym = normalize_word(&[HessH(Dir::Two, Dir::One)]);
        assert_eq!(sym[0].1, vec![HessH(Dir::One, Dir::Two)]);
    }

    #[test]
    fn xi2_squared_is_rewritten() {
        let terms = normalize_xi(XiPow { xi1: 0, xi2: 3, sq: 0 });
        // ξ₂³ = ξ₂ξ² − ξ₁²ξ₂
        assert_eq!(terms.len(), 2);
        assert!(terms.contains(&(BigInt::from(1), XiPow { xi1: 0, xi2: 1, sq: 1 })));
        assert!(terms.contains(&(BigInt::from(-1), XiPow { xi1: 2, xi2: 1, sq: 0 })));
    }

    #[test]
    fn order_counts_resolvent_and_mu() {
        let b = Basis {
            clifford: Clifford::One,
            xi: XiPow { xi1: 1, xi2: 0, sq: 2 },
            mu: 1,
            word: vec![B0Pow(4), HPow(3)],
        };
        assert_eq!(b.order(), 5 + 2 - 8);
    }
}
