//! Sums of canonical monomials.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::{canonicalize, rat};
use super::{Basis, Clifford, Dir, Generator, Monomial, SymbolError, XiPow};

/// Graded noncommutative polynomial in `ξ` with Clifford- and matrix-valued
/// coefficients. Always stored in canonical form with like terms collapsed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolPoly {
    terms: BTreeMap<Basis, BigRational>,
}

impl SymbolPoly {
    pub fn zero() -> SymbolPoly {
        SymbolPoly::default()
    }

    pub fn one() -> SymbolPoly {
        SymbolPoly::monomial(BigRational::one(), Basis::identity())
    }

    pub fn monomial(coeff: BigRational, basis: Basis) -> SymbolPoly {
        let mut p = SymbolPoly::zero();
        p.add_term(coeff, basis);
        p
    }

    pub fn word(coeff: i64, word: Vec<Generator>) -> SymbolPoly {
        SymbolPoly::monomial(rat(coeff), Basis::from_word(word))
    }

    pub fn generator(g: Generator) -> SymbolPoly {
        SymbolPoly::word(1, vec![g])
    }

    /// `ξ_dir`.
    pub fn xi(dir: Dir) -> SymbolPoly {
        SymbolPoly::monomial(BigRational::one(), Basis { xi: XiPow::component(dir), ..Basis::identity() })
    }

    /// The scalar `ξ²`.
    pub fn xi_squared() -> SymbolPoly {
        SymbolPoly::monomial(BigRational::one(), Basis { xi: XiPow::squared(), ..Basis::identity() })
    }

    /// The resolvent parameter `μ` (numerically 1, ξ-order 2).
    pub fn mu() -> SymbolPoly {
        SymbolPoly::monomial(BigRational::one(), Basis { mu: 1, ..Basis::identity() })
    }

    pub fn clifford(c: Clifford) -> SymbolPoly {
        SymbolPoly::monomial(BigRational::one(), Basis { clifford: c, ..Basis::identity() })
    }

    /// Adds `coeff · basis` after canonicalizing it.
    pub fn add_term(&mut self, coeff: BigRational, basis: Basis) {
        let mut expanded = Vec::new();
        canonicalize(coeff, basis, &mut expanded);
        for (b, c) in expanded {
            self.accumulate(b, c);
        }
    }

    /// Adds a term that is already canonical.
    fn accumulate(&mut self, basis: Basis, coeff: BigRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(basis) {
            Entry::Vacant(v) => {
                if !coeff.is_zero() {
                    v.insert(coeff);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Basis, &BigRational)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(b, c)| Monomial::new(c.clone(), b.clone()))
    }

    pub fn coefficient(&self, basis: &Basis) -> BigRational {
        self.terms.get(basis).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Leading ξ-order, `None` for the zero symbol.
    pub fn order(&self) -> Option<i64> {
        self.terms.keys().map(Basis::order).max()
    }

    pub fn min_order(&self) -> Option<i64> {
        self.terms.keys().map(Basis::order).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.order() == self.min_order()
    }

    pub fn filter(&self, mut keep: impl FnMut(&Basis) -> bool) -> SymbolPoly {
        SymbolPoly {
            terms: self.terms.iter().filter(|(b, _)| keep(b)).map(|(b, c)| (b.clone(), c.clone())).collect(),
        }
    }

    /// Homogeneous component of the given ξ-order.
    pub fn part_of_order(&self, order: i64) -> SymbolPoly {
        self.filter(|b| b.order() == order)
    }

    pub fn truncate_below(&self, cutoff: i64) -> SymbolPoly {
        self.filter(|b| b.order() >= cutoff)
    }

    pub fn scale(&self, factor: &BigRational) -> SymbolPoly {
        if factor.is_zero() {
            return SymbolPoly::zero();
        }
        SymbolPoly { terms: self.terms.iter().map(|(b, c)| (b.clone(), c * factor)).collect() }
    }

    /// Applies `f` to every monomial and sums the results.
    pub fn map_terms<F>(&self, mut f: F) -> SymbolPoly
    where
        F: FnMut(&Basis, &BigRational) -> SymbolPoly,
    {
        let mut out = SymbolPoly::zero();
        for (b, c) in &self.terms {
            out += f(b, c);
        }
        out
    }

    pub fn try_map_terms<F>(&self, mut f: F) -> Result<SymbolPoly, SymbolError>
    where
        F: FnMut(&Basis, &BigRational) -> Result<SymbolPoly, SymbolError>,
    {
        let mut out = SymbolPoly::zero();
        for (b, c) in &self.terms {
            out += f(b, c)?;
        }
        Ok(out)
    }

    /// Deterministic JSON term list, sorted by canonical basis order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(b, c)| TermJson {
                coeff: format_rational(c),
                clifford: b.clifford.tag().to_string(),
                xi: [b.xi.xi1, b.xi.xi2, b.xi.sq],
                mu: b.mu,
                word: b.word.iter().map(|g| g.tag()).collect(),
            })
            .collect();
        serde_json::to_value(terms).expect("term list serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<SymbolPoly, SymbolError> {
        let terms: Vec<TermJson> =
            serde_json::from_value(value.clone()).map_err(|e| SymbolError::Parse(e.to_string()))?;
        let mut out = SymbolPoly::zero();
        for t in terms {
            let coeff = parse_rational(&t.coeff)?;
            let clifford =
                Clifford::from_tag(&t.clifford).ok_or_else(|| SymbolError::Parse(format!("clifford tag {}", t.clifford)))?;
            let word = t
                .word
                .iter()
                .map(|tag| Generator::from_tag(tag).ok_or_else(|| SymbolError::Parse(format!("generator tag {tag}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let xi = XiPow { xi1: t.xi[0], xi2: t.xi[1], sq: t.xi[2] };
            out.add_term(coeff, Basis { clifford, xi, mu: t.mu, word });
        }
        Ok(out)
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let abs = c.abs();
            let body = basis_latex(b);
            if abs.is_one() && !body.is_empty() {
                s.push_str(&body);
            } else {
                if abs.is_integer() {
                    let _ = write!(s, "{}", abs.numer());
                } else {
                    let _ = write!(s, "\\frac{{{}}}{{{}}}", abs.numer(), abs.denom());
                }
                if !body.is_empty() {
                    s.push(' ');
                    s.push_str(&body);
                }
            }
        }
        s
    }
}

fn basis_latex(b: &Basis) -> String {
    let mut parts: Vec<String> = Vec::new();
    if b.clifford != Clifford::One {
        parts.push(b.clifford.latex().to_string());
    }
    parts.extend(b.word.iter().map(|g| g.latex()));
    for (p, name) in [(b.xi.xi1, "\\xi_1"), (b.xi.xi2, "\\xi_2")] {
        match p {
            0 => {}
            1 => parts.push(name.to_string()),
            p => parts.push(format!("{name}^{{{p}}}")),
        }
    }
    match b.xi.sq {
        0 => {}
        1 => parts.push("\\xi^2".to_string()),
        p => parts.push(format!("(\\xi^2)^{{{p}}}")),
    }
    match b.mu {
        0 => {}
        1 => parts.push("\\mu".to_string()),
        p => parts.push(format!("\\mu^{{{p}}}")),
    }
    parts.join(" ")
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    clifford: String,
    xi: [u32; 3],
    mu: u32,
    word: Vec<String>,
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, SymbolError> {
    let bad = || SymbolError::Parse(format!("rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl std::ops::AddAssign<SymbolPoly> for SymbolPoly {
    fn add_assign(&mut self, rhs: SymbolPoly) {
        for (b, c) in rhs.terms {
            self.accumulate(b, c);
        }
    }
}

impl std::ops::AddAssign<&SymbolPoly> for SymbolPoly {
    fn add_assign(&mut self, rhs: &SymbolPoly) {
        for (b, c) in &rhs.terms {
            self.accumulate(b.clone(), c.clone());
        }
    }
}

impl Add for &SymbolPoly {
    type Output = SymbolPoly;
    fn add(self, rhs: &SymbolPoly) -> SymbolPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for SymbolPoly {
    type Output = SymbolPoly;
    fn add(mut self, rhs: SymbolPoly) -> SymbolPoly {
        self += rhs;
        self
    }
}

impl Neg for &SymbolPoly {
    type Output = SymbolPoly;
    fn neg(self) -> SymbolPoly {
        SymbolPoly { terms: self.terms.iter().map(|(b, c)| (b.clone(), -c)).collect() }
    }
}

impl Neg for SymbolPoly {
    type Output = SymbolPoly;
    fn neg(self) -> SymbolPoly {
        -&self
    }
}

impl Sub for &SymbolPoly {
    type Output = SymbolPoly;
    fn sub(self, rhs: &SymbolPoly) -> SymbolPoly {
        self + &(-rhs)
    }
}

impl Sub for SymbolPoly {
    type Output = SymbolPoly;
    fn sub(self, rhs: SymbolPoly) -> SymbolPoly {
        &self - &rhs
    }
}

/// Pointwise (not composition) product of symbols.
impl Mul for &SymbolPoly {
    type Output = SymbolPoly;
    fn mul(self, rhs: &SymbolPoly) -> SymbolPoly {
        let mut out = SymbolPoly::zero();
        for (ba, ca) in &self.terms {
            for (bb, cb) in &rhs.terms {
                let (sign, basis) = ba.concat(bb);
                let c = ca * cb * rat(i64::from(sign));
                out.add_term(c, basis);
            }
        }
        out
    }
}

impl Mul for SymbolPoly {
    type Output = SymbolPoly;
    fn mul(self, rhs: SymbolPoly) -> SymbolPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    #[test]
    fn like_terms_collapse_and_zero_is_pruned() {
        let a = SymbolPoly::word(3, vec![HPow(2), DeltaH(Dir::One)]);
        let b = SymbolPoly::word(-3, vec![DeltaH(Dir::One), HPow(1), HPow(1)]);
        assert!((&a + &b).is_zero());
        assert_eq!((&a + &a).len(), 1);
    }

    #[test]
    fn product_respects_clifford_signs() {
        let s1 = SymbolPoly::clifford(Clifford::Sigma1);
        let s2 = SymbolPoly::clifford(Clifford::Sigma2);
        assert_eq!(&(&s1 * &s2) + &(&s2 * &s1), SymbolPoly::zero());
        assert_eq!(&s1 * &s1, SymbolPoly::one());
    }

    #[test]
    fn xi_components_sum_to_xi_squared() {
        let x1 = SymbolPoly::xi(Dir::One);
        let x2 = SymbolPoly::xi(Dir::Two);
        assert_eq!(&(&x1 * &x1) + &(&x2 * &x2), SymbolPoly::xi_squared());
    }

    #[test]
    fn json_round_trip() {
        let p = &(&SymbolPoly::word(96, vec![B0Pow(5), HPow(14), DeltaH(Dir::One), DeltaH(Dir::One)])
            * &SymbolPoly::xi_squared())
            + &SymbolPoly::monomial(
                BigRational::new(1.into(), 3.into()),
                Basis {
                    clifford: Clifford::ISigma3,
                    xi: XiPow { xi1: 1, xi2: 1, sq: 0 },
                    mu: 1,
                    word: vec![HPow(1), A(Dir::Two), DeltaA(Dir::One, Dir::Two)],
                },
            );
        let json = p.to_json();
        assert_eq!(SymbolPoly::from_json(&json).unwrap(), p);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"1/3\""));
        assert!(text.contains("\"b0^5\""));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-2/6").unwrap(), BigRational::new((-1).into(), 3.into()));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn latex_rendering() {
        let p = SymbolPoly::word(-8, vec![B0Pow(4), HPow(11), LapH]);
        assert_eq!(p.to_latex(), "-8 b_0^{4} H^{11} \\Delta(H)");
    }
}
