//! Formal matrix-valued generators of the symbol algebra.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Coordinate direction on the torus, `x¹` or `x²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    One,
    Two,
}

impl Dir {
    pub const BOTH: [Dir; 2] = [Dir::One, Dir::Two];

    pub fn index(self) -> usize {
        match self {
            Dir::One => 0,
            Dir::Two => 1,
        }
    }

    pub fn label(self) -> u8 {
        match self {
            Dir::One => 1,
            Dir::Two => 2,
        }
    }

    pub fn from_label(label: u8) -> Option<Dir> {
        match label {
            1 => Some(Dir::One),
            2 => Some(Dir::Two),
            _ => None,
        }
    }
}

/// One letter of a monomial word.
///
/// `H` is diagonal, so every generator built only from `H` (its powers, its
/// derivatives and the resolvent `b₀ = (1 + H⁴ξ²)⁻¹`) commutes with every other
/// such generator. `A` and its derivatives commute with nothing.
///
/// The derivative `δ = -i∂` is kept formal: `DeltaH(i)` is `δ_i(H)`,
/// `HessH(i, j)` is `δ_iδ_j(H)`, `LapH` is `δ_1δ_1(H) + δ_2δ_2(H)` and
/// `DeltaA(i, j)` is `δ_j(A_i)`.
///
/// The variant order is the tie-break order inside a commuting block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    B0Pow(u32),
    HPow(i32),
    DeltaH(Dir),
    HessH(Dir, Dir),
    LapH,
    A(Dir),
    DeltaA(Dir, Dir),
}

impl Generator {
    /// True for the generators that commute with all of `H`, `δH`, `b₀`.
    pub fn is_commuting(self) -> bool {
        !matches!(self, Generator::A(_) | Generator::DeltaA(..))
    }

    /// Number of `A` factors (including derivatives of `A`).
    pub fn a_degree(self) -> u32 {
        u32::from(!self.is_commuting())
    }

    /// Deterministic tag used in the JSON form.
    pub fn tag(self) -> String {
        match self {
            Generator::B0Pow(k) => format!("b0^{k}"),
            Generator::HPow(m) => format!("H^{m}"),
            Generator::DeltaH(i) => format!("dH{}", i.label()),
            Generator::HessH(i, j) => format!("ddH{}{}", i.label(), j.label()),
            Generator::LapH => "LapH".to_string(),
            Generator::A(i) => format!("A{}", i.label()),
            Generator::DeltaA(i, j) => format!("dA{}_{}", i.label(), j.label()),
        }
    }

    pub fn from_tag(tag: &str) -> Option<Generator> {
        let dir = |c: u8| Dir::from_label(c.wrapping_sub(b'0'));
        if let Some(k) = tag.strip_prefix("b0^") {
            return k.parse().ok().map(Generator::B0Pow);
        }
        if let Some(m) = tag.strip_prefix("H^") {
            return m.parse().ok().map(Generator::HPow);
        }
        if tag == "LapH" {
            return Some(Generator::LapH);
        }
        let b = tag.as_bytes();
        if let Some(rest) = tag.strip_prefix("ddH") {
            let r = rest.as_bytes();
            if r.len() == 2 {
                return Some(Generator::HessH(dir(r[0])?, dir(r[1])?));
            }
            return None;
        }
        if let Some(rest) = tag.strip_prefix("dH") {
            let r = rest.as_bytes();
            return (r.len() == 1).then(|| dir(r[0]).map(Generator::DeltaH))?;
        }
        if let Some(rest) = tag.strip_prefix("dA") {
            let r = rest.as_bytes();
            if r.len() == 3 && r[1] == b'_' {
                return Some(Generator::DeltaA(dir(r[0])?, dir(r[2])?));
            }
            return None;
        }
        if b.len() == 2 && b[0] == b'A' {
            return dir(b[1]).map(Generator::A);
        }
        None
    }

    pub fn latex(self) -> String {
        match self {
            Generator::B0Pow(1) => "b_0".to_string(),
            Generator::B0Pow(k) => format!("b_0^{{{k}}}"),
            Generator::HPow(1) => "H".to_string(),
            Generator::HPow(m) => format!("H^{{{m}}}"),
            Generator::DeltaH(i) => format!("\\delta_{}(H)", i.label()),
            Generator::HessH(i, j) => format!("\\delta_{}\\delta_{}(H)", i.label(), j.label()),
            Generator::LapH => "\\Delta(H)".to_string(),
            Generator::A(i) => format!("A_{}", i.label()),
            Generator::DeltaA(i, j) => format!("\\delta_{}(A_{})", j.label(), i.label()),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}
