//! The Clifford algebra generated by the Pauli matrices `σ¹, σ²`.
//!
//! Basis `{1, σ¹, σ², σ¹σ² = iσ³}`. All structure constants are `±1`, so
//! symbol coefficients stay rational.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Clifford {
    One,
    Sigma1,
    Sigma2,
    /// `iσ³ = σ¹σ²`.
    ISigma3,
}

impl Clifford {
    pub fn sigma(dir: super::Dir) -> Clifford {
        match dir {
            super::Dir::One => Clifford::Sigma1,
            super::Dir::Two => Clifford::Sigma2,
        }
    }

    /// Product `self · rhs = sign · basis`.
    pub fn mul(self, rhs: Clifford) -> (i8, Clifford) {
        use Clifford::*;
        match (self, rhs) {
            (One, x) | (x, One) => (1, x),
            (Sigma1, Sigma1) | (Sigma2, Sigma2) => (1, One),
            (ISigma3, ISigma3) => (-1, One),
            (Sigma1, Sigma2) => (1, ISigma3),
            (Sigma2, Sigma1) => (-1, ISigma3),
            (Sigma1, ISigma3) => (1, Sigma2),
            (ISigma3, Sigma1) => (-1, Sigma2),
            (Sigma2, ISigma3) => (-1, Sigma1),
            (ISigma3, Sigma2) => (1, Sigma1),
        }
    }

    /// Matrix trace over the 2-dimensional spinor space.
    pub fn trace(self) -> i64 {
        match self {
            Clifford::One => 2,
            _ => 0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Clifford::One => "1",
            Clifford::Sigma1 => "s1",
            Clifford::Sigma2 => "s2",
            Clifford::ISigma3 => "is3",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Clifford> {
        match tag {
            "1" => Some(Clifford::One),
            "s1" => Some(Clifford::Sigma1),
            "s2" => Some(Clifford::Sigma2),
            "is3" => Some(Clifford::ISigma3),
            _ => None,
        }
    }

    pub fn latex(self) -> &'static str {
        match self {
            Clifford::One => "",
            Clifford::Sigma1 => "\\sigma^1",
            Clifford::Sigma2 => "\\sigma^2",
            Clifford::ISigma3 => "i\\sigma^3",
        }
    }

    /// Explicit 2×2 matrix as `(re, im)` pairs, row-major.
    pub fn matrix(self) -> [[(f64, f64); 2]; 2] {
        match self {
            Clifford::One => [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]],
            Clifford::Sigma1 => [[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]],
            Clifford::Sigma2 => [[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]],
            Clifford::ISigma3 => [[(0.0, 1.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, -1.0)]],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Clifford; 4] = [Clifford::One, Clifford::Sigma1, Clifford::Sigma2, Clifford::ISigma3];

    fn matmul(a: [[(f64, f64); 2]; 2], b: [[(f64, f64); 2]; 2]) -> [[(f64, f64); 2]; 2] {
        let mut out = [[(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let (ar, ai) = a[i][k];
                    let (br, bi) = b[k][j];
                    out[i][j].0 += ar * br - ai * bi;
                    out[i][j].1 += ar * bi + ai * br;
                }
            }
        }
        out
    }

    #[test]
    fn table_matches_pauli_matrices() {
        for a in ALL {
            for b in ALL {
                let (sign, c) = a.mul(b);
                let lhs = matmul(a.matrix(), b.matrix());
                let rhs = c.matrix();
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(lhs[i][j].0, f64::from(sign) * rhs[i][j].0);
                        assert_eq!(lhs[i][j].1, f64::from(sign) * rhs[i][j].1);
                    }
                }
            }
        }
    }

    #[test]
    fn anticommutator_is_twice_delta() {
        use super::super::Dir;
        for i in Dir::BOTH {
            for j in Dir::BOTH {
                let (s1, c1) = Clifford::sigma(i).mul(Clifford::sigma(j));
                let (s2, c2) = Clifford::sigma(j).mul(Clifford::sigma(i));
                if i == j {
                    assert_eq!((s1 + s2, c1), (2, Clifford::One));
                } else {
                    assert_eq!(c1, c2);
                    assert_eq!(s1 + s2, 0);
                }
            }
        }
    }

    #[test]
    fn traces() {
        assert_eq!(Clifford::One.trace(), 2);
        assert_eq!(Clifford::Sigma1.trace(), 0);
        assert_eq!(Clifford::ISigma3.trace(), 0);
    }
}
