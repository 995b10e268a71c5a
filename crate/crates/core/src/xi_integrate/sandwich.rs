//! ξ-integration of `A`-dependent terms and their reduction to
//! `H^α Φ(Δ)(X) H^β` form.
//!
//! In the eigenbasis of `H` a term `b₀^p H^{h₀} X b₀^q H^{h₁}` has entries
//! `λ_a^{h₀} λ_b^{h₁} X_{ab} · π ∫₀^∞ u^k (1+λ_a⁴u)^{−p} (1+λ_b⁴u)^{−q} du`, a
//! homogeneous function of `(λ_a, λ_b)`. Grouping terms of the same shape and
//! matching the summed kernel against `λ_a^α Φ(s_{ab}) λ_b^β` on sample points
//! determines `α`, `Φ` and the rational multiple of `π`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::XiError;
use crate::specfun::SpectralFunction;
use crate::symcalc::{format_rational, Basis, Dir, Generator, SymbolPoly};

/// What sits between the outer `H`-blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    /// `A_i`
    A(Dir),
    /// `δ_j(A_i)`, stored as `(i, j)`
    DeltaA(Dir, Dir),
    /// `A_i · A_j` with an `H`-block in between
    AA(Dir, Dir),
}

impl Slot {
    pub fn arity(self) -> usize {
        match self {
            Slot::AA(..) => 2,
            _ => 1,
        }
    }

    pub fn latex(self) -> String {
        match self {
            Slot::A(i) => format!("A_{}", i.label()),
            Slot::DeltaA(i, j) => format!("\\delta_{}(A_{})", j.label(), i.label()),
            Slot::AA(i, j) => format!("A_{} \\cdot A_{}", i.label(), j.label()),
        }
    }
}

/// Shape of a sandwich monomial once `b₀` and `H` powers are forgotten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SandwichShape {
    pub slot: Slot,
    /// `δ_i(H)` in the left block.
    pub left_mult: Option<Dir>,
    /// `δ_i(H)` in the right block.
    pub right_mult: Option<Dir>,
}

/// Radial data of one monomial: `(b₀ power, H power)` per block and the `ξ²` power.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichMonomial {
    pub coeff: BigRational,
    pub blocks: Vec<(u32, i32)>,
    pub k: u32,
}

impl SandwichMonomial {
    /// Homogeneity degree of the entrywise kernel in the eigenvalues.
    pub fn degree(&self) -> i32 {
        self.blocks.iter().map(|b| b.1).sum::<i32>() - 4 * (self.k as i32 + 1)
    }
}

/// `H^α (δ_iH)? Φ(Δ)(X) H^β (δ_jH)?` with a rational multiple of `π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichTerm {
    #[serde(serialize_with = "ser_rational")]
    pub coeff: BigRational,
    pub left_power: i32,
    pub left_mult: Option<Dir>,
    pub function: SpectralFunction,
    pub slot: Slot,
    pub right_power: i32,
    pub right_mult: Option<Dir>,
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

impl SandwichTerm {
    pub fn latex(&self) -> String {
        let pow = |p: i32| match p {
            0 => String::new(),
            1 => "H".to_string(),
            p => format!("H^{{{p}}}"),
        };
        let mult = |m: Option<Dir>| m.map(|d| format!("\\delta_{}(H)", d.label())).unwrap_or_default();
        let arg = match self.slot {
            Slot::AA(..) => "\\Delta^{(1)},\\Delta^{(2)}",
            _ => "\\Delta",
        };
        format!(
            "{} \\pi\\, {}{} {}({})({}) {}{}",
            format_rational(&self.coeff),
            pow(self.left_power),
            mult(self.left_mult),
            self.function.name(),
            arg,
            self.slot.latex(),
            pow(self.right_power),
            mult(self.right_mult),
        )
    }
}

/// Splits a prepared monomial into its shape and radial data.
pub fn classify(basis: &Basis) -> Result<(SandwichShape, SandwichMonomial), XiError> {
    super::check_prepared(basis)?;
    if basis.mu != 0 {
        return Err(XiError::NotPrepared("resolvent parameter in sandwich term".into()));
    }
    let mut blocks: Vec<(u32, i32, Option<Dir>)> = vec![(0, 0, None)];
    let mut seps = Vec::new();
    for g in &basis.word {
        let cur = blocks.last_mut().expect("blocks start non-empty");
        match *g {
            Generator::B0Pow(k) => cur.0 += k,
            Generator::HPow(k) => cur.1 += k,
            Generator::DeltaH(d) if cur.2.is_none() => cur.2 = Some(d),
            Generator::A(_) | Generator::DeltaA(..) => {
                seps.push(*g);
                blocks.push((0, 0, None));
            }
            other => return Err(XiError::NonFactorable(format!("generator {} outside the sandwich grammar", other.tag()))),
        }
    }
    let slot = match seps.as_slice() {
        [Generator::A(i)] => Slot::A(*i),
        [Generator::DeltaA(i, j)] => Slot::DeltaA(*i, *j),
        [Generator::A(i), Generator::A(j)] => Slot::AA(*i, *j),
        _ => return Err(XiError::NonFactorable(format!("separators {seps:?}"))),
    };
    if blocks.len() == 3 && blocks[1].2.is_some() {
        return Err(XiError::NonFactorable("δH between the two A factors".into()));
    }
    let last = blocks.len() - 1;
    let shape = SandwichShape { slot, left_mult: blocks[0].2, right_mult: blocks[last].2 };
    let mono = SandwichMonomial {
        coeff: BigRational::from_integer(0.into()),
        blocks: blocks.iter().map(|b| (b.0, b.1)).collect(),
        k: basis.xi.sq,
    };
    Ok((shape, mono))
}

/// Groups a prepared linear or quadratic part by shape.
pub fn group_by_shape(part: &SymbolPoly) -> Result<BTreeMap<SandwichShape, Vec<SandwichMonomial>>, XiError> {
    let mut groups: BTreeMap<SandwichShape, Vec<SandwichMonomial>> = BTreeMap::new();
    for (basis, coeff) in part.iter() {
        let (shape, mut mono) = classify(basis)?;
        mono.coeff = coeff.clone();
        groups.entry(shape).or_default().push(mono);
    }
    Ok(groups)
}

/// `∫₀^∞ u^k Π_j (1 + x_j u)^{−p_j} du`, via `u = v/(1−v)`, which turns the
/// integrand into `v^k (1−v)^{P−k−2} / Π_j (1 − v + x_j v)^{p_j}` on `[0, 1]`.
pub fn resolvent_integral(k: u32, factors: &[(f64, u32)]) -> Result<f64, XiError> {
    let total: u32 = factors.iter().map(|f| f.1).sum();
    if total < k + 2 {
        return Err(XiError::Divergent { k, m: total });
    }
    let tail = (total - k - 2) as i32;
    let f = |v: f64| {
        let w = 1.0 - v;
        let den: f64 = factors.iter().map(|&(x, p)| (w + x * v).powi(p as i32)).product();
        v.powi(k as i32) * w.powi(tail) / den
    };
    Ok(quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-14).integral)
}

/// Entrywise kernel `π Σ c Π_j λ_j^{h_j} ∫ u^k Π_j (1+λ_j⁴u)^{−p_j} du` of a group,
/// with one eigenvalue per block.
pub fn kernel(terms: &[SandwichMonomial], lambdas: &[f64]) -> Result<f64, XiError> {
    let mut acc = 0.0;
    for t in terms {
        if t.blocks.len() != lambdas.len() {
            return Err(XiError::NonFactorable(format!("{} blocks for {} eigenvalues", t.blocks.len(), lambdas.len())));
        }
        let weight: f64 = t.blocks.iter().zip(lambdas).map(|(b, l)| l.powi(b.1)).product();
        let factors: Vec<(f64, u32)> =
            t.blocks.iter().zip(lambdas).filter(|(b, _)| b.0 > 0).map(|(b, l)| (l.powi(4), b.0)).collect();
        let c = t.coeff.to_f64().unwrap_or(f64::NAN);
        acc += c * weight * resolvent_integral(t.k, &factors)?;
    }
    Ok(std::f64::consts::PI * acc)
}

const PAIRS: [[f64; 2]; 6] = [[1.0, 1.3], [0.7, 1.9], [1.5, 0.6], [1.1, 2.4], [0.9, 0.95], [1.2, 1.2]];
const TRIPLES: [[f64; 3]; 6] =
    [[1.0, 1.3, 0.8], [0.7, 1.9, 1.2], [1.5, 0.6, 1.1], [1.1, 2.4, 0.9], [1.0, 1.0, 1.3], [0.8, 1.7, 1.7]];

fn candidate_value(f: SpectralFunction, lambdas: &[f64]) -> Result<f64, XiError> {
    let a = lambdas[0];
    let b = *lambdas.last().expect("non-empty");
    let s_ab = (b / a).powi(4);
    Ok(match lambdas.len() {
        3 => f.eval2((lambdas[1] / a).powi(4), s_ab)?,
        _ => f.eval(s_ab)?,
    })
}

/// Smallest-denominator rational within `tol` of `x`.
fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    (1..=max_den).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= tol * x.abs().max(1.0)).then(|| BigRational::new((p as i64).into(), q.into()))
    })
}

/// Matches one shape group against `c π λ_a^α Φ λ_b^β`.
pub fn factor_group(shape: SandwichShape, terms: &[SandwichMonomial]) -> Result<SandwichTerm, XiError> {
    let degree = terms[0].degree();
    if terms.iter().any(|t| t.degree() != degree) {
        return Err(XiError::NonFactorable(format!("{shape:?}: inhomogeneous kernel")));
    }
    let samples: Vec<Vec<f64>> = match shape.slot.arity() {
        2 => TRIPLES.iter().map(|t| t.to_vec()).collect(),
        _ => PAIRS.iter().map(|p| p.to_vec()).collect(),
    };
    let kernels: Vec<f64> = samples.iter().map(|l| kernel(terms, l)).collect::<Result<_, _>>()?;
    let candidates: &[SpectralFunction] = match shape.slot {
        Slot::A(_) => &[SpectralFunction::G, SpectralFunction::FDelta, SpectralFunction::F],
        Slot::DeltaA(..) => &[SpectralFunction::FDelta, SpectralFunction::G, SpectralFunction::F],
        Slot::AA(..) => &[SpectralFunction::Q],
    };
    let scale = kernels.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    for &f in candidates {
        for alpha in -8..=8 {
            let beta = degree - alpha;
            // model value per unit coefficient
            let unit: Vec<f64> = samples
                .iter()
                .map(|l| Ok(l[0].powi(alpha) * l[l.len() - 1].powi(beta) * candidate_value(f, l)?))
                .collect::<Result<_, XiError>>()?;
            let Some(pivot) = unit.iter().position(|u| u.abs() > 1e-6) else { continue };
            let r0 = kernels[pivot] / unit[pivot];
            let fits = kernels.iter().zip(&unit).all(|(k, u)| (k - r0 * u).abs() <= 1e-9 * k.abs().max((r0 * u).abs()) + 1e-11 * scale);
            if !r0.is_finite() || !fits {
                continue;
            }
            let Some(coeff) = rationalize(r0 / std::f64::consts::PI, 720, 1e-10) else { continue };
            return Ok(SandwichTerm {
                coeff,
                left_power: alpha,
                left_mult: shape.left_mult,
                function: f,
                slot: shape.slot,
                right_power: beta,
                right_mult: shape.right_mult,
            });
        }
    }
    Err(XiError::NonFactorable(format!("{shape:?}: no H^α Φ(Δ) H^β match")))
}

/// Integrates a prepared `A`-dependent part and reduces it to sandwich terms.
pub fn integrate_sandwich(part: &SymbolPoly) -> Result<Vec<SandwichTerm>, XiError> {
    group_by_shape(part)?.into_iter().map(|(shape, terms)| factor_group(shape, &terms)).collect()
}
