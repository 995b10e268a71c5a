//! Exact noncommutative symbol calculus on the flat torus.
//!
//! Symbols are polynomials in `ξ` whose coefficients are words in formal
//! `n×n`-matrix generators (`H`, its derivatives, `A`, `b₀`) tensored with the
//! Clifford algebra of `σ¹, σ²`. Coefficients are exact rationals.

mod calculus;
mod clifford;
mod generator;
mod monomial;
mod poly;
mod symbols;

pub use calculus::{compose, reduce_resolvent, x_derivative, xi_partial};
pub use clifford::Clifford;
pub use generator::{Dir, Generator};
pub use monomial::{blocks, Basis, Monomial, XiPow};
pub use poly::{format_rational, parse_rational, SymbolPoly};
pub use symbols::{
    build_a_symbols, build_b_symbols, clifford_trace, dirac_symbol, fluctuation_symbol, parametrix_residue,
    resolved_operator, split_by_a_degree, term_census, ADegreeSplit, ASymbols, BSymbols, TermCount,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SymbolError {
    #[error("generator {0} has no derivative rule")]
    NoDerivativeRule(Generator),
    #[error("monomial with {a} A-factors and {da} δA-factors does not fit the A-degree split")]
    UnexpectedADegree { a: usize, da: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
