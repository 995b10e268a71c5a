use std::time::Instant;

use matconf_core::symcalc::{
    blocks, build_a_symbols, build_b_symbols, clifford_trace, parametrix_residue, resolved_operator, split_by_a_degree,
    Basis, Dir, Generator, SymbolPoly,
};
use num_rational::BigRational;
use proptest::prelude::*;

#[test]
fn parametrix_identity_without_a() {
    let a = build_a_symbols(false);
    let b = build_b_symbols(&a).unwrap();
    let r = parametrix_residue(&resolved_operator(&a), &b.total(), -2).unwrap();
    assert!(r.is_zero(), "{}", r.to_latex());
}

#[test]
fn parametrix_identity_with_a() {
    let start = Instant::now();
    let a = build_a_symbols(true);
    let b = build_b_symbols(&a).unwrap();
    let r = parametrix_residue(&resolved_operator(&a), &b.total(), -2).unwrap();
    assert!(r.is_zero(), "{} residual terms", r.len());
    eprintln!("parametrix with A: {:?}", start.elapsed());
}

#[test]
fn parametrix_orders() {
    let b = build_b_symbols(&build_a_symbols(true)).unwrap();
    for (k, p) in [&b.b0, &b.b1, &b.b2].into_iter().enumerate() {
        assert!(p.is_homogeneous());
        assert_eq!(p.order(), Some(-2 - k as i64));
    }
}

#[test]
fn split_is_a_partition() {
    let b = build_b_symbols(&build_a_symbols(true)).unwrap();
    let split = split_by_a_degree(&b.b2).unwrap();
    assert_eq!(split.total(), b.b2);
    let parts = [&split.deg0, &split.lin_a, &split.lin_da, &split.quad_a];
    assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), b.b2.len());
    let free = build_b_symbols(&build_a_symbols(false)).unwrap();
    assert_eq!(split.deg0, free.b2);
}

#[test]
fn a_symbols_without_a_have_two_first_order_terms() {
    let a = build_a_symbols(false);
    assert_eq!(a.a2, &SymbolPoly::generator(Generator::HPow(4)) * &SymbolPoly::xi_squared());
    // 4H³δ_iHξ^i and 2iσ³ε_ijH³δ_iHξ^j, each over two directions
    assert_eq!(a.a1.len(), 4);
    assert!(a.a0.iter().all(|(b, _)| b.a_degree() == 0));
}

#[test]
fn traced_a_free_b2_has_no_clifford_remainder() {
    let b = build_b_symbols(&build_a_symbols(false)).unwrap();
    let traced = clifford_trace(&b.b2);
    assert!(traced.iter().all(|(basis, _)| basis.clifford == matconf_core::symcalc::Clifford::One));
}

fn commuting() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (1u32..4).prop_map(Generator::B0Pow),
        (-3i32..5).prop_filter("nonzero", |m| *m != 0).prop_map(Generator::HPow),
        prop_oneof![Just(Dir::One), Just(Dir::Two)].prop_map(Generator::DeltaH),
        Just(Generator::LapH),
    ]
}

fn a_letter() -> impl Strategy<Value = Generator> {
    prop_oneof![Just(Generator::A(Dir::One)), Just(Generator::A(Dir::Two))]
}

fn word_poly(word: Vec<Generator>) -> SymbolPoly {
    SymbolPoly::monomial(BigRational::from_integer(1.into()), Basis::from_word(word))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn swapping_commuting_letters_is_invisible(
        left in proptest::collection::vec(commuting(), 1..4),
        sep in a_letter(),
        right in proptest::collection::vec(commuting(), 2..5),
        k in 0usize..3,
    ) {
        let mut w: Vec<Generator> = left.clone();
        w.push(sep);
        w.extend(right.iter().copied());
        let mut swapped = w.clone();
        let pos = left.len() + 1 + k.min(right.len() - 2);
        swapped.swap(pos, pos + 1);
        prop_assert_eq!(word_poly(w), word_poly(swapped));
    }

    #[test]
    fn moving_a_letter_across_h_is_visible(
        left in proptest::collection::vec(commuting(), 0..3),
        m in (1i32..5),
        sep in a_letter(),
        right in proptest::collection::vec(commuting(), 0..3),
    ) {
        let h = Generator::HPow(m);
        let mut w = left.clone();
        w.extend([h, sep]);
        w.extend(right.iter().copied());
        let mut moved = left.clone();
        moved.extend([sep, h]);
        moved.extend(right.iter().copied());
        let (p, q) = (word_poly(w), word_poly(moved));
        prop_assert_ne!(&p, &q);
        for (basis, _) in p.iter() {
            prop_assert!(blocks(&basis.word).len() <= 2);
        }
    }
}
