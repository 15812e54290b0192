//! Algebraic invariants over randomly generated sets.

mod common;

use common::{asymmetric_points, delta_outside_difference_set, has_member, POINTWISE_RADIUS};
use delta_calc::classify::is_small;
use delta_calc::corpus::random_expr;
use delta_calc::derivation::delta_symbolic;
use delta_calc::dsl::{parse_set, parse_set_expr};
use delta_calc::{Ideal, Int, SymbolicSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn expr_from_seed(seed: u64) -> String {
    random_expr(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn ideal() -> impl Strategy<Value = Ideal> {
    prop_oneof![Just(Ideal::Trivial), Just(Ideal::Fin)]
}

/// Random corpus-style expressions, drawn from a seed.
fn any_expr() -> impl Strategy<Value = String> {
    any::<u64>().prop_map(expr_from_seed)
}

fn fin_expr() -> impl Strategy<Value = String> {
    prop::collection::vec(-50i64..=50, 0..5).prop_map(|v| {
        if v.is_empty() {
            "empty".to_string()
        } else {
            format!("fin({{{}}})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        }
    })
}

/// Finite sets and bounded block families: the small sets of the class.
fn small_expr() -> impl Strategy<Value = String> {
    let family = (1u64..=3, 2u64..=6, 0u32..=2, -5i64..=5, 0usize..3).prop_map(|(s, b, c, t, side)| {
        let tail = ["", ", mirror", ", side=neg"][side];
        format!("blocks(s={s}, b={b}, len=const({c}), t={t}{tail})")
    });
    prop::collection::vec(prop_oneof![fin_expr(), family], 1..=3).prop_map(|parts| format!("union({})", parts.join(", ")))
}

fn set(expr: &str) -> SymbolicSet {
    parse_set(expr).unwrap_or_else(|e| panic!("{expr}: {e}"))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn printed_expressions_parse_back(expr in any_expr()) {
        let ast = parse_set_expr(&expr).unwrap();
        let printed = ast.to_string();
        let again = parse_set_expr(&printed).unwrap();
        prop_assert_eq!(&ast, &again);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn ideal_laws(a in prop_oneof![fin_expr(), any_expr()], b in prop_oneof![fin_expr(), any_expr()], t in -100i128..=100, ideal in ideal()) {
        let (a, b) = (set(&a), set(&b));
        prop_assert!(!ideal.contains(&SymbolicSet::integers()).value);
        prop_assert!(ideal.contains(&SymbolicSet::empty()).value);
        let ia = ideal.contains(&a);
        let ib = ideal.contains(&b);
        let translated = ideal.contains(&a.translate(t));
        if ia.exact && translated.exact {
            prop_assert_eq!(ia.value, translated.value);
        }
        let union = ideal.contains(&a.union(&b));
        if ia.exact && ib.exact && union.exact {
            prop_assert_eq!(union.value, ia.value && ib.value);
        }
        let sub = ideal.contains(&a.intersection(&b));
        if ia.exact && ia.value && sub.exact {
            prop_assert!(sub.value);
        }
    }

    #[test]
    fn small_sets_are_closed(a in small_expr(), b in small_expr(), c in any_expr(), t in -1000i128..=1000, ideal in ideal()) {
        let (a, b, c) = (set(&a), set(&b), set(&c));
        for s in [&a, &b] {
            let d = is_small(s, ideal).unwrap();
            prop_assert!(d.value && d.exact, "{} should be small", s);
        }
        for derived in [a.union(&b), a.translate(t), a.intersection(&c)] {
            let d = is_small(&derived, ideal).unwrap();
            if d.exact {
                prop_assert!(d.value, "{} should be small", derived);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn delta_is_symmetric_and_inside_the_difference_set(expr in any_expr(), ideal in ideal()) {
        let a = set(&expr);
        let d = delta_symbolic(&a, ideal).unwrap();
        prop_assert_eq!(asymmetric_points(&d.set, POINTWISE_RADIUS), Vec::<Int>::new());
        prop_assert_eq!(delta_outside_difference_set(&a, &d.lower, POINTWISE_RADIUS), Vec::<Int>::new());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn delta_fin_vanishes_exactly_on_finite_sets(expr in prop_oneof![fin_expr(), any_expr()]) {
        let a = set(&expr);
        let d = delta_symbolic(&a, Ideal::Fin).unwrap();
        if a.is_exact() && d.exact {
            prop_assert_eq!(!has_member(&d.set, POINTWISE_RADIUS), a.is_finite_exact(), "{} has Δ {}", a, d.set);
        }
    }

    #[test]
    fn delta_is_translation_invariant(expr in any_expr(), t in -500i128..=500, ideal in ideal()) {
        let a = set(&expr);
        let d = delta_symbolic(&a, ideal).unwrap();
        let dt = delta_symbolic(&a.translate(t), ideal).unwrap();
        if d.exact && dt.exact {
            let (x, y) = (d.set.materialize(-POINTWISE_RADIUS, POINTWISE_RADIUS), dt.set.materialize(-POINTWISE_RADIUS, POINTWISE_RADIUS));
            prop_assert!(x == y, "Δ({}) = {} but Δ of its translate by {} is {}", a, d.set, t, dt.set);
        }
    }
}
