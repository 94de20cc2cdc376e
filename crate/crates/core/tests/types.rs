mod common;

use common::*;
use proptest::prelude::*;
use ramseykit::formula::parse_formula_list;
use ramseykit::structure::all_tuples;
use ramseykit::types::realized_types;
use ramseykit::{build_tree, isolating_formula, qf_type, Dialect, QfFormula};

proptest! {
    #![proptest_config(config(60))]

    #[test]
    fn type_equality_is_isomorphism_of_generated_parts(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let s = random_tree_structure(&mut r, DIALECTS[d]);
        let t = random_tree_structure(&mut r, DIALECTS[d]);
        for len in 1..=2 {
            for x in all_tuples(s.size(), len) {
                for y in all_tuples(t.size(), len) {
                    let same = qf_type(&s, &x).unwrap() == qf_type(&t, &y).unwrap();
                    prop_assert_eq!(same, same_type_by_isomorphism(&s, &x, &t, &y), "{:?} {:?}", x, y);
                }
            }
        }
    }

    #[test]
    fn isolating_formulas_classify_exactly(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let s = random_tree_structure(&mut r, DIALECTS[d]);
        let t = random_tree_structure(&mut r, DIALECTS[d]);
        for q in realized_types(&s, 2).unwrap() {
            let theta = isolating_formula(&q).unwrap();
            prop_assert_eq!(theta.arity, q.arity());
            for y in all_tuples(t.size(), q.arity()) {
                prop_assert_eq!(theta.eval(&t, &y).unwrap(), qf_type(&t, &y).unwrap() == q);
            }
        }
    }
}

#[test]
fn isolating_formulas_on_the_binary_tree_of_height_two() {
    for dialect in [Dialect::L0, Dialect::Ls] {
        let t = build_tree(2, 2, dialect).into_structure();
        let types = realized_types(&t, 2).unwrap();
        for q in &types {
            let theta = isolating_formula(q).unwrap();
            let text = theta.to_string();
            // printing and parsing gives the same formula back
            assert_eq!(QfFormula::parse(&text).unwrap().to_string(), text);
            for y in all_tuples(t.size(), q.arity()) {
                assert_eq!(theta.eval(&t, &y).unwrap(), qf_type(&t, &y).unwrap() == *q, "{dialect} {y:?}");
            }
        }
    }
}

#[test]
fn negation_flips_evaluation() {
    let t = build_tree(2, 1, Dialect::L0).into_structure();
    let list = parse_formula_list("(rel <= x1 x2)\n# comment\n(eq x1 (fn meet x1 x2))\n").unwrap();
    for f in list {
        let neg = QfFormula::new(f.arity, f.body.clone().negate());
        for y in all_tuples(3, 2) {
            assert_ne!(f.eval(&t, &y).unwrap(), neg.eval(&t, &y).unwrap());
        }
    }
    let refl = QfFormula::parse("(eq x1 x1)").unwrap();
    assert!(refl.eval(&t, &[2]).unwrap());
}
