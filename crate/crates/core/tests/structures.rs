mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use ramseykit::fixtures::{amalgamation_counterexample, chain};
use ramseykit::iso::copy_sets;
use ramseykit::{
    age_up_to, build_tree, cl, closure_set, enumerate_copies, enumerate_embeddings, find_isomorphism,
    generated_substructure, parse_structure, serialize_structure, Dialect, Elem, Signature, TreeNode,
};
use rand::Rng;

fn node(s: &str) -> TreeNode {
    s.parse().unwrap()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn closure_laws(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let t = random_tree(&mut r, DIALECTS[d]);
        let s = t.structure();
        let n = s.size();
        let a: BTreeSet<Elem> = (0..n).filter(|_| r.gen_bool(0.3)).collect();
        let b: BTreeSet<Elem> = a.iter().copied().chain((0..n).filter(|_| r.gen_bool(0.3))).collect();
        let ca = closure_set(s, &a).unwrap();
        prop_assert!(a.is_subset(&ca));
        prop_assert_eq!(&closure_set(s, &ca).unwrap(), &ca);
        prop_assert!(ca.is_subset(&closure_set(s, &b).unwrap()));
        prop_assert_eq!(&ca, &naive_closure(s, &a));
    }

    #[test]
    fn cl_is_increasing_and_contains_its_seed(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let t = random_tree(&mut r, DIALECTS[d]);
        let s = t.structure();
        let mut a: Vec<Elem> = (0..s.size()).filter(|_| r.gen_bool(0.4)).collect();
        s.sort_increasing(&mut a);
        let c = cl(s, &a).unwrap();
        prop_assert!(s.is_increasing(&c).unwrap());
        prop_assert!(a.iter().all(|x| c.contains(x)));
        prop_assert_eq!(cl(s, &c).unwrap(), c);
    }

    #[test]
    fn format_round_trips(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let s = random_tree(&mut r, DIALECTS[d]).into_structure();
        let text = serialize_structure(&s);
        let back = parse_structure(&text).unwrap();
        prop_assert_eq!(serialize_structure(&back), text);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn isomorphism_is_symmetric(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let x = random_tree_structure(&mut r, DIALECTS[d]);
        let y = random_tree_structure(&mut r, DIALECTS[d]);
        let there = find_isomorphism(&x, &y).unwrap();
        let back = find_isomorphism(&y, &x).unwrap();
        prop_assert_eq!(there.is_some(), back.is_some());
        if let (Some(f), Some(g)) = (there, back) {
            let id: Vec<Elem> = (0..x.size()).collect();
            prop_assert_eq!(f.compose(&g).map, id);
            prop_assert!(naive_is_embedding(&x, &y, &f.map));
        }
        let self_iso = find_isomorphism(&x, &x).unwrap().unwrap();
        prop_assert_eq!(self_iso.map, (0..x.size()).collect::<Vec<_>>());
    }

    #[test]
    fn copies_match_brute_force(seed in any::<u64>(), d in 0usize..4) {
        let mut r = rng(seed);
        let dialect = DIALECTS[d];
        let c = loop {
            let t = random_tree(&mut r, dialect);
            if t.len() <= 7 { break t; }
        };
        let sub: Vec<TreeNode> = {
            let picks: Vec<TreeNode> = c.nodes().iter().filter(|_| r.gen_bool(0.5)).cloned().collect();
            if picks.is_empty() { vec![c.nodes()[0].clone()] } else { meet_closure(&picks) }
        };
        let a = ramseykit::TreeStructure::with_levels(sub, dialect, c.nodes().iter().map(|x| x.level()).max().unwrap())
            .unwrap()
            .into_structure()
            .without_labels();
        let host = c.structure().without_labels();
        let fast: BTreeSet<Vec<Elem>> = copy_sets(&host, &a).unwrap().into_iter().collect();
        prop_assert_eq!(&fast, &naive_copies(&host, &a));
        // ordered structures are rigid
        prop_assert_eq!(enumerate_embeddings(&a, &host).unwrap().len(), fast.len());
    }
}

#[test]
fn generated_substructure_of_two_cousins() {
    let t = build_tree(2, 2, Dialect::L0);
    let seed = [t.element(&node("0.0")).unwrap(), t.element(&node("0.1")).unwrap()];
    let g = generated_substructure(t.structure(), &seed).unwrap();
    let got: Vec<TreeNode> = g.elements.iter().map(|&e| t.node(e).clone()).collect();
    assert_eq!(got, vec![node("0"), node("0.0"), node("0.1")]);
    assert_eq!(g.pattern.size(), 3);
}

#[test]
fn closure_of_a_leaf_and_an_uncle() {
    let t = build_tree(2, 2, Dialect::L0);
    let a: BTreeSet<Elem> = [node("0.0"), node("1")].iter().map(|x| t.element(x).unwrap()).collect();
    let got: BTreeSet<TreeNode> = closure_set(t.structure(), &a).unwrap().iter().map(|&e| t.node(e).clone()).collect();
    assert_eq!(got, [node("()"), node("0.0"), node("1")].into_iter().collect());
}

#[test]
fn level_shift_is_an_isomorphism() {
    let a = ramseykit::TreeStructure::from_nodes([node("()"), node("0"), node("1")], Dialect::L0).unwrap();
    let b = ramseykit::TreeStructure::from_nodes([node("0"), node("0.0"), node("0.1")], Dialect::L0).unwrap();
    let f = find_isomorphism(&a.structure().without_labels(), &b.structure().without_labels()).unwrap().unwrap();
    assert_eq!(f.map, vec![0, 1, 2]);
}

#[test]
fn chain_and_antichain_are_not_isomorphic() {
    let sig = Signature::relational(&[("<=", 2)], None).unwrap();
    let mut x = ramseykit::FiniteStructure::builder(sig.clone(), 2);
    x.relation("<=", &[0, 1]).unwrap();
    let y = ramseykit::FiniteStructure::builder(sig, 2);
    assert!(find_isomorphism(&x.build(), &y.build()).unwrap().is_none());
}

#[test]
fn counting_embeddings() {
    let sig = Signature::relational(&[("E", 2)], None).unwrap();
    let point = ramseykit::FiniteStructure::builder(sig.clone(), 1).build();
    let three = ramseykit::FiniteStructure::builder(sig, 3).build();
    assert_eq!(enumerate_embeddings(&point, &three).unwrap().len(), 3);
    assert_eq!(enumerate_embeddings(&chain(2), &chain(4)).unwrap().len(), 6);
    assert!(enumerate_copies(&chain(2), &chain(4)).unwrap().is_empty());
    let c = build_tree(2, 2, Dialect::L0).into_structure().without_labels();
    assert_eq!(enumerate_copies(&c, &c).unwrap().len(), 1);
}

#[test]
fn one_branch_copies_in_a_chain() {
    let host = build_tree(1, 2, Dialect::Lt).into_structure();
    let pattern = build_tree(1, 1, Dialect::Lt).into_structure().without_labels();
    let got: BTreeSet<Vec<String>> = enumerate_copies(&host.without_labels(), &pattern)
        .unwrap()
        .iter()
        .map(|c| c.elements.iter().map(|&e| host.label(e)).collect())
        .collect();
    let want: BTreeSet<Vec<String>> =
        [["()", "0"], ["0", "0.0"], ["()", "0.0"]].iter().map(|p| p.iter().map(|s| s.to_string()).collect()).collect();
    assert_eq!(got, want);
}

#[test]
fn counterexample_embeds_letter_by_letter() {
    let ce = amalgamation_counterexample();
    let list = enumerate_embeddings(&ce.a, &ce.b1).unwrap();
    assert!(list.iter().any(|e| e.map == ce.e1.map));
    for (i, &x) in ce.e1.map.iter().enumerate() {
        assert_eq!(ce.b1.label(x), format!("b{i}"));
        assert_eq!(ce.b2.label(ce.e2.map[i]), format!("c{i}"));
    }
    assert!(ce.a.validate().is_empty());
}

#[test]
fn age_contains_the_fan_and_the_whole() {
    let t = build_tree(2, 1, Dialect::L0).into_structure();
    let age = age_up_to(&t, 2).unwrap();
    assert!(age.iter().any(|s| s.size() == 3));
    assert!(age.iter().any(|s| find_isomorphism(s, &t.without_labels()).unwrap().is_some()));
    assert!(age_up_to(&t, 0).unwrap().iter().all(|s| s.size() == 0));
}

#[test]
fn fixture_files_match_the_built_in_structures() {
    let ce = amalgamation_counterexample();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    for (file, s) in [("a.txt", &ce.a), ("b1.txt", &ce.b1), ("b2.txt", &ce.b2)] {
        let text = std::fs::read_to_string(format!("{dir}/{file}")).unwrap();
        let parsed = parse_structure(&text).unwrap();
        assert_eq!(&parsed, s, "{file}");
    }
    let b1 = parse_structure(&std::fs::read_to_string(format!("{dir}/b1.txt")).unwrap()).unwrap();
    assert_eq!(b1.size(), 5);
}
