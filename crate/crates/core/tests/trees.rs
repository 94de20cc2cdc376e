mod common;

use std::collections::{BTreeSet, HashMap};

use common::*;
use itertools::Itertools;
use proptest::prelude::*;
use ramseykit::amalgam::kt_embedding;
use ramseykit::fill::maximal_elements;
use ramseykit::iso::embeds;
use ramseykit::skew::skew_embed;
use ramseykit::structure::all_tuples;
use ramseykit::tree::{full_tree_nodes, lex_cmp, meet, PREFIX};
use ramseykit::{
    build_tree, enumerate_embeddings, expand_to_ls, extract_s, fill_m, find_isomorphism, in_kmu, kt_membership,
    qf_type, Dialect, Elem, FiniteStructure, TreeNode, TreeStructure,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn node(s: &str) -> TreeNode {
    s.parse().unwrap()
}

/// Up to four distinct nodes of `3^{<=3}`, not necessarily meet-closed.
fn random_lt(r: &mut ChaCha8Rng) -> FiniteStructure {
    let all = full_tree_nodes(3, 3);
    let count = r.gen_range(1..=4);
    let nodes: Vec<TreeNode> = all.choose_multiple(r, count).cloned().collect();
    TreeStructure::from_nodes(nodes, Dialect::Lt).unwrap().into_structure().without_labels()
}

fn flip_one_atom(r: &mut ChaCha8Rng, s: &FiniteStructure) -> FiniteStructure {
    let rel = r.gen_range(0..2);
    let t = [r.gen_range(0..s.size()), r.gen_range(0..s.size())];
    let mut b = FiniteStructure::builder(s.shared_signature(), s.size());
    for q in 0..2 {
        for u in s.relation_tuples(q) {
            if !(q == rel && u == t) {
                b.relation_at(q, u).unwrap();
            }
        }
    }
    if !s.holds(rel, &t) {
        b.relation_at(rel, &t).unwrap();
    }
    b.build()
}

/// A random member of the uniform-height class: the downward closure of
/// some nodes of length `m`.
fn random_uniform(r: &mut ChaCha8Rng, k: u32, m: usize, tips: usize) -> TreeStructure {
    let leaves: Vec<TreeNode> = full_tree_nodes(k, m).into_iter().filter(|x| x.level() == m).collect();
    let count = r.gen_range(1..=tips.min(leaves.len()));
    let chosen: Vec<TreeNode> = leaves.choose_multiple(r, count).cloned().collect();
    let closure: BTreeSet<TreeNode> =
        chosen.iter().flat_map(|x| (0..=m).map(move |l| TreeNode(x.0[..l].to_vec()))).collect();
    TreeStructure::from_nodes(closure, Dialect::Lt).unwrap()
}

proptest! {
    #![proptest_config(config(150))]

    #[test]
    fn kt_membership_matches_embedding_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut s = random_lt(&mut r);
        if r.gen_bool(0.5) {
            s = flip_one_atom(&mut r, &s);
        }
        let n = s.size();
        let host = build_tree(n as u32, n.saturating_sub(1), Dialect::Lt).into_structure().without_labels();
        let oracle = s.is_valid() && embeds(&s, &host).unwrap();
        prop_assert_eq!(kt_membership(&s), oracle);
        if let Some(image) = kt_embedding(&s) {
            let t = TreeStructure::from_nodes(image.clone(), Dialect::Lt).unwrap();
            let map: Vec<Elem> = image.iter().map(|x| t.element(x).unwrap()).collect();
            prop_assert!(naive_is_embedding(&s, &t.structure().without_labels(), &map));
        }
    }

    #[test]
    fn expansion_is_functorial_on_uniform_trees(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(1..=2);
        let k = r.gen_range(1..=3);
        let a = random_uniform(&mut r, k, m, 2).into_structure().without_labels();
        let b = random_uniform(&mut r, 3, m, 4).into_structure().without_labels();
        prop_assert!(in_kmu(&a, m) && in_kmu(&b, m));
        let (ea, eb) = (expand_to_ls(&a, m).unwrap(), expand_to_ls(&b, m).unwrap());
        for f in enumerate_embeddings(&a, &b).unwrap() {
            prop_assert!(naive_is_embedding(&ea, &eb, &f.map));
        }
    }

    #[test]
    fn fill_then_extract_gives_back_the_tree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(0..=3);
        let k = r.gen_range(1..=3);
        let nodes = random_tree_nodes(&mut r, k, m, 4);
        let d = TreeStructure::with_levels(nodes, Dialect::Ls, m).unwrap().into_structure();
        prop_assume!(d.size() <= 8);
        let f = fill_m(&d, m).unwrap();
        prop_assert!(f.k <= k);
        prop_assert!(in_kmu(f.filled.structure(), m));
        let back = extract_s(f.filled.structure(), &f.mark_elements(), m).unwrap();
        prop_assert!(find_isomorphism(&back.without_labels(), &d.without_labels()).unwrap().is_some());
        // every tip of the filled tree has length m and lies above a mark
        let s = f.filled.structure();
        for x in maximal_elements(s).unwrap() {
            prop_assert_eq!(f.filled.node(x).level(), m);
            prop_assert!(f.marks.iter().any(|y| y.is_prefix_of(f.filled.node(x))));
        }
    }
}

#[test]
fn known_members_and_non_members() {
    let ce = ramseykit::fixtures::amalgamation_counterexample();
    assert!(kt_membership(&ce.b1));
    assert!(kt_membership(&build_tree(1, 4, Dialect::Lt).into_structure()));
    // prefix relation that is not antisymmetric
    let s = build_tree(1, 1, Dialect::Lt).into_structure();
    let mut b = FiniteStructure::builder(s.shared_signature(), 2);
    b.relation(PREFIX, &[0, 0]).unwrap().relation(PREFIX, &[1, 1]).unwrap();
    b.relation(PREFIX, &[0, 1]).unwrap().relation(PREFIX, &[1, 0]).unwrap();
    b.relation("<lex", &[0, 1]).unwrap();
    assert!(!kt_membership(&b.build()));
}

#[test]
fn skew_embeddings_preserve_the_tree_and_skew_lengths() {
    for k in 1..=3 {
        for n in 0..=3 {
            let s = skew_embed(k, n);
            let src = full_tree_nodes(k, n);
            assert_eq!(s.map.len(), src.len());
            for x in &src {
                for y in &src {
                    let (fx, fy) = (&s.map[x], &s.map[y]);
                    assert_eq!(x.is_prefix_of(y), fx.is_prefix_of(fy), "k={k} n={n} {x} {y}");
                    assert_eq!(lex_cmp(x, y), lex_cmp(fx, fy));
                    assert_eq!(&s.map[&meet(x, y)], &meet(fx, fy));
                    if x < y {
                        assert!(fx.level() < fy.level(), "k={k} n={n} {x} {y}");
                    }
                }
            }
        }
    }
    let s = skew_embed(2, 1);
    assert_eq!(s.map[&node("0")], node("0.0"));
    assert_eq!(s.map[&node("1")], node("1.0.0"));
    assert_eq!(s.map[&node("()")], node("()"));
    assert_eq!(s.levels, vec![1]);
    let s = skew_embed(2, 2);
    assert_eq!(s.levels, vec![1, 4]);
    let lengths: Vec<usize> = s.map.iter().filter(|(x, _)| x.level() > 0).map(|(_, y)| y.level()).collect();
    assert_eq!(lengths, vec![5, 7, 8, 9, 11, 12]);
}

#[test]
fn meet_types_on_the_skew_image_determine_length_types() {
    let s = skew_embed(2, 2);
    let src = TreeStructure::from_nodes(s.map.keys().cloned(), Dialect::L0).unwrap();
    let img = TreeStructure::from_nodes(s.map.values().cloned(), Dialect::L1).unwrap();
    let to_img: Vec<Elem> = src.nodes().iter().map(|x| img.element(&s.map[x]).unwrap()).collect();
    let mut seen: HashMap<String, String> = HashMap::new();
    for len in 1..=3 {
        for t in all_tuples(src.len(), len) {
            let l0 = qf_type(src.structure(), &t).unwrap().key();
            let image: Vec<Elem> = t.iter().map(|&x| to_img[x]).collect();
            let l1 = qf_type(img.structure(), &image).unwrap().key();
            let prev = seen.entry(l0).or_insert_with(|| l1.clone());
            assert_eq!(prev, &l1, "tuple {t:?}");
        }
    }
    // on the plain full tree it fails: same meet type, lengths in opposite order
    let full0 = build_tree(2, 2, Dialect::L0);
    let full1 = build_tree(2, 2, Dialect::L1);
    let key = |t: &TreeStructure, p: [&str; 2]| {
        qf_type(t.structure(), &p.map(|x| t.element(&node(x)).unwrap())).unwrap().key()
    };
    assert_eq!(key(&full0, ["0.0", "1"]), key(&full0, ["0", "1.0"]));
    assert_ne!(key(&full1, ["0.0", "1"]), key(&full1, ["0", "1.0"]));
}

#[test]
fn expansion_of_the_binary_fan() {
    let t = build_tree(2, 1, Dialect::Lt);
    let e = expand_to_ls(t.structure(), 1).unwrap();
    let p0: Vec<Elem> = (0..3).filter(|&x| e.holds_named("P0", &[x]).unwrap()).collect();
    let p1: Vec<Elem> = (0..3).filter(|&x| e.holds_named("P1", &[x]).unwrap()).collect();
    assert_eq!(p0, vec![0]);
    assert_eq!(p1, vec![1, 2]);
}

#[test]
fn expansion_is_not_functorial_across_heights() {
    let a = TreeStructure::from_nodes([node("()"), node("0"), node("1")], Dialect::Lt).unwrap();
    let b = TreeStructure::from_nodes([node("()"), node("0"), node("0.0"), node("0.1")], Dialect::Lt).unwrap();
    let map = vec![0, 2, 3];
    assert!(naive_is_embedding(a.structure(), b.structure(), &map));
    let (ea, eb) = (expand_to_ls(a.structure(), 2).unwrap(), expand_to_ls(b.structure(), 2).unwrap());
    assert!(!naive_is_embedding(&ea, &eb, &map));
    assert!(!in_kmu(a.structure(), 2));
}

#[test]
fn uniform_trees_are_recognized_from_both_sides() {
    let mut r = rng(7);
    for _ in 0..50 {
        let m = r.gen_range(0..=3);
        let t = random_uniform(&mut r, 2, m, 3);
        assert!(in_kmu(t.structure(), m));
        if m > 0 {
            assert!(!in_kmu(t.structure(), m - 1));
        }
        // dropping a tip keeps a uniform tree only if its parent has another child
        let tips: Vec<TreeNode> = t.nodes().iter().filter(|x| x.level() == m).cloned().collect();
        if m > 0 && tips.len() > 1 {
            let dropped = &tips[0];
            let rest: Vec<TreeNode> = t.nodes().iter().filter(|x| *x != dropped).cloned().collect();
            let parent = TreeNode(dropped.0[..m - 1].to_vec());
            let orphan = !rest.iter().any(|x| parent.is_prefix_of(x) && x.level() == m);
            let u = TreeStructure::from_nodes(rest, Dialect::Lt).unwrap();
            assert_eq!(in_kmu(u.structure(), m), !orphan);
        }
    }
    let sizes: Vec<usize> = (0..4).map(|m| build_tree(2, m, Dialect::Lt).len()).collect();
    assert_eq!(sizes, vec![1, 3, 7, 15]);
    assert!(sizes.iter().tuple_windows().all(|(a, b)| b == &(2 * a + 1)));
}
