#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use ramseykit::structure::all_tuples;
use ramseykit::tree::{full_tree_nodes, meet};
use ramseykit::{Dialect, Elem, FiniteStructure, TreeNode, TreeStructure};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub const DIALECTS: [Dialect; 4] = [Dialect::L0, Dialect::L1, Dialect::Ls, Dialect::Lt];

pub fn meet_closure(nodes: &[TreeNode]) -> Vec<TreeNode> {
    let mut set: BTreeSet<TreeNode> = nodes.iter().cloned().collect();
    loop {
        let extra: Vec<TreeNode> =
            set.iter().tuple_combinations().map(|(a, b)| meet(a, b)).filter(|m| !set.contains(m)).collect();
        if extra.is_empty() {
            return set.into_iter().collect();
        }
        set.extend(extra);
    }
}

/// At most `picks` random nodes of `k^{<=n}`, closed under meet.
pub fn random_tree_nodes(r: &mut ChaCha8Rng, k: u32, n: usize, picks: usize) -> Vec<TreeNode> {
    let all = full_tree_nodes(k, n);
    let count = r.gen_range(1..=picks.min(all.len()));
    let chosen: Vec<TreeNode> = all.choose_multiple(r, count).cloned().collect();
    meet_closure(&chosen)
}

/// A random tree of at most 15 nodes in the given dialect.
pub fn random_tree(r: &mut ChaCha8Rng, dialect: Dialect) -> TreeStructure {
    let k = r.gen_range(1..=3);
    let n = r.gen_range(0..=3);
    let nodes = random_tree_nodes(r, k, n, 8);
    TreeStructure::from_nodes(nodes, dialect).unwrap()
}

/// Least function-and-constant-closed superset, by naive iteration over
/// all argument tuples.
pub fn naive_closure(s: &FiniteStructure, seed: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    let mut set = seed.clone();
    set.extend(s.constant_values());
    loop {
        let before = set.len();
        let current: Vec<Elem> = set.iter().copied().collect();
        for (f, (_, arity)) in s.signature().functions().iter().enumerate() {
            for idx in all_tuples(current.len(), *arity) {
                let args: Vec<Elem> = idx.iter().map(|&i| current[i]).collect();
                set.insert(s.apply(f, &args));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Whether `map` (from `a`'s universe into `c`'s) preserves and reflects
/// all relations and commutes with functions and constants, checked
/// table by table.
pub fn naive_is_embedding(a: &FiniteStructure, c: &FiniteStructure, map: &[Elem]) -> bool {
    if map.iter().collect::<BTreeSet<_>>().len() != map.len() {
        return false;
    }
    let sig = a.signature();
    for (r, (_, arity)) in sig.relations().iter().enumerate() {
        for t in all_tuples(a.size(), *arity) {
            let img: Vec<Elem> = t.iter().map(|&x| map[x]).collect();
            if a.holds(r, &t) != c.holds(r, &img) {
                return false;
            }
        }
    }
    for (f, (_, arity)) in sig.functions().iter().enumerate() {
        for t in all_tuples(a.size(), *arity) {
            let img: Vec<Elem> = t.iter().map(|&x| map[x]).collect();
            if c.apply(f, &img) != map[a.apply(f, &t)] {
                return false;
            }
        }
    }
    (0..sig.constants().len()).all(|k| a.constant(k).map(|x| map[x]) == c.constant(k))
}

/// Element sets of copies of `a` in `c`: every subset, every bijection.
pub fn naive_copies(c: &FiniteStructure, a: &FiniteStructure) -> BTreeSet<Vec<Elem>> {
    let mut out = BTreeSet::new();
    for subset in (0..c.size()).combinations(a.size()) {
        if subset.iter().copied().permutations(a.size()).any(|m| naive_is_embedding(a, c, &m)) {
            out.insert(subset);
        }
    }
    out
}

/// Whether `x -> y` extends to an isomorphism of the generated
/// substructures, found by trying every bijection.
pub fn same_type_by_isomorphism(s: &FiniteStructure, x: &[Elem], t: &FiniteStructure, y: &[Elem]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let gx: Vec<Elem> = naive_closure(s, &x.iter().copied().collect()).into_iter().collect();
    let gy: Vec<Elem> = naive_closure(t, &y.iter().copied().collect()).into_iter().collect();
    if gx.len() != gy.len() {
        return false;
    }
    let sx = s.induced(&gx).without_labels();
    let sy = t.induced(&gy).without_labels();
    let pos = |g: &[Elem], e: Elem| g.iter().position(|&z| z == e).unwrap();
    gy.iter().copied().permutations(gy.len()).any(|perm| {
        let map: Vec<Elem> = perm.iter().map(|&e| pos(&gy, e)).collect();
        x.iter().zip(y).all(|(&a, &b)| map[pos(&gx, a)] == pos(&gy, b)) && naive_is_embedding(&sx, &sy, &map)
    })
}

/// All tuples of length `1..=max_len` over the universe.
pub fn tuples_up_to(n: usize, max_len: usize) -> Vec<Vec<Elem>> {
    (1..=max_len).flat_map(|l| all_tuples(n, l)).collect()
}

pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}

/// A random tree as a structure over the dialect's signature with levels up
/// to 3, so that trees of different heights are comparable.
pub fn random_tree_structure(r: &mut ChaCha8Rng, dialect: Dialect) -> FiniteStructure {
    random_tree(r, dialect).into_structure().without_labels().conform_to(dialect.signature(3)).unwrap()
}
