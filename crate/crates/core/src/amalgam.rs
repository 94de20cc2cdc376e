//! Amalgamation: searching for amalgams of two one-sided extensions inside
//! a class, and membership in the age of the full tree with prefix and
//! lexicographic order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::format::serialize_structure;
use crate::iso::{canonical_form, Embedding};
use crate::structure::{all_tuples, Elem, FiniteStructure};
use crate::tree::{TreeNode, LEX, PREFIX};

/// A class of finite structures given by a membership test.
pub trait StructureClass {
    fn contains(&self, s: &FiniteStructure) -> bool;

    /// Whether the class is closed under substructures. For hereditary
    /// classes in relational signatures the amalgam search only needs to
    /// look at amalgams covered by the two images.
    fn is_hereditary(&self) -> bool {
        false
    }
}

/// The age of `omega^{<omega}` with the prefix and lexicographic orders.
#[derive(Debug, Clone, Copy, Default)]
pub struct TreeAge;

impl StructureClass for TreeAge {
    fn contains(&self, s: &FiniteStructure) -> bool {
        kt_membership(s)
    }

    fn is_hereditary(&self) -> bool {
        true
    }
}

/// Strict linear orders in the designated order relation, all other
/// relations arbitrary.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearOrders;

impl StructureClass for LinearOrders {
    fn contains(&self, s: &FiniteStructure) -> bool {
        s.is_ordered() && s.is_valid()
    }

    fn is_hereditary(&self) -> bool {
        true
    }
}

/// All valid structures of the signature.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllStructures;

impl StructureClass for AllStructures {
    fn contains(&self, s: &FiniteStructure) -> bool {
        s.is_valid()
    }

    fn is_hereditary(&self) -> bool {
        true
    }
}

impl<F: Fn(&FiniteStructure) -> bool> StructureClass for F {
    fn contains(&self, s: &FiniteStructure) -> bool {
        self(s)
    }
}

/// An amalgam `d` with embeddings `g1: b1 -> d`, `g2: b2 -> d` agreeing on
/// the common part.
#[derive(Debug, Clone)]
pub struct Amalgam {
    pub d: FiniteStructure,
    pub g1: Embedding,
    pub g2: Embedding,
}

#[derive(Debug, Clone)]
pub struct AmalgamSearch {
    pub amalgam: Option<Amalgam>,
    /// Candidate structures tested for membership (after deduplication).
    pub candidates: u64,
    /// Candidate structures generated.
    pub generated: u64,
    pub size_bound: usize,
}

/// Searches for an amalgam of `b1` and `b2` over `a` in `class` with at most
/// `size_bound` elements. The signature must be relational.
///
/// Every amalgam contains the union of the two images. For hereditary
/// classes that union is an amalgam in the class too, so only unions are
/// tried: each element of `b2` outside the image of `a` is either
/// identified with an element of `b1` outside the image of `a` or kept new,
/// and every atom not fixed by `b1` or `b2` is tried both ways. For other
/// classes up to `size_bound - |union|` extra elements are added as well.
/// Generated candidates count against `budget`.
#[allow(clippy::too_many_arguments)]
pub fn check_amalgamation(
    a: &FiniteStructure,
    b1: &FiniteStructure,
    b2: &FiniteStructure,
    e1: &Embedding,
    e2: &Embedding,
    class: &dyn StructureClass,
    size_bound: usize,
    budget: u64,
) -> Result<AmalgamSearch> {
    let sig = a.signature();
    if b1.signature() != sig || b2.signature() != sig {
        return Err(Error::SignatureMismatch);
    }
    if !sig.is_relational() {
        return Err(Error::InvalidArgument("amalgam search needs a relational signature".into()));
    }
    if !a.is_embedding(b1, &e1.map) || !a.is_embedding(b2, &e2.map) {
        return Err(Error::InvalidArgument("the given maps are not embeddings".into()));
    }
    let n1 = b1.size();
    let mut from_a = vec![None; b2.size()];
    for (x, &y) in e2.map.iter().enumerate() {
        from_a[y] = Some(e1.map[x]);
    }
    let only1: Vec<Elem> = (0..n1).filter(|y| !e1.map.contains(y)).collect();
    let only2: Vec<Elem> = (0..b2.size()).filter(|&y| from_a[y].is_none()).collect();

    let mut search = AmalgamSearch { amalgam: None, candidates: 0, generated: 0, size_bound };
    let mut seen: HashMap<String, bool> = HashMap::new();

    // Identifications of the b2-only elements, fewest new elements first.
    let mut plans: Vec<Vec<Option<Elem>>> = Vec::new();
    fn plan(
        i: usize,
        only1: &[Elem],
        used: &mut Vec<bool>,
        cur: &mut Vec<Option<Elem>>,
        out: &mut Vec<Vec<Option<Elem>>>,
        n: usize,
    ) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for (j, &y) in only1.iter().enumerate() {
            if !used[j] {
                used[j] = true;
                cur.push(Some(y));
                plan(i + 1, only1, used, cur, out, n);
                cur.pop();
                used[j] = false;
            }
        }
        cur.push(None);
        plan(i + 1, only1, used, cur, out, n);
        cur.pop();
    }
    plan(0, &only1, &mut vec![false; only1.len()], &mut Vec::new(), &mut plans, only2.len());
    plans.sort_by_key(|p| p.iter().filter(|x| x.is_none()).count());

    for p in plans {
        let fresh = p.iter().filter(|x| x.is_none()).count();
        let union = n1 + fresh;
        if union > size_bound {
            continue;
        }
        let mut g2 = vec![0; b2.size()];
        let mut next = n1;
        for y in 0..b2.size() {
            g2[y] = match from_a[y] {
                Some(v) => v,
                None => {
                    let k = only2.iter().position(|&z| z == y).unwrap();
                    p[k].unwrap_or_else(|| {
                        next += 1;
                        next - 1
                    })
                }
            };
        }
        let g1: Vec<Elem> = (0..n1).collect();
        let extras_max = if class.is_hereditary() { 0 } else { size_bound - union };
        for extra in 0..=extras_max {
            if let Some(found) = complete(b1, b2, &g1, &g2, union + extra, class, budget, &mut search, &mut seen)? {
                search.amalgam = Some(found);
                return Ok(search);
            }
        }
    }
    Ok(search)
}

/// Tries every completion of the atoms not fixed by the images of `b1` and
/// `b2` on a universe of `size` elements.
#[allow(clippy::too_many_arguments)]
fn complete(
    b1: &FiniteStructure,
    b2: &FiniteStructure,
    g1: &[Elem],
    g2: &[Elem],
    size: usize,
    class: &dyn StructureClass,
    budget: u64,
    search: &mut AmalgamSearch,
    seen: &mut HashMap<String, bool>,
) -> Result<Option<Amalgam>> {
    let sig = Arc::new(b1.signature().clone());
    let mut back2 = vec![None; size];
    for (y, &v) in g2.iter().enumerate() {
        back2[v] = Some(y);
    }
    let in1 = |x: Elem| x < b1.size();
    let mut fixed: BTreeMap<(usize, Vec<Elem>), bool> = BTreeMap::new();
    let mut free: Vec<(usize, Vec<Elem>)> = Vec::new();
    for (r, (_, arity)) in sig.relations().iter().enumerate() {
        for t in all_tuples(size, *arity) {
            let v1 = t.iter().all(|&x| in1(x)).then(|| b1.holds(r, &t));
            let v2 = t.iter().all(|&x| back2[x].is_some()).then(|| {
                let u: Vec<Elem> = t.iter().map(|&x| back2[x].unwrap()).collect();
                b2.holds(r, &u)
            });
            match (v1, v2) {
                (Some(p), Some(q)) if p != q => return Ok(None),
                (Some(p), _) | (None, Some(p)) => {
                    fixed.insert((r, t), p);
                }
                (None, None) => free.push((r, t)),
            }
        }
    }
    if free.len() >= 63 {
        return Err(Error::InvalidArgument(format!("{} free atoms is too many to enumerate", free.len())));
    }
    for bits in 0u64..(1u64 << free.len()) {
        search.generated += 1;
        if search.generated > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut b = FiniteStructure::builder(Arc::clone(&sig), size);
        for ((r, t), &v) in &fixed {
            if v {
                b.relation_at(*r, t)?;
            }
        }
        for (i, (r, t)) in free.iter().enumerate() {
            if bits >> i & 1 == 1 {
                b.relation_at(*r, t)?;
            }
        }
        let d = b.build();
        let key = match canonical_form(&d) {
            Ok((c, _)) => serialize_structure(&c),
            Err(_) => serialize_structure(&d),
        };
        let member = match seen.get(&key) {
            Some(&m) => m,
            None => {
                search.candidates += 1;
                let m = class.contains(&d);
                seen.insert(key, m);
                m
            }
        };
        if member {
            return Ok(Some(Amalgam { d, g1: Embedding { map: g1.to_vec() }, g2: Embedding { map: g2.to_vec() } }));
        }
    }
    Ok(None)
}

/// Nodes of `omega^{<omega}` realizing `s`, if `s` belongs to the age of the
/// full tree in the prefix/lex language.
///
/// `s` belongs iff the prefix relation is a reflexive partial order whose
/// down-sets are chains, the lexicographic relation is a strict linear order
/// extending it, and strict up-sets are lexicographic intervals (if `x` is
/// below `z`, everything lexicographically between them is above `x`). The
/// realization sends the `i`-th root to `<i>` and the `i`-th immediate
/// successor of a node to that node's image followed by `i`.
pub fn kt_embedding(s: &FiniteStructure) -> Option<Vec<TreeNode>> {
    let sig = s.signature();
    let p = sig.relation_index(PREFIX)?;
    let l = sig.relation_index(LEX)?;
    let n = s.size();
    let le = |x: Elem, y: Elem| s.holds(p, &[x, y]);
    let lt = |x: Elem, y: Elem| s.holds(l, &[x, y]);
    for x in 0..n {
        if !le(x, x) || lt(x, x) {
            return None;
        }
        for y in 0..n {
            if x != y {
                if le(x, y) && le(y, x) {
                    return None;
                }
                if lt(x, y) == lt(y, x) {
                    return None;
                }
                if le(x, y) && !lt(x, y) {
                    return None;
                }
            }
            for z in 0..n {
                if le(x, y) && le(y, z) && !le(x, z) {
                    return None;
                }
                if lt(x, y) && lt(y, z) && !lt(x, z) {
                    return None;
                }
                // down-sets are chains
                if le(x, z) && le(y, z) && !le(x, y) && !le(y, x) {
                    return None;
                }
                if le(x, z) && lt(x, y) && lt(y, z) && !le(x, y) {
                    return None;
                }
            }
        }
    }
    let mut order: Vec<Elem> = (0..n).collect();
    order.sort_by(|&x, &y| {
        if x == y {
            std::cmp::Ordering::Equal
        } else if lt(x, y) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    // parent = the greatest strict predecessor
    let parent: Vec<Option<Elem>> = (0..n)
        .map(|y| (0..n).filter(|&x| x != y && le(x, y)).max_by_key(|&x| (0..n).filter(|&z| le(z, x)).count()))
        .collect();
    let mut image: Vec<Option<TreeNode>> = vec![None; n];
    let mut children_seen: HashMap<Option<Elem>, u32> = HashMap::new();
    for &x in &order {
        let count = children_seen.entry(parent[x]).or_insert(0);
        let base = match parent[x] {
            None => TreeNode::root(),
            Some(q) => image[q].clone().expect("parents come first in lex order"),
        };
        image[x] = Some(base.child(*count));
        *count += 1;
    }
    Some(image.into_iter().map(Option::unwrap).collect())
}

/// Whether `s` embeds into some `k^{<=n}` with its prefix and lexicographic
/// orders.
pub fn kt_membership(s: &FiniteStructure) -> bool {
    kt_embedding(s).is_some()
}

/// One branch of a case split ending in a contradiction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contradiction {
    /// The assumed comparability, e.g. `b4 <= c4`.
    pub assumption: String,
    /// The forced chain, e.g. `b4 <= c4 <= c3 = b3`.
    pub chain: String,
    /// Which side's data it contradicts and how.
    pub clash: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    /// The two unshared elements forced to be comparable.
    pub pair: (String, String),
    /// The shared element above both.
    pub common_successor: String,
    pub cases: Vec<Contradiction>,
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} and {} lie below {}, so they are {PREFIX}-comparable",
            self.pair.0, self.pair.1, self.common_successor
        )?;
        for c in &self.cases {
            writeln!(f, "case {}: {}, {}", c.assumption, c.chain, c.clash)?;
        }
        Ok(())
    }
}

/// Refutes amalgamation in the tree age by a comparability case split.
///
/// Looks for `x` in `b1` and `y` in `b2`, both outside the common part, lying
/// below a common element of the common part. In any amalgam they must be
/// comparable; each direction is pushed through one step of transitivity
/// into the common part, where it must clash with `b1` or `b2`. Returns the
/// first pair for which both directions clash.
pub fn refute_tree_amalgam(
    b1: &FiniteStructure,
    b2: &FiniteStructure,
    e1: &Embedding,
    e2: &Embedding,
) -> Option<Refutation> {
    let p1 = b1.signature().relation_index(PREFIX)?;
    let p2 = b2.signature().relation_index(PREFIX)?;
    // common part: pairs (element of b1, element of b2) with the same preimage
    let common: Vec<(Elem, Elem)> = e1.map.iter().copied().zip(e2.map.iter().copied()).collect();
    let only1: Vec<Elem> = (0..b1.size()).filter(|y| !e1.map.contains(y)).collect();
    let only2: Vec<Elem> = (0..b2.size()).filter(|y| !e2.map.contains(y)).collect();
    let name1 = |x: Elem| b1.label(x);
    let name2 = |x: Elem| b2.label(x);
    let same = |(u, v): (Elem, Elem)| format!("{} = {}", name2(v), name1(u));
    let same_rev = |(u, v): (Elem, Elem)| format!("{} = {}", name1(u), name2(v));
    for &x in &only1 {
        for &y in &only2 {
            let Some(&top) = common.iter().find(|&&(u, v)| b1.holds(p1, &[x, u]) && b2.holds(p2, &[y, v])) else {
                continue;
            };
            // x <= y: then x <= every common point above y in b2
            let up = common.iter().find(|&&(u, v)| b2.holds(p2, &[y, v]) && !b1.holds(p1, &[x, u])).map(|&c| {
                Contradiction {
                    assumption: format!("{} {PREFIX} {}", name1(x), name2(y)),
                    chain: format!("{} {PREFIX} {} {PREFIX} {}", name1(x), name2(y), same(c)),
                    clash: format!("but not {} {PREFIX} {} in the first structure", name1(x), name1(c.0)),
                }
            });
            let down = common.iter().find(|&&(u, v)| b1.holds(p1, &[x, u]) && !b2.holds(p2, &[y, v])).map(|&c| {
                Contradiction {
                    assumption: format!("{} {PREFIX} {}", name2(y), name1(x)),
                    chain: format!("{} {PREFIX} {} {PREFIX} {}", name2(y), name1(x), same_rev(c)),
                    clash: format!("but not {} {PREFIX} {} in the second structure", name2(y), name2(c.1)),
                }
            });
            if let (Some(up), Some(down)) = (up, down) {
                return Some(Refutation {
                    pair: (name1(x), name2(y)),
                    common_successor: format!("{} = {}", name1(top.0), name2(top.1)),
                    cases: vec![up, down],
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_tree, Dialect, TreeStructure};

    #[test]
    fn trees_are_members() {
        for (k, n) in [(1, 3), (2, 2), (3, 1)] {
            let t = build_tree(k, n, Dialect::Lt);
            let img = kt_embedding(t.structure()).unwrap();
            let again = TreeStructure::from_nodes(img, Dialect::Lt).unwrap();
            assert_eq!(again.structure().without_labels(), t.structure().without_labels());
        }
    }

    #[test]
    fn two_cycle_is_not_a_member() {
        let sig = Dialect::Lt.signature(0);
        let mut b = FiniteStructure::builder(sig, 2);
        for (x, y) in [(0, 0), (1, 1), (0, 1), (1, 0)] {
            b.relation(PREFIX, &[x, y]).unwrap();
        }
        b.relation(LEX, &[0, 1]).unwrap();
        assert!(!kt_membership(&b.build()));
    }
}
