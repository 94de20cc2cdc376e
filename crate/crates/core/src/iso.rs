//! Isomorphisms, embeddings, copies and canonical forms.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::closure::{generated_substructure, Copy};
use crate::error::{Error, Result};
use crate::format::serialize_structure;
use crate::structure::{all_tuples, Elem, FiniteStructure};

/// An embedding given by the image of every source element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    pub map: Vec<Elem>,
}

impl Embedding {
    pub fn image(&self) -> BTreeSet<Elem> {
        self.map.iter().copied().collect()
    }

    pub fn compose(&self, after: &Embedding) -> Embedding {
        Embedding { map: self.map.iter().map(|&x| after.map[x]).collect() }
    }
}

fn same_signature(a: &FiniteStructure, b: &FiniteStructure) -> Result<()> {
    if a.signature() == b.signature() {
        Ok(())
    } else {
        Err(Error::SignatureMismatch)
    }
}

/// Per-element invariant preserved by isomorphisms: for each relation and
/// position, how many tuples hold with the element there.
fn profile(s: &FiniteStructure) -> Vec<Vec<usize>> {
    let mut p = vec![Vec::new(); s.size()];
    for (r, (_, arity)) in s.signature().relations().iter().enumerate() {
        let mut counts = vec![vec![0usize; *arity]; s.size()];
        for t in s.relation_tuples(r) {
            for (i, &x) in t.iter().enumerate() {
                counts[x][i] += 1;
            }
        }
        for (e, c) in counts.into_iter().enumerate() {
            p[e].extend(c);
        }
    }
    for (f, (_, _)) in s.signature().functions().iter().enumerate() {
        let mut hits = vec![0usize; s.size()];
        for (_, v) in s.function_entries(f) {
            if v < s.size() {
                hits[v] += 1;
            }
        }
        for (e, h) in hits.into_iter().enumerate() {
            p[e].push(h);
        }
    }
    p
}

/// Backtracking search for embeddings of `a` into `c`.
///
/// Source elements are assigned in `order`; after each assignment every
/// relation tuple and function entry whose elements are all assigned is
/// checked. `visit` returns `false` to stop the search.
struct Search<'a> {
    a: &'a FiniteStructure,
    c: &'a FiniteStructure,
    order: Vec<Elem>,
    pos: Vec<usize>,
    map: Vec<Elem>,
    used: Vec<bool>,
    allowed: Option<Vec<Vec<bool>>>,
}

impl<'a> Search<'a> {
    fn new(a: &'a FiniteStructure, c: &'a FiniteStructure) -> Search<'a> {
        let order = if a.order_ranks().is_some() && c.order_ranks().is_some() {
            a.increasing_elements()
        } else {
            (0..a.size()).collect()
        };
        let mut pos = vec![0; a.size()];
        for (i, &e) in order.iter().enumerate() {
            pos[e] = i;
        }
        Search { a, c, order, pos, map: vec![usize::MAX; a.size()], used: vec![false; c.size()], allowed: None }
    }

    /// Checks the atoms involving `order[depth]` and earlier elements only.
    fn consistent(&self, depth: usize) -> bool {
        let (a, c) = (self.a, self.c);
        let new = self.order[depth];
        let assigned = &self.order[..=depth];
        let sig = a.signature();
        for (r, (_, arity)) in sig.relations().iter().enumerate() {
            for idx in all_tuples(assigned.len(), *arity) {
                if !idx.contains(&depth) {
                    continue;
                }
                let t: Vec<Elem> = idx.iter().map(|&i| assigned[i]).collect();
                let img: Vec<Elem> = t.iter().map(|&x| self.map[x]).collect();
                if a.holds(r, &t) != c.holds(r, &img) {
                    return false;
                }
            }
        }
        for (f, (_, arity)) in sig.functions().iter().enumerate() {
            for idx in all_tuples(assigned.len(), *arity) {
                let t: Vec<Elem> = idx.iter().map(|&i| assigned[i]).collect();
                let v = a.apply(f, &t);
                if self.pos[v] > depth || !(v == new || idx.contains(&depth)) {
                    continue;
                }
                let img: Vec<Elem> = t.iter().map(|&x| self.map[x]).collect();
                if c.try_apply(f, &img) != Some(self.map[v]) {
                    return false;
                }
            }
        }
        for ci in 0..sig.constants().len() {
            if a.constant(ci) == Some(new) && c.constant(ci) != Some(self.map[new]) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[Elem]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.map);
        }
        let e = self.order[depth];
        for x in 0..self.c.size() {
            if self.used[x] {
                continue;
            }
            if let Some(allowed) = &self.allowed {
                if !allowed[e][x] {
                    continue;
                }
            }
            self.map[e] = x;
            self.used[x] = true;
            let go_on = !self.consistent(depth) || self.run(depth + 1, visit);
            self.used[x] = false;
            self.map[e] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// A bijective embedding of `a` onto `b`, if one exists.
///
/// When both carry a designated linear order only the order-preserving
/// bijection is tried.
pub fn find_isomorphism(a: &FiniteStructure, b: &FiniteStructure) -> Result<Option<Embedding>> {
    same_signature(a, b)?;
    if a.size() != b.size() {
        return Ok(None);
    }
    for r in 0..a.signature().relations().len() {
        if a.relation_len(r) != b.relation_len(r) {
            return Ok(None);
        }
    }
    if let (Some(_), Some(_)) = (a.order_ranks(), b.order_ranks()) {
        let mut map = vec![0; a.size()];
        for (x, y) in a.increasing_elements().into_iter().zip(b.increasing_elements()) {
            map[x] = y;
        }
        return Ok(a.is_embedding(b, &map).then_some(Embedding { map }));
    }
    let (pa, pb) = (profile(a), profile(b));
    let mut search = Search::new(a, b);
    search.allowed = Some((0..a.size()).map(|x| (0..b.size()).map(|y| pa[x] == pb[y]).collect()).collect());
    let mut found = None;
    search.run(0, &mut |m| {
        found = Some(Embedding { map: m.to_vec() });
        false
    });
    Ok(found)
}

/// All embeddings of `a` into `c`, in lexicographic order of the image
/// tuples `(map[0], map[1], ...)`.
pub fn enumerate_embeddings(a: &FiniteStructure, c: &FiniteStructure) -> Result<Vec<Embedding>> {
    same_signature(a, c)?;
    let mut out = Vec::new();
    if a.size() > c.size() {
        return Ok(out);
    }
    let mut search = Search::new(a, c);
    search.run(0, &mut |m| {
        out.push(Embedding { map: m.to_vec() });
        true
    });
    out.sort();
    Ok(out)
}

/// Calls `visit` on each embedding until it returns `false`. The order is
/// unspecified.
pub fn for_each_embedding(
    a: &FiniteStructure,
    c: &FiniteStructure,
    visit: &mut dyn FnMut(&[Elem]) -> bool,
) -> Result<()> {
    same_signature(a, c)?;
    if a.size() <= c.size() {
        Search::new(a, c).run(0, visit);
    }
    Ok(())
}

pub fn embeds(a: &FiniteStructure, c: &FiniteStructure) -> Result<bool> {
    let mut found = false;
    for_each_embedding(a, c, &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// The element sets of all copies of `a` in `c`, each listed increasingly,
/// sorted lexicographically.
pub fn copy_sets(c: &FiniteStructure, a: &FiniteStructure) -> Result<Vec<Vec<Elem>>> {
    let mut sets = BTreeSet::new();
    for_each_embedding(a, c, &mut |m| {
        let mut e = m.to_vec();
        c.sort_increasing(&mut e);
        sets.insert(e);
        true
    })?;
    Ok(sets.into_iter().collect())
}

/// The copies of `a` in `c`, sorted by their increasing element lists.
pub fn enumerate_copies(c: &FiniteStructure, a: &FiniteStructure) -> Result<Vec<Copy>> {
    Ok(copy_sets(c, a)?.into_iter().map(|e| Copy::of(c, e)).collect())
}

/// A canonical representative of the isomorphism type of `s`, together with
/// the relabeling used (`perm[e]` is the new name of `e`). Labels are
/// dropped.
///
/// Ordered structures are relabeled by order rank. Otherwise the
/// representative is the relabeling with the least serialization; that
/// search is factorial and is refused above ten elements.
pub fn canonical_form(s: &FiniteStructure) -> Result<(FiniteStructure, Vec<Elem>)> {
    let bare = s.without_labels();
    if let Some(rank) = s.order_ranks() {
        let perm = rank.to_vec();
        return Ok((bare.relabel(&perm), perm));
    }
    let n = s.size();
    if n > 10 {
        return Err(Error::InvalidArgument(format!("canonical form of an unordered structure with {n} > 10 elements")));
    }
    let mut best: Option<(String, FiniteStructure, Vec<Elem>)> = None;
    for perm in (0..n).permutations(n) {
        let cand = bare.relabel(&perm);
        let text = serialize_structure(&cand);
        if best.as_ref().is_none_or(|b| text < b.0) {
            best = Some((text, cand, perm));
        }
    }
    let (_, c, p) = best.expect("at least one permutation");
    Ok((c, p))
}

/// Canonical representatives of every substructure generated by at most
/// `n` elements, sorted by size and then serialization.
pub fn age_up_to(s: &FiniteStructure, n: usize) -> Result<Vec<FiniteStructure>> {
    let mut seen: BTreeMap<(usize, String), FiniteStructure> = BTreeMap::new();
    let mut closures = BTreeSet::new();
    for k in 0..=n.min(s.size()) {
        for seed in (0..s.size()).combinations(k) {
            let copy = generated_substructure(s, &seed)?;
            if !closures.insert(copy.elements.clone()) {
                continue;
            }
            let (canon, _) = canonical_form(&copy.pattern)?;
            seen.entry((canon.size(), serialize_structure(&canon))).or_insert(canon);
        }
    }
    Ok(seen.into_values().collect())
}
