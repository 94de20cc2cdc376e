//! Moving between trees with level predicates and trees with only the
//! prefix and lexicographic orders: the level expansion of a tree, filling a
//! tree out to uniform height, and carving the original back out.

use std::collections::HashMap;
use std::sync::Arc;

use crate::amalgam::kt_membership;
use crate::closure::Copy;
use crate::error::{Error, Result};
use crate::iso::{copy_sets, find_isomorphism};
use crate::ramsey::Coloring;
use crate::signature::Signature;
use crate::structure::{Elem, FiniteStructure};
use crate::tree::{build_tree, level_predicate, Dialect, TreeNode, TreeStructure, LEX, MEET, PREFIX};

fn prefix_index(s: &FiniteStructure) -> Result<usize> {
    s.signature().relation_index(PREFIX).ok_or_else(|| Error::NotATree(format!("no `{PREFIX}` relation")))
}

/// Number of strict prefix-predecessors of every element.
pub fn heights(s: &FiniteStructure) -> Result<Vec<usize>> {
    let p = prefix_index(s)?;
    Ok(s.elements().map(|y| s.elements().filter(|&x| x != y && s.holds(p, &[x, y])).count()).collect())
}

/// Elements with no strict prefix-successor.
pub fn maximal_elements(s: &FiniteStructure) -> Result<Vec<Elem>> {
    let p = prefix_index(s)?;
    Ok(s.elements().filter(|&x| !s.elements().any(|y| y != x && s.holds(p, &[x, y]))).collect())
}

/// Expands a structure in the prefix/lex language by the meet of the prefix
/// order and by level predicates `P0..Pm` read off the heights.
pub fn expand_to_ls(d: &FiniteStructure, m: usize) -> Result<FiniteStructure> {
    let p = prefix_index(d)?;
    let lex = d.signature().relation_index(LEX).ok_or_else(|| Error::NotATree(format!("no `{LEX}` relation")))?;
    let ht = heights(d)?;
    if let Some(&h) = ht.iter().find(|&&h| h > m) {
        return Err(Error::LevelExceedsM { level: h, m });
    }
    let sig = Arc::new(Dialect::Ls.signature(m));
    let n = d.size();
    let mut b = FiniteStructure::builder(Arc::clone(&sig), n);
    for x in 0..n {
        for y in 0..n {
            if d.holds(p, &[x, y]) {
                b.relation(PREFIX, &[x, y])?;
            }
            if d.holds(lex, &[x, y]) {
                b.relation(LEX, &[x, y])?;
            }
            let lower: Vec<Elem> = (0..n).filter(|&z| d.holds(p, &[z, x]) && d.holds(p, &[z, y])).collect();
            let top = lower
                .iter()
                .copied()
                .find(|&z| lower.iter().all(|&w| d.holds(p, &[w, z])))
                .ok_or(Error::MeetNotClosed)?;
            b.function(MEET, &[x, y], top)?;
        }
    }
    for (x, &h) in ht.iter().enumerate() {
        b.relation(&level_predicate(h), &[x])?;
    }
    if let Some(l) = d.labels() {
        b.labels(l.to_vec());
    }
    Ok(b.build())
}

/// Whether `t` (in the prefix/lex language) has height exactly `m`, with
/// every maximal node at height `m`.
pub fn in_kmu(t: &FiniteStructure, m: usize) -> bool {
    if !kt_membership(t) {
        return false;
    }
    let (Ok(ht), Ok(max)) = (heights(t), maximal_elements(t)) else { return false };
    !max.is_empty() && max.iter().all(|&x| ht[x] == m)
}

/// Output of [`fill_m`].
#[derive(Debug, Clone)]
pub struct Filled {
    /// Least branching of a full tree of height `m` holding a copy.
    pub k: u32,
    /// `k^{<=m}` with level predicates.
    pub host: TreeStructure,
    /// The lexicographically least copy of the input in `host`.
    pub copy: Copy,
    /// One node of height `m` above each maximal node of the copy.
    pub y: Vec<TreeNode>,
    /// The downward closure of `y`, in the prefix/lex language.
    pub filled: TreeStructure,
    /// The nodes of the copy.
    pub marks: Vec<TreeNode>,
}

impl Filled {
    /// The marks as elements of `filled`.
    pub fn mark_elements(&self) -> Vec<Elem> {
        self.marks.iter().map(|n| self.filled.element(n).expect("marks lie in the filled tree")).collect()
    }
}

/// Highest level predicate holding somewhere in `d`, if any.
fn top_level(d: &FiniteStructure) -> Option<usize> {
    let sig = d.signature();
    sig.relations()
        .iter()
        .enumerate()
        .filter_map(|(r, (name, arity))| {
            let n: usize = name.strip_prefix('P')?.parse().ok()?;
            (*arity == 1 && d.relation_len(r) > 0).then_some(n)
        })
        .max()
}

/// Fills a tree with level predicates out to a tree of uniform height `m`.
///
/// The copy of `d` is taken in the least `k^{<=m}` that has one, and is the
/// lexicographically least there; each maximal node `x` of the copy is
/// extended to `x` followed by zeros up to length `m`.
pub fn fill_m(d: &FiniteStructure, m: usize) -> Result<Filled> {
    if let Some(level) = top_level(d) {
        if level > m {
            return Err(Error::LevelExceedsM { level, m });
        }
    }
    let d = d.without_labels().conform_to(Dialect::Ls.signature(m))?;
    let max_k = d.size().max(1) as u32;
    for k in 1..=max_k {
        let host = build_tree(k, m, Dialect::Ls);
        let host_s = host.structure().without_labels();
        let Some(first) = copy_sets(&host_s, &d)?.into_iter().next() else { continue };
        let copy = Copy::of(host.structure(), first);
        let marks: Vec<TreeNode> = copy.elements.iter().map(|&e| host.node(e).clone()).collect();
        let tips = maximal_elements(&copy.pattern)?;
        let y: Vec<TreeNode> = tips
            .iter()
            .map(|&i| {
                let x = &marks[i];
                x.extended(&vec![0; m - x.level()])
            })
            .collect();
        let mut closure: Vec<TreeNode> = Vec::new();
        for top in &y {
            for l in 0..=top.level() {
                closure.push(TreeNode(top.0[..l].to_vec()));
            }
        }
        let filled = TreeStructure::from_nodes(closure, Dialect::Lt)?;
        return Ok(Filled { k, host, copy, y, filled, marks });
    }
    Err(Error::NotInAge { m })
}

/// The substructure of the level expansion of `dt` on `marks`.
pub fn extract_s(dt: &FiniteStructure, marks: &[Elem], m: usize) -> Result<FiniteStructure> {
    let exp = expand_to_ls(dt, m)?;
    let mut elements = marks.to_vec();
    exp.sort_increasing(&mut elements);
    for &x in &elements {
        for &y in &elements {
            if !elements.contains(&exp.apply(0, &[x, y])) {
                return Err(Error::MeetNotClosed);
            }
        }
    }
    Ok(exp.induced(&elements))
}

/// Carries the marks of `filled` over to an isomorphic copy `target`.
pub fn transport_marks(filled: &FiniteStructure, marks: &[Elem], target: &FiniteStructure) -> Result<Vec<Elem>> {
    let iso = find_isomorphism(&filled.without_labels(), &target.without_labels())?.ok_or(Error::SignatureMismatch)?;
    let mut out: Vec<Elem> = marks.iter().map(|&x| iso.map[x]).collect();
    target.sort_increasing(&mut out);
    Ok(out)
}

/// Turns a coloring of the copies of `a` in the level expansion of `ct`
/// into a coloring of the copies of `fill_m(a)` in `ct`: a copy is colored
/// like the copy of `a` its marks carve out.
pub fn transport_coloring(ct: &FiniteStructure, a_filled: &Filled, coloring: &Coloring) -> Result<Coloring> {
    let pattern = a_filled.filled.structure().without_labels();
    let marks = a_filled.mark_elements();
    let host = ct.without_labels();
    let lookup: HashMap<&[Elem], usize> = coloring.lookup();
    let copies = copy_sets(&host, &pattern)?;
    let mut colors = Vec::with_capacity(copies.len());
    for set in &copies {
        let sub = host.induced(set);
        let carved: Vec<Elem> = transport_marks(&pattern, &marks, &sub)?.into_iter().map(|i| set[i]).collect();
        let c = lookup
            .get(carved.as_slice())
            .copied()
            .ok_or_else(|| Error::InvalidArgument("carved copy is not colored".into()))?;
        colors.push(c);
    }
    Ok(Coloring { k: coloring.k, copies, colors })
}

/// The signature of the prefix/lex language.
pub fn lt_signature() -> Signature {
    Dialect::Lt.signature(0)
}
