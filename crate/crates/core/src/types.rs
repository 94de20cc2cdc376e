//! Complete quantifier-free types and the formulas isolating them.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;

use crate::closure::generate;
use crate::error::{Error, Result};
use crate::format::serialize_structure;
use crate::formula::{Formula, QfFormula, Term};
use crate::structure::{all_tuples, Elem, FiniteStructure};

/// The quantifier-free type of a tuple, as the canonical copy of the
/// substructure it generates together with the positions of the tuple's
/// entries in that copy.
///
/// For ordered structures the canonical copy numbers elements by order
/// rank, so `positions` index the increasing enumeration of the closure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QfType {
    pub canonical: FiniteStructure,
    pub positions: Vec<usize>,
}

impl QfType {
    /// Number of variables.
    pub fn arity(&self) -> usize {
        self.positions.len()
    }

    /// Size of the generated substructure.
    pub fn closure_size(&self) -> usize {
        self.canonical.size()
    }

    /// A string that determines the type; equal keys iff equal types.
    pub fn key(&self) -> String {
        format!("{}positions {}\n", serialize_structure(&self.canonical), self.positions.iter().join(" "))
    }
}

impl fmt::Display for QfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.canonical.signature();
        let mut parts = Vec::new();
        for (r, (name, _)) in sig.relations().iter().enumerate() {
            let tuples = self.canonical.relation_tuples(r).map(|t| t.iter().join(",")).join(" ");
            parts.push(format!("{name}[{tuples}]"));
        }
        for (fi, (name, _)) in sig.functions().iter().enumerate() {
            let rows =
                self.canonical.function_entries(fi).map(|(a, v)| format!("{}>{v}", a.iter().join(","))).join(" ");
            parts.push(format!("{name}[{rows}]"));
        }
        for (c, name) in sig.constants().iter().enumerate() {
            if let Some(v) = self.canonical.constant(c) {
                parts.push(format!("{name}={v}"));
            }
        }
        let pos = self.positions.iter().map(|p| (p + 1).to_string()).join(",");
        write!(f, "size {} at ({pos}) {}", self.canonical.size(), parts.join(" "))
    }
}

/// The quantifier-free type of `a` in `s`.
pub fn qf_type(s: &FiniteStructure, a: &[Elem]) -> Result<QfType> {
    let g = generate(s, a)?;
    let mut elements = g.elements;
    s.sort_increasing(&mut elements);
    let sub = s.induced(&elements).without_labels();
    let mut at = vec![usize::MAX; s.size()];
    for (i, &e) in elements.iter().enumerate() {
        at[e] = i;
    }
    let positions: Vec<usize> = a.iter().map(|&x| at[x]).collect();
    if sub.order_ranks().is_some() {
        return Ok(QfType { canonical: sub, positions });
    }
    let n = sub.size();
    if n > 9 {
        return Err(Error::InvalidArgument(format!("type of an unordered closure with {n} > 9 elements")));
    }
    let mut best: Option<(String, Vec<usize>, FiniteStructure)> = None;
    for perm in (0..n).permutations(n) {
        let cand = sub.relabel(&perm);
        let pos: Vec<usize> = positions.iter().map(|&p| perm[p]).collect();
        let text = serialize_structure(&cand);
        let better = match &best {
            None => true,
            Some((t, p, _)) => (&text, &pos) < (t, p),
        };
        if better {
            best = Some((text, pos, cand));
        }
    }
    let (_, positions, canonical) = best.expect("some permutation");
    Ok(QfType { canonical, positions })
}

/// A conjunction of literals satisfied exactly by the tuples of type `q`
/// (in any structure over the same signature).
///
/// Every element of the closure is named by the first term that reaches it
/// while generating the closure from the tuple; the formula then lists the
/// full diagram over those names: every relation atom or its negation,
/// every function value, the constants, distinctness of distinct elements,
/// and the equalities forced by repeated entries.
pub fn isolating_formula(q: &QfType) -> Result<QfFormula> {
    let s = &q.canonical;
    let g = generate(s, &q.positions)?;
    let n = s.size();
    let mut name: Vec<Option<Term>> = vec![None; n];
    for (e, t) in g.elements.iter().zip(&g.terms) {
        name[*e] = Some(t.clone());
    }
    let name: Vec<Term> = name.into_iter().map(|t| t.expect("closure covers the copy")).collect();
    let sig = s.signature();
    let mut lits = Vec::new();

    for (i, &p) in q.positions.iter().enumerate() {
        if name[p] != Term::Var(i) {
            lits.push(Formula::Eq(Term::Var(i), name[p].clone()));
        }
    }
    for (a, b) in g.terms.iter().tuple_combinations() {
        lits.push(Formula::Eq(a.clone(), b.clone()).negate());
    }
    for (c, cname) in sig.constants().iter().enumerate() {
        let v = s.constant(c).ok_or(Error::InvalidStructure(s.validate()))?;
        let t = Term::Const(cname.clone());
        if name[v] != t {
            lits.push(Formula::Eq(t, name[v].clone()));
        }
    }
    for (f, (fname, arity)) in sig.functions().iter().enumerate() {
        for args in all_tuples(n, *arity) {
            let lhs = Term::App(fname.clone(), args.iter().map(|&x| name[x].clone()).collect());
            let v = s.apply(f, &args);
            if lhs != name[v] {
                lits.push(Formula::Eq(lhs, name[v].clone()));
            }
        }
    }
    for (r, (rname, arity)) in sig.relations().iter().enumerate() {
        for t in all_tuples(n, *arity) {
            let atom = Formula::Rel(rname.clone(), t.iter().map(|&x| name[x].clone()).collect());
            lits.push(if s.holds(r, &t) { atom } else { atom.negate() });
        }
    }
    Ok(QfFormula::new(q.arity(), Formula::And(lits)))
}

/// Distinct quantifier-free types of the tuples of `s` with lengths
/// `1..=max_len`, in order of first realization (tuples in lexicographic
/// order, shorter first).
pub fn realized_types(s: &FiniteStructure, max_len: usize) -> Result<Vec<QfType>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for len in 1..=max_len {
        for t in all_tuples(s.size(), len) {
            let q = qf_type(s, &t)?;
            if seen.insert(q.key()) {
                out.push(q);
            }
        }
    }
    Ok(out)
}
