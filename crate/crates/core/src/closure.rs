//! Generated substructures and the closure operator.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::formula::Term;
use crate::structure::{all_tuples, Elem, FiniteStructure};

/// A substructure of some host: its elements, listed increasingly, and the
/// induced structure (element `i` of `pattern` is `elements[i]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Copy {
    pub elements: Vec<Elem>,
    pub pattern: FiniteStructure,
}

impl Copy {
    pub fn of(host: &FiniteStructure, mut elements: Vec<Elem>) -> Copy {
        host.sort_increasing(&mut elements);
        let pattern = host.induced(&elements);
        Copy { elements, pattern }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elements.contains(&e)
    }
}

/// The closure of a seed together with a defining term for every element,
/// in order of discovery.
#[derive(Debug, Clone)]
pub struct Generated {
    pub elements: Vec<Elem>,
    pub terms: Vec<Term>,
}

impl Generated {
    pub fn term_of(&self, e: Elem) -> Option<&Term> {
        self.elements.iter().position(|&x| x == e).map(|i| &self.terms[i])
    }
}

/// Computes the closure of `seed` under the functions and constants of `s`,
/// naming each element by the first term that reaches it.
///
/// Seed entries are named by their variables (the first occurrence wins),
/// constants by themselves, and every later element by an application whose
/// arguments were all found in earlier rounds or the current one. Rounds
/// only look at argument tuples touching the previous round's new elements.
pub fn generate(s: &FiniteStructure, seed: &[Elem]) -> Result<Generated> {
    if let Some(&x) = seed.iter().find(|&&x| x >= s.size()) {
        return Err(Error::OutOfUniverse(x));
    }
    let sig = s.signature();
    let mut index: HashMap<Elem, usize> = HashMap::new();
    let mut out = Generated { elements: Vec::new(), terms: Vec::new() };
    fn push(index: &mut HashMap<Elem, usize>, out: &mut Generated, e: Elem, t: Term) {
        if let std::collections::hash_map::Entry::Vacant(v) = index.entry(e) {
            v.insert(out.elements.len());
            out.elements.push(e);
            out.terms.push(t);
        }
    }
    for (i, &e) in seed.iter().enumerate() {
        push(&mut index, &mut out, e, Term::Var(i));
    }
    for (c, name) in sig.constants().iter().enumerate() {
        if let Some(v) = s.constant(c) {
            push(&mut index, &mut out, v, Term::Const(name.clone()));
        }
    }
    let mut frontier_start = 0;
    loop {
        let known = out.elements.len();
        if frontier_start == known {
            break;
        }
        for (f, (name, arity)) in sig.functions().iter().enumerate() {
            for idx in all_tuples(known, *arity) {
                if idx.iter().all(|&i| i < frontier_start) {
                    continue;
                }
                let args: Vec<Elem> = idx.iter().map(|&i| out.elements[i]).collect();
                let v = s.apply(f, &args);
                if !index.contains_key(&v) {
                    let t = Term::App(name.clone(), idx.iter().map(|&i| out.terms[i].clone()).collect());
                    push(&mut index, &mut out, v, t);
                }
            }
        }
        frontier_start = known;
    }
    Ok(out)
}

/// The substructure generated by `seed`.
pub fn generated_substructure(s: &FiniteStructure, seed: &[Elem]) -> Result<Copy> {
    let g = generate(s, seed)?;
    Ok(Copy::of(s, g.elements))
}

/// Increasing enumeration of the substructure generated by an increasing
/// tuple.
pub fn cl(s: &FiniteStructure, a: &[Elem]) -> Result<Vec<Elem>> {
    if let Some(&x) = a.iter().find(|&&x| x >= s.size()) {
        return Err(Error::OutOfUniverse(x));
    }
    if !s.is_increasing(a)? {
        return Err(Error::NotIncreasing);
    }
    Ok(generated_substructure(s, a)?.elements)
}

/// The closure of a set of elements. Works with or without a designated
/// order.
pub fn closure_set(s: &FiniteStructure, a: &BTreeSet<Elem>) -> Result<BTreeSet<Elem>> {
    let seed: Vec<Elem> = a.iter().copied().collect();
    Ok(generate(s, &seed)?.elements.into_iter().collect())
}
