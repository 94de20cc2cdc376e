//! Indexed families of parameters and their behaviour across index types:
//! Δ-types, patterns common to all realizations of an index type,
//! indiscernibility, the implications expressing it, and local basedness.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{CompiledFormula, QfFormula};
use crate::structure::{all_tuples, Elem, FiniteStructure};
use crate::types::{qf_type, QfType};

/// Parameters `a_i` in `target` indexed by the elements `i` of `index`.
#[derive(Debug, Clone)]
pub struct IndexedFamily {
    pub index: FiniteStructure,
    pub target: FiniteStructure,
    pub assign: Vec<Vec<Elem>>,
}

impl IndexedFamily {
    pub fn new(index: FiniteStructure, target: FiniteStructure, assign: Vec<Vec<Elem>>) -> Result<IndexedFamily> {
        if assign.len() != index.size() {
            return Err(Error::InvalidArgument(format!(
                "family has {} entries for an index of size {}",
                assign.len(),
                index.size()
            )));
        }
        if assign.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(Error::LengthMismatch);
        }
        if let Some(&x) = assign.iter().flatten().find(|&&x| x >= target.size()) {
            return Err(Error::OutOfUniverse(x));
        }
        Ok(IndexedFamily { index, target, assign })
    }

    /// `a_i = i` over the same universe.
    pub fn identity(index: FiniteStructure, target: FiniteStructure) -> Result<IndexedFamily> {
        let assign = (0..index.size()).map(|i| vec![i]).collect();
        IndexedFamily::new(index, target, assign)
    }

    /// Length of each parameter tuple.
    pub fn width(&self) -> usize {
        self.assign.first().map_or(0, Vec::len)
    }

    /// Concatenation of the parameter tuples of `tuple`.
    pub fn params(&self, tuple: &[Elem]) -> Vec<Elem> {
        tuple.iter().flat_map(|&i| self.assign[i].iter().copied()).collect()
    }

    /// Whether distinct indices carry distinct parameters.
    pub fn is_nontrivial(&self) -> bool {
        let mut seen = HashSet::new();
        self.assign.iter().all(|a| seen.insert(a))
    }
}

/// A list of formulas compiled against the target signature.
#[derive(Debug, Clone)]
pub struct Delta {
    pub formulas: Vec<QfFormula>,
    compiled: Vec<CompiledFormula>,
}

impl Delta {
    pub fn new(formulas: Vec<QfFormula>, target: &FiniteStructure) -> Result<Delta> {
        let compiled = formulas.iter().map(|f| f.compile(target.signature())).collect::<Result<_>>()?;
        Ok(Delta { formulas, compiled })
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Indices of the formulas applying to index tuples of length `n` when
    /// every index carries `width` parameters.
    pub fn applicable(&self, n: usize, width: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.formulas[i].arity == n * width).collect()
    }

    pub fn compiled(&self, i: usize) -> &CompiledFormula {
        &self.compiled[i]
    }
}

/// Truth values of every formula of `delta` at `tuple`.
pub fn delta_type(m: &FiniteStructure, tuple: &[Elem], delta: &Delta) -> Result<Vec<bool>> {
    delta.compiled.iter().map(|f| f.eval(m, tuple)).collect()
}

/// Truth values of the applicable formulas (in `applicable` order) at the
/// parameters of an index tuple.
fn bits_at(fam: &IndexedFamily, delta: &Delta, applicable: &[usize], tuple: &[Elem]) -> Vec<bool> {
    let p = fam.params(tuple);
    applicable.iter().map(|&i| delta.compiled[i].eval_unchecked(&fam.target, &p)).collect()
}

/// An index type with the realizing tuples of lengths `1..=max_len`.
#[derive(Debug, Clone)]
pub struct TypeClass {
    pub qf_type: QfType,
    pub tuples: Vec<Vec<Elem>>,
}

/// Groups all index tuples of lengths `1..=max_len` by quantifier-free type,
/// classes ordered by first realization.
pub fn type_classes(index: &FiniteStructure, max_len: usize) -> Result<Vec<TypeClass>> {
    let tuples: Vec<Vec<Elem>> = (1..=max_len).flat_map(|n| all_tuples(index.size(), n)).collect();
    let typed: Vec<(String, QfType)> =
        tuples.par_iter().map(|t| qf_type(index, t).map(|q| (q.key(), q))).collect::<Result<_>>()?;
    let mut slot: BTreeMap<String, usize> = BTreeMap::new();
    let mut classes: Vec<TypeClass> = Vec::new();
    for (t, (key, q)) in tuples.into_iter().zip(typed) {
        let i = *slot.entry(key).or_insert_with(|| {
            classes.push(TypeClass { qf_type: q, tuples: Vec::new() });
            classes.len() - 1
        });
        classes[i].tuples.push(t);
    }
    Ok(classes)
}

/// Per index type, the formulas (with polarity) that hold, or fail, at the
/// parameters of every realization.
#[derive(Debug, Clone)]
pub struct EmPattern {
    pub entries: Vec<(QfType, Vec<(usize, bool)>)>,
}

impl EmPattern {
    pub fn get(&self, q: &QfType) -> Option<&[(usize, bool)]> {
        self.entries.iter().find(|(t, _)| t == q).map(|(_, e)| e.as_slice())
    }
}

pub fn em_pattern(fam: &IndexedFamily, delta: &Delta, max_len: usize) -> Result<EmPattern> {
    let classes = type_classes(&fam.index, max_len)?;
    let entries = classes
        .into_par_iter()
        .map(|c| {
            let app = delta.applicable(c.qf_type.arity(), fam.width());
            let mut all_true = vec![true; app.len()];
            let mut all_false = vec![true; app.len()];
            for t in &c.tuples {
                for (j, b) in bits_at(fam, delta, &app, t).into_iter().enumerate() {
                    all_true[j] &= b;
                    all_false[j] &= !b;
                }
            }
            let mut e = Vec::new();
            for (j, &i) in app.iter().enumerate() {
                if all_true[j] {
                    e.push((i, true));
                }
                if all_false[j] {
                    e.push((i, false));
                }
            }
            (c.qf_type, e)
        })
        .collect();
    Ok(EmPattern { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndiscernibilityReport {
    pub indiscernible: bool,
    /// Two index tuples of the same type whose parameters differ on Δ.
    pub witness: Option<(Vec<Elem>, Vec<Elem>)>,
    /// Distinct indices carry distinct parameters.
    pub nontrivial: bool,
}

pub fn is_indiscernible(fam: &IndexedFamily, delta: &Delta, max_len: usize) -> Result<IndiscernibilityReport> {
    let classes = type_classes(&fam.index, max_len)?;
    let witnesses: Vec<Option<(Vec<Elem>, Vec<Elem>)>> = classes
        .par_iter()
        .map(|c| {
            let app = delta.applicable(c.qf_type.arity(), fam.width());
            let first = &c.tuples[0];
            let want = bits_at(fam, delta, &app, first);
            c.tuples[1..].iter().find(|t| bits_at(fam, delta, &app, t) != want).map(|t| (first.clone(), t.clone()))
        })
        .collect();
    let witness = witnesses.into_iter().flatten().next();
    Ok(IndiscernibilityReport { indiscernible: witness.is_none(), witness, nontrivial: fam.is_nontrivial() })
}

/// `formula(a_from) -> formula(a_to)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Implication {
    pub formula: usize,
    pub from: Vec<Elem>,
    pub to: Vec<Elem>,
}

impl Implication {
    pub fn holds(&self, fam: &IndexedFamily, delta: &Delta) -> bool {
        let f = &delta.compiled[self.formula];
        !f.eval_unchecked(&fam.target, &fam.params(&self.from)) || f.eval_unchecked(&fam.target, &fam.params(&self.to))
    }
}

/// Implications whose joint truth says the family is indiscernible for
/// index tuples up to `max_len`: within each index type the realizations are
/// linked in a cycle for every applicable formula.
pub fn ind_fragment(index: &FiniteStructure, delta: &Delta, width: usize, max_len: usize) -> Result<Vec<Implication>> {
    let mut out = Vec::new();
    for c in type_classes(index, max_len)? {
        if c.tuples.len() < 2 {
            continue;
        }
        for i in delta.applicable(c.qf_type.arity(), width) {
            for (j, from) in c.tuples.iter().enumerate() {
                let to = &c.tuples[(j + 1) % c.tuples.len()];
                out.push(Implication { formula: i, from: from.clone(), to: to.clone() });
            }
        }
    }
    Ok(out)
}

/// Whether every tuple of `fam_e`'s index (length up to `max_len`) is
/// matched by a tuple of `fam_a`'s index of the same quantifier-free type
/// whose parameters agree on Δ. Returns the first unmatched tuple.
pub fn locally_based_check(
    fam_e: &IndexedFamily,
    fam_a: &IndexedFamily,
    delta: &Delta,
    max_len: usize,
) -> Result<Option<Vec<Elem>>> {
    if fam_e.index.signature() != fam_a.index.signature() {
        return Err(Error::SignatureMismatch);
    }
    if fam_e.width() != fam_a.width() {
        return Err(Error::LengthMismatch);
    }
    let mut available: HashSet<(String, Vec<bool>)> = HashSet::new();
    for c in type_classes(&fam_a.index, max_len)? {
        let app = delta.applicable(c.qf_type.arity(), fam_a.width());
        let key = c.qf_type.key();
        for t in &c.tuples {
            available.insert((key.clone(), bits_at(fam_a, delta, &app, t)));
        }
    }
    for c in type_classes(&fam_e.index, max_len)? {
        let app = delta.applicable(c.qf_type.arity(), fam_e.width());
        let key = c.qf_type.key();
        for t in &c.tuples {
            if !available.contains(&(key.clone(), bits_at(fam_e, delta, &app, t))) {
                return Ok(Some(t.clone()));
            }
        }
    }
    Ok(None)
}
