//! Finite structures over a [`Signature`].
//!
//! The universe of a structure with `n` elements is always `0..n`. Relations
//! are stored as sorted tuple sets, functions as total tables. Both are
//! mirrored into dense lookup arrays when the table fits, so membership and
//! application are constant time in the search loops.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signature::Signature;

/// An element of a universe `0..n`.
pub type Elem = usize;

const DENSE_LIMIT: usize = 1 << 24;
const UNDEFINED: u32 = u32::MAX;

fn dense_len(size: usize, arity: usize) -> Option<usize> {
    let mut len: usize = 1;
    for _ in 0..arity {
        len = len.checked_mul(size)?;
        if len > DENSE_LIMIT {
            return None;
        }
    }
    Some(len)
}

fn dense_index(size: usize, tuple: &[Elem]) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * size + x)
}

#[derive(Debug, Clone)]
struct Relation {
    tuples: BTreeSet<Vec<Elem>>,
    bits: Option<Vec<u64>>,
}

impl Relation {
    fn new(arity: usize, tuples: BTreeSet<Vec<Elem>>, size: usize) -> Relation {
        let in_universe = tuples.iter().all(|t| t.iter().all(|&x| x < size));
        let bits = dense_len(size, arity).filter(|_| in_universe).map(|len| {
            let mut bits = vec![0u64; len.div_ceil(64)];
            for t in &tuples {
                let i = dense_index(size, t);
                bits[i / 64] |= 1 << (i % 64);
            }
            bits
        });
        Relation { tuples, bits }
    }

    fn contains(&self, size: usize, tuple: &[Elem]) -> bool {
        match &self.bits {
            Some(bits) => {
                if tuple.iter().any(|&x| x >= size) {
                    return false;
                }
                let i = dense_index(size, tuple);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            None => self.tuples.contains(tuple),
        }
    }
}

#[derive(Debug, Clone)]
struct Function {
    graph: BTreeMap<Vec<Elem>, Elem>,
    dense: Option<Vec<u32>>,
}

impl Function {
    fn new(arity: usize, graph: BTreeMap<Vec<Elem>, Elem>, size: usize) -> Function {
        let dense = dense_len(size, arity).map(|len| {
            let mut table = vec![UNDEFINED; len];
            for (args, &v) in &graph {
                if args.iter().all(|&x| x < size) && v < size {
                    table[dense_index(size, args)] = v as u32;
                }
            }
            table
        });
        Function { graph, dense }
    }

    fn get(&self, size: usize, args: &[Elem]) -> Option<Elem> {
        match &self.dense {
            Some(table) => {
                if args.iter().any(|&x| x >= size) {
                    return None;
                }
                let v = table[dense_index(size, args)];
                (v != UNDEFINED).then_some(v as Elem)
            }
            None => self.graph.get(args).copied(),
        }
    }
}

/// What is wrong with a structure, as reported by [`FiniteStructure::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// A tuple, function entry or constant mentions an element `>= n`.
    OutOfUniverse,
    /// A function table has no value for this input tuple.
    MissingValue,
    /// A constant is not interpreted.
    MissingConstant,
    /// The designated order relates an element to itself.
    OrderReflexive,
    /// Two distinct elements are not comparable in the designated order.
    OrderNotTotal,
    /// Both `(a, b)` and `(b, a)` are in the designated order.
    OrderNotAntisymmetric,
    /// `(a, b)` and `(b, c)` are in the order but `(a, c)` is not.
    OrderNotTransitive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub symbol: String,
    pub tuple: Vec<Elem>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::OutOfUniverse => "element outside the universe",
            ViolationKind::MissingValue => "function value missing",
            ViolationKind::MissingConstant => "constant not interpreted",
            ViolationKind::OrderReflexive => "order is not irreflexive",
            ViolationKind::OrderNotTotal => "order is not total",
            ViolationKind::OrderNotAntisymmetric => "order is not antisymmetric",
            ViolationKind::OrderNotTransitive => "order is not transitive",
        };
        write!(f, "{} {:?}: {}", self.symbol, self.tuple, what)
    }
}

/// A finite first-order structure. Immutable once built.
#[derive(Debug, Clone)]
pub struct FiniteStructure {
    sig: Arc<Signature>,
    size: usize,
    rels: Vec<Relation>,
    funs: Vec<Function>,
    consts: Vec<Option<Elem>>,
    labels: Option<Vec<String>>,
    order_rank: Option<Vec<usize>>,
}

impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.sig == other.sig
            && self.consts == other.consts
            && self.labels == other.labels
            && self.rels.iter().zip(&other.rels).all(|(a, b)| a.tuples == b.tuples)
            && self.funs.iter().zip(&other.funs).all(|(a, b)| a.graph == b.graph)
    }
}

impl Eq for FiniteStructure {}

impl Hash for FiniteStructure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sig.hash(state);
        self.size.hash(state);
        for r in &self.rels {
            r.tuples.hash(state);
        }
        for f in &self.funs {
            f.graph.hash(state);
        }
        self.consts.hash(state);
        self.labels.hash(state);
    }
}

impl FiniteStructure {
    pub fn builder(sig: impl Into<Arc<Signature>>, size: usize) -> StructureBuilder {
        StructureBuilder::new(sig.into(), size)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn shared_signature(&self) -> Arc<Signature> {
        Arc::clone(&self.sig)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    pub fn holds(&self, rel: usize, tuple: &[Elem]) -> bool {
        self.rels[rel].contains(self.size, tuple)
    }

    pub fn holds_named(&self, name: &str, tuple: &[Elem]) -> Result<bool> {
        let rel = self.sig.relation_index(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        Ok(self.holds(rel, tuple))
    }

    /// Value of function `fun` at `args`.
    ///
    /// Panics if the table has no entry there; [`validate`](Self::validate)
    /// rejects such structures.
    pub fn apply(&self, fun: usize, args: &[Elem]) -> Elem {
        self.try_apply(fun, args)
            .unwrap_or_else(|| panic!("function `{}` undefined at {args:?}", self.sig.functions()[fun].0))
    }

    pub fn try_apply(&self, fun: usize, args: &[Elem]) -> Option<Elem> {
        self.funs[fun].get(self.size, args)
    }

    pub fn constant(&self, c: usize) -> Option<Elem> {
        self.consts[c]
    }

    /// Interpretations of all constants, in signature order.
    pub fn constant_values(&self) -> impl Iterator<Item = Elem> + '_ {
        self.consts.iter().filter_map(|c| *c)
    }

    pub fn relation_tuples(&self, rel: usize) -> impl Iterator<Item = &[Elem]> + '_ {
        self.rels[rel].tuples.iter().map(Vec::as_slice)
    }

    pub fn relation_len(&self, rel: usize) -> usize {
        self.rels[rel].tuples.len()
    }

    pub fn function_entries(&self, fun: usize) -> impl Iterator<Item = (&[Elem], Elem)> + '_ {
        self.funs[fun].graph.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `e`, or its number when the structure carries no labels.
    pub fn label(&self, e: Elem) -> String {
        match &self.labels {
            Some(l) => l[e].clone(),
            None => e.to_string(),
        }
    }

    pub fn element_by_label(&self, label: &str) -> Option<Elem> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == label),
            None => label.parse().ok().filter(|&e| e < self.size),
        }
    }

    pub fn without_labels(&self) -> FiniteStructure {
        FiniteStructure { labels: None, ..self.clone() }
    }

    pub fn with_labels(&self, labels: Vec<String>) -> FiniteStructure {
        assert_eq!(labels.len(), self.size);
        FiniteStructure { labels: Some(labels), ..self.clone() }
    }

    pub fn is_ordered(&self) -> bool {
        self.sig.order().is_some()
    }

    /// Rank of every element in the designated order, when the order is a
    /// strict linear order.
    pub fn order_ranks(&self) -> Option<&[usize]> {
        self.order_rank.as_deref()
    }

    /// Strict comparison in the designated order.
    pub fn less(&self, a: Elem, b: Elem) -> Option<bool> {
        self.sig.order().map(|o| self.holds(o, &[a, b]))
    }

    /// The universe listed in increasing order (element order when the
    /// structure has no designated order).
    pub fn increasing_elements(&self) -> Vec<Elem> {
        let mut v: Vec<Elem> = self.elements().collect();
        if let Some(rank) = &self.order_rank {
            v.sort_by_key(|&e| rank[e]);
        }
        v
    }

    /// Sorts a set of elements increasingly (by the designated order, or by
    /// number when there is none) and removes duplicates.
    pub fn sort_increasing(&self, elements: &mut Vec<Elem>) {
        match &self.order_rank {
            Some(rank) => elements.sort_by_key(|&e| rank[e]),
            None => elements.sort_unstable(),
        }
        elements.dedup();
    }

    pub fn is_increasing(&self, tuple: &[Elem]) -> Result<bool> {
        let rank = self.order_rank.as_ref().ok_or(Error::NoOrder)?;
        Ok(tuple.windows(2).all(|w| rank[w[0]] < rank[w[1]]))
    }

    /// Every way this structure fails its invariants. Empty iff valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.size;
        for (r, (name, _)) in self.rels.iter().zip(self.sig.relations()) {
            for t in &r.tuples {
                if t.iter().any(|&x| x >= n) {
                    out.push(violation(name, t.clone(), ViolationKind::OutOfUniverse));
                }
            }
        }
        for (f, (name, arity)) in self.funs.iter().zip(self.sig.functions()) {
            for (args, &v) in &f.graph {
                if args.iter().any(|&x| x >= n) || v >= n {
                    let mut t = args.clone();
                    t.push(v);
                    out.push(violation(name, t, ViolationKind::OutOfUniverse));
                }
            }
            for args in all_tuples(n, *arity) {
                if f.get(n, &args).is_none() {
                    out.push(violation(name, args, ViolationKind::MissingValue));
                }
            }
        }
        for (c, name) in self.consts.iter().zip(self.sig.constants()) {
            match c {
                None => out.push(violation(name, vec![], ViolationKind::MissingConstant)),
                Some(v) if *v >= n => out.push(violation(name, vec![*v], ViolationKind::OutOfUniverse)),
                _ => {}
            }
        }
        if let Some(o) = self.sig.order() {
            let name = &self.sig.relations()[o].0;
            let lt = |a: Elem, b: Elem| self.holds(o, &[a, b]);
            for a in 0..n {
                if lt(a, a) {
                    out.push(violation(name, vec![a, a], ViolationKind::OrderReflexive));
                }
                for b in a + 1..n {
                    match (lt(a, b), lt(b, a)) {
                        (false, false) => out.push(violation(name, vec![a, b], ViolationKind::OrderNotTotal)),
                        (true, true) => out.push(violation(name, vec![a, b], ViolationKind::OrderNotAntisymmetric)),
                        _ => {}
                    }
                }
            }
            if out.iter().all(|v| v.symbol != *name) {
                'outer: for a in 0..n {
                    for b in 0..n {
                        if !lt(a, b) {
                            continue;
                        }
                        for c in 0..n {
                            if lt(b, c) && !lt(a, c) {
                                out.push(violation(name, vec![a, b, c], ViolationKind::OrderNotTransitive));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Returns `self` if valid, otherwise the violations as an error.
    pub fn checked(self) -> Result<FiniteStructure> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidStructure(v))
        }
    }

    /// The substructure on `elements`, which must be closed under the
    /// functions and contain the constants. Element `i` of the result is
    /// `elements[i]`.
    pub fn induced(&self, elements: &[Elem]) -> FiniteStructure {
        let mut back = vec![usize::MAX; self.size];
        for (i, &e) in elements.iter().enumerate() {
            back[e] = i;
        }
        let m = elements.len();
        let mut b = FiniteStructure::builder(Arc::clone(&self.sig), m);
        for (r, (_, arity)) in self.sig.relations().iter().enumerate() {
            for t in all_tuples(m, *arity) {
                let image: Vec<Elem> = t.iter().map(|&i| elements[i]).collect();
                if self.holds(r, &image) {
                    b.rels[r].insert(t);
                }
            }
        }
        for (f, (_, arity)) in self.sig.functions().iter().enumerate() {
            for t in all_tuples(m, *arity) {
                let image: Vec<Elem> = t.iter().map(|&i| elements[i]).collect();
                if let Some(v) = self.try_apply(f, &image) {
                    if back[v] != usize::MAX {
                        b.funs[f].insert(t, back[v]);
                    }
                }
            }
        }
        for (c, v) in self.consts.iter().enumerate() {
            b.consts[c] = v.and_then(|v| (back[v] != usize::MAX).then_some(back[v]));
        }
        if let Some(l) = &self.labels {
            b.labels = Some(elements.iter().map(|&e| l[e].clone()).collect());
        }
        b.build()
    }

    /// Renames every element `e` to `perm[e]`; `perm` must be a permutation.
    pub fn relabel(&self, perm: &[Elem]) -> FiniteStructure {
        let n = self.size;
        let mut b = FiniteStructure::builder(Arc::clone(&self.sig), n);
        for (r, rel) in self.rels.iter().enumerate() {
            for t in &rel.tuples {
                b.rels[r].insert(t.iter().map(|&x| perm[x]).collect());
            }
        }
        for (f, fun) in self.funs.iter().enumerate() {
            for (args, &v) in &fun.graph {
                b.funs[f].insert(args.iter().map(|&x| perm[x]).collect(), perm[v]);
            }
        }
        for (c, v) in self.consts.iter().enumerate() {
            b.consts[c] = v.map(|v| perm[v]);
        }
        if let Some(l) = &self.labels {
            let mut nl = vec![String::new(); n];
            for (e, s) in l.iter().enumerate() {
                nl[perm[e]] = s.clone();
            }
            b.labels = Some(nl);
        }
        b.build()
    }

    /// Forgets every symbol not in `sig`, which must be a subsignature.
    pub fn reduct(&self, sig: impl Into<Arc<Signature>>) -> Result<FiniteStructure> {
        let sig = sig.into();
        if !sig.is_subsignature_of(&self.sig) {
            return Err(Error::SignatureMismatch);
        }
        self.transfer(sig, false)
    }

    /// Reinterprets this structure over a larger signature in which the
    /// extra symbols are relations, interpreted as empty.
    pub fn expand_empty(&self, sig: impl Into<Arc<Signature>>) -> Result<FiniteStructure> {
        let sig = sig.into();
        if !self.sig.is_subsignature_of(&sig)
            || sig.functions().len() != self.sig.functions().len()
            || sig.constants().len() != self.sig.constants().len()
        {
            return Err(Error::SignatureMismatch);
        }
        self.transfer(sig, true)
    }

    /// Moves to `sig`; relations missing from `self` are left empty when
    /// `fill_empty` is set, and are an error otherwise.
    fn transfer(&self, sig: Arc<Signature>, fill_empty: bool) -> Result<FiniteStructure> {
        let mut b = FiniteStructure::builder(Arc::clone(&sig), self.size);
        for (r, (name, _)) in sig.relations().iter().enumerate() {
            match self.sig.relation_index(name) {
                Some(old) => b.rels[r] = self.rels[old].tuples.clone(),
                None if fill_empty => {}
                None => return Err(Error::SignatureMismatch),
            }
        }
        for (f, (name, _)) in sig.functions().iter().enumerate() {
            let old = self.sig.function_index(name).ok_or(Error::SignatureMismatch)?;
            b.funs[f] = self.funs[old].graph.clone();
        }
        for (c, name) in sig.constants().iter().enumerate() {
            let old = self.sig.constant_index(name).ok_or(Error::SignatureMismatch)?;
            b.consts[c] = self.consts[old];
        }
        b.labels = self.labels.clone();
        Ok(b.build())
    }

    /// Drops relations of `self` that are absent from `sig` provided they are
    /// empty, then adds `sig`'s missing relations as empty ones.
    pub fn conform_to(&self, sig: impl Into<Arc<Signature>>) -> Result<FiniteStructure> {
        let sig = sig.into();
        for (r, (name, _)) in self.sig.relations().iter().enumerate() {
            if sig.relation_index(name).is_none() && !self.rels[r].tuples.is_empty() {
                return Err(Error::SignatureMismatch);
            }
        }
        if sig.functions() != self.sig.functions() || sig.constants() != self.sig.constants() {
            return Err(Error::SignatureMismatch);
        }
        for (name, arity) in sig.relations() {
            if let Some(i) = self.sig.relation_index(name) {
                if self.sig.relations()[i].1 != *arity {
                    return Err(Error::SignatureMismatch);
                }
            }
        }
        self.transfer(sig, true)
    }

    /// Whether `map` (indexed by elements of `self`) is an embedding into
    /// `target`: injective, preserving and reflecting every relation,
    /// commuting with functions and constants.
    pub fn is_embedding(&self, target: &FiniteStructure, map: &[Elem]) -> bool {
        if self.sig != target.sig || map.len() != self.size {
            return false;
        }
        if map.iter().any(|&x| x >= target.size) {
            return false;
        }
        let mut seen = BTreeSet::new();
        if !map.iter().all(|x| seen.insert(*x)) {
            return false;
        }
        for (r, (_, arity)) in self.sig.relations().iter().enumerate() {
            for t in all_tuples(self.size, *arity) {
                let image: Vec<Elem> = t.iter().map(|&x| map[x]).collect();
                if self.holds(r, &t) != target.holds(r, &image) {
                    return false;
                }
            }
        }
        for (f, (_, arity)) in self.sig.functions().iter().enumerate() {
            for t in all_tuples(self.size, *arity) {
                let image: Vec<Elem> = t.iter().map(|&x| map[x]).collect();
                match (self.try_apply(f, &t), target.try_apply(f, &image)) {
                    (Some(v), Some(w)) if map[v] == w => {}
                    _ => return false,
                }
            }
        }
        self.consts.iter().zip(&target.consts).all(|(a, b)| matches!((a, b), (Some(a), Some(b)) if map[*a] == *b))
    }
}

fn violation(symbol: &str, tuple: Vec<Elem>, kind: ViolationKind) -> Violation {
    Violation { symbol: symbol.to_string(), tuple, kind }
}

/// All `arity`-tuples over `0..n` in lexicographic order.
pub fn all_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = if n == 0 && arity > 0 { 0 } else { n.pow(arity as u32) };
    (0..total).map(move |mut i| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = i % n.max(1);
            i /= n.max(1);
        }
        t
    })
}

/// Incrementally assembles a [`FiniteStructure`].
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    sig: Arc<Signature>,
    size: usize,
    rels: Vec<BTreeSet<Vec<Elem>>>,
    funs: Vec<BTreeMap<Vec<Elem>, Elem>>,
    consts: Vec<Option<Elem>>,
    labels: Option<Vec<String>>,
}

impl StructureBuilder {
    fn new(sig: Arc<Signature>, size: usize) -> StructureBuilder {
        StructureBuilder {
            rels: vec![BTreeSet::new(); sig.relations().len()],
            funs: vec![BTreeMap::new(); sig.functions().len()],
            consts: vec![None; sig.constants().len()],
            labels: None,
            size,
            sig,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&mut self, name: &str, tuple: &[Elem]) -> Result<&mut Self> {
        let r = self.sig.relation_index(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        self.relation_at(r, tuple)
    }

    pub fn relation_at(&mut self, rel: usize, tuple: &[Elem]) -> Result<&mut Self> {
        let arity = self.sig.relations()[rel].1;
        if tuple.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, found: tuple.len() });
        }
        self.rels[rel].insert(tuple.to_vec());
        Ok(self)
    }

    pub fn function(&mut self, name: &str, args: &[Elem], value: Elem) -> Result<&mut Self> {
        let f = self.sig.function_index(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        self.function_at(f, args, value)
    }

    pub fn function_at(&mut self, fun: usize, args: &[Elem], value: Elem) -> Result<&mut Self> {
        let arity = self.sig.functions()[fun].1;
        if args.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, found: args.len() });
        }
        self.funs[fun].insert(args.to_vec(), value);
        Ok(self)
    }

    pub fn constant(&mut self, name: &str, value: Elem) -> Result<&mut Self> {
        let c = self.sig.constant_index(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        self.consts[c] = Some(value);
        Ok(self)
    }

    pub fn labels(&mut self, labels: Vec<String>) -> &mut Self {
        self.labels = Some(labels);
        self
    }

    /// Builds without checking; see [`FiniteStructure::validate`].
    pub fn build(self) -> FiniteStructure {
        let size = self.size;
        let rels: Vec<Relation> =
            self.rels.into_iter().zip(self.sig.relations()).map(|(t, (_, a))| Relation::new(*a, t, size)).collect();
        let funs =
            self.funs.into_iter().zip(self.sig.functions()).map(|(g, (_, a))| Function::new(*a, g, size)).collect();
        let order_rank = self.sig.order().and_then(|o| linear_ranks(&rels[o], size));
        FiniteStructure { sig: self.sig, size, rels, funs, consts: self.consts, labels: self.labels, order_rank }
    }

    pub fn build_valid(self) -> Result<FiniteStructure> {
        self.build().checked()
    }
}

/// Rank of each element if `rel` is a strict linear order on `0..size`.
fn linear_ranks(rel: &Relation, size: usize) -> Option<Vec<usize>> {
    let mut rank = vec![0usize; size];
    for t in &rel.tuples {
        if t[0] >= size || t[1] >= size || t[0] == t[1] {
            return None;
        }
        rank[t[1]] += 1;
    }
    if rel.tuples.len() != size * size.saturating_sub(1) / 2 {
        return None;
    }
    let mut seen = vec![false; size];
    for &r in &rank {
        if r >= size || std::mem::replace(&mut seen[r], true) {
            return None;
        }
    }
    rel.tuples.iter().all(|t| rank[t[0]] < rank[t[1]]).then_some(rank)
}
