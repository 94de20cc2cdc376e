//! Finding copies of a pattern inside an ordered index on which an indexed
//! family looks indiscernible, and encoding colorings as structures.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use itertools::Itertools;

use crate::closure::{cl, Copy};
use crate::error::{Error, Result};
use crate::formula::{Formula, QfFormula, Term};
use crate::indiscernible::{Delta, IndexedFamily};
use crate::iso::{copy_sets, for_each_embedding};
use crate::ramsey::Coloring;
use crate::signature::Signature;
use crate::structure::{all_tuples, Elem, FiniteStructure};
use crate::types::{qf_type, QfType};

/// Positions of a realization of `eta` inside the increasing enumeration of
/// its closure. Errors if `index` realizes no tuple of this type.
pub fn sigma_eta(index: &FiniteStructure, eta: &QfType) -> Result<Vec<usize>> {
    if index.order_ranks().is_none() {
        return Err(Error::NoOrder);
    }
    if realizations(index, eta)?.is_empty() {
        return Err(Error::TypeNotRealized);
    }
    Ok(eta.positions.clone())
}

/// The copies of the closure pattern of `eta` in `index`, each paired with
/// the realization it restricts to.
pub fn realizations(index: &FiniteStructure, eta: &QfType) -> Result<Vec<(Vec<Elem>, Vec<Elem>)>> {
    let pattern = eta.canonical.clone();
    let copies = copy_sets(&index.without_labels(), &pattern)?;
    Ok(copies
        .into_iter()
        .map(|e| {
            let j: Vec<Elem> = eta.positions.iter().map(|&p| e[p]).collect();
            (e, j)
        })
        .collect())
}

/// Checks that `j -> cl(j)` is a bijection from the realizations of `eta`
/// onto the increasing copies of its closure pattern, inverted by
/// restriction to the positions. Returns the number of realizations.
pub fn check_closure_correspondence(index: &FiniteStructure, eta: &QfType) -> Result<usize> {
    let pairs = realizations(index, eta)?;
    let by_copy: HashMap<&[Elem], &[Elem]> = pairs.iter().map(|(e, j)| (e.as_slice(), j.as_slice())).collect();
    let mut count = 0;
    for j in all_tuples(index.size(), eta.arity()) {
        if qf_type(index, &j)? != *eta {
            continue;
        }
        count += 1;
        let mut sorted = j.clone();
        index.sort_increasing(&mut sorted);
        let closure = cl(index, &sorted)?;
        match by_copy.get(closure.as_slice()) {
            Some(&back) if back == j.as_slice() => {}
            _ => return Err(Error::InvalidArgument(format!("realization {j:?} breaks the correspondence"))),
        }
    }
    if count != pairs.len() {
        return Err(Error::InvalidArgument(format!(
            "{count} realizations but {} copies of the closure pattern",
            pairs.len()
        )));
    }
    Ok(count)
}

/// Relations `R1..Rk` of arity `|A|`: `R(c+1)` holds of the increasing
/// enumeration of every copy of `A` colored `c`, and of nothing else.
pub fn encode_coloring_as_structure(
    index: &FiniteStructure,
    a: &FiniteStructure,
    g: &Coloring,
) -> Result<FiniteStructure> {
    let n = a.size().max(1);
    let rels: Vec<(String, usize)> = (1..=g.k).map(|s| (format!("R{s}"), n)).collect();
    let sig = Signature::new(rels, vec![], vec![], None)?;
    let mut b = FiniteStructure::builder(Arc::new(sig), index.size());
    for (copy, &c) in g.copies.iter().zip(&g.colors) {
        if copy.len() != a.size() {
            return Err(Error::LengthMismatch);
        }
        b.relation_at(c, copy)?;
    }
    Ok(b.build())
}

/// The atoms `R1(x1..xn) .. Rk(x1..xn)`.
pub fn coloring_delta(k: usize, n: usize) -> Vec<QfFormula> {
    (1..=k).map(|s| QfFormula::new(n, Formula::Rel(format!("R{s}"), (0..n).map(Term::Var).collect()))).collect()
}

#[derive(Debug, Clone)]
pub struct HomogenizationRequest {
    pub family: IndexedFamily,
    pub b: FiniteStructure,
    pub delta: Vec<QfFormula>,
    /// Types to make uniform; `None` means every type of a tuple of `b` of
    /// a length some formula applies to (up to `max_len`).
    pub types: Option<Vec<QfType>>,
    pub max_len: usize,
}

/// One round: the coloring of closure copies for one type.
#[derive(Debug, Clone)]
pub struct Round {
    pub eta: QfType,
    pub closure_copies: usize,
    pub colors_used: usize,
    /// Copies of `b` still homogeneous after this round.
    pub survivors: usize,
}

#[derive(Debug, Clone)]
pub struct HomogenizationResult {
    pub copy: Copy,
    /// Per requested type, the common truth values of the applicable
    /// formulas (in formula order), or `None` if `b` does not realize it.
    pub per_type: Vec<(QfType, Vec<usize>, Option<Vec<bool>>)>,
    pub trace: Vec<Round>,
}

impl HomogenizationResult {
    pub fn report(&self, index: &FiniteStructure) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "copy: {}", self.copy.elements.iter().map(|&e| index.label(e)).join(" "));
        for (q, app, bits) in &self.per_type {
            let shown = match bits {
                Some(b) => app.iter().zip(b).map(|(i, &v)| format!("{}{}", if v { "+" } else { "-" }, i + 1)).join(" "),
                None => "unrealized".to_string(),
            };
            let _ = writeln!(out, "type {q}: {shown}");
        }
        for (i, r) in self.trace.iter().enumerate() {
            let _ = writeln!(
                out,
                "round {}: closure size {}, {} copies, {} colors, {} survivors",
                i + 1,
                r.eta.closure_size(),
                r.closure_copies,
                r.colors_used,
                r.survivors
            );
        }
        out
    }
}

fn default_types(b: &FiniteStructure, delta: &Delta, width: usize, max_len: usize) -> Result<Vec<QfType>> {
    let mut out: Vec<QfType> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for n in 1..=max_len {
        if delta.applicable(n, width).is_empty() {
            continue;
        }
        for t in all_tuples(b.size(), n) {
            let q = qf_type(b, &t)?;
            if seen.insert(q.key()) {
                out.push(q);
            }
        }
    }
    Ok(out)
}

/// Finds a copy of `req.b` in the index on which, for every requested type,
/// all realizations carry parameters with the same Δ-type.
///
/// Each type is one round, larger closures first: the closure copies of
/// the type are colored by the Δ-type of the parameters at their
/// restriction to the type's positions, and a copy of `b` survives if all
/// closure copies inside it got one color. The result is the
/// lexicographically least copy surviving every round, rechecked against
/// all realizations inside it. `budget` bounds the number of copy checks.
pub fn homogenize(req: &HomogenizationRequest, budget: u64) -> Result<HomogenizationResult> {
    let fam = &req.family;
    let index = fam.index.without_labels();
    if index.order_ranks().is_none() {
        return Err(Error::NoOrder);
    }
    let b = req.b.without_labels();
    if b.signature() != index.signature() {
        return Err(Error::SignatureMismatch);
    }
    let delta = Delta::new(req.delta.clone(), &fam.target)?;
    let width = fam.width();
    let mut types = match &req.types {
        Some(t) => t.clone(),
        None => default_types(&b, &delta, width, req.max_len)?,
    };
    types.sort_by_key(|q| std::cmp::Reverse(q.closure_size()));

    // copies of b with one embedding each
    let mut b_maps: BTreeMap<Vec<Elem>, Vec<Elem>> = BTreeMap::new();
    for_each_embedding(&b, &index, &mut |m| {
        let mut set = m.to_vec();
        index.sort_increasing(&mut set);
        b_maps.entry(set).or_insert_with(|| m.to_vec());
        true
    })?;
    if b_maps.is_empty() {
        return Err(Error::NoHomogeneousCopy);
    }
    let mut alive: Vec<bool> = vec![true; b_maps.len()];
    let mut spent: u64 = 0;
    let mut trace = Vec::new();

    for eta in &types {
        let app = delta.applicable(eta.arity(), width);
        let pairs = realizations(&index, eta)?;
        if pairs.is_empty() {
            return Err(Error::TypeNotRealized);
        }
        let mut palette: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut color: HashMap<Vec<Elem>, usize> = HashMap::with_capacity(pairs.len());
        for (e, j) in &pairs {
            let p = fam.params(j);
            let bits: Vec<bool> = app.iter().map(|&i| delta.compiled(i).eval_unchecked(&fam.target, &p)).collect();
            let next = palette.len();
            let c = *palette.entry(bits).or_insert(next);
            color.insert(e.clone(), c);
        }
        let inner = copy_sets(&b, &eta.canonical)?;
        for (slot, (_, map)) in alive.iter_mut().zip(&b_maps) {
            if !*slot {
                continue;
            }
            spent += 1;
            if spent > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            *slot = inner
                .iter()
                .map(|s| {
                    let mut img: Vec<Elem> = s.iter().map(|&x| map[x]).collect();
                    index.sort_increasing(&mut img);
                    color[&img]
                })
                .all_equal();
        }
        trace.push(Round {
            eta: eta.clone(),
            closure_copies: pairs.len(),
            colors_used: palette.len(),
            survivors: alive.iter().filter(|&&a| a).count(),
        });
    }

    let (set, _) = b_maps.iter().zip(&alive).find(|(_, &a)| a).map(|(kv, _)| kv).ok_or(Error::NoHomogeneousCopy)?;
    let copy = Copy::of(&fam.index, set.clone());

    // recheck on every realization inside the copy
    let mut per_type = Vec::new();
    for eta in &types {
        let app = delta.applicable(eta.arity(), width);
        let mut common: Option<Vec<bool>> = None;
        for idx in all_tuples(set.len(), eta.arity()) {
            let j: Vec<Elem> = idx.iter().map(|&i| set[i]).collect();
            if qf_type(&index, &j)? != *eta {
                continue;
            }
            let p = fam.params(&j);
            let bits: Vec<bool> =
                app.iter().map(|&i| delta.compiled(i).eval(&fam.target, &p)).collect::<Result<_>>()?;
            match &common {
                None => common = Some(bits),
                Some(c) if *c == bits => {}
                Some(_) => {
                    return Err(Error::InvalidArgument(format!(
                        "internal check failed: copy {set:?} is not uniform on type {eta}"
                    )))
                }
            }
        }
        per_type.push((eta.clone(), app, common));
    }
    Ok(HomogenizationResult { copy, per_type, trace })
}

/// Encodes `g`, homogenizes the identity family for the atoms `R1..Rk` on
/// the type of the increasing enumeration of `a`, and checks the copy found
/// against `g` directly.
pub fn roundtrip_check(
    index: &FiniteStructure,
    a: &FiniteStructure,
    b: &FiniteStructure,
    g: &Coloring,
    budget: u64,
) -> Result<bool> {
    let m = encode_coloring_as_structure(index, a, g)?;
    let family = IndexedFamily::identity(index.clone(), m)?;
    let increasing = a.increasing_elements();
    let p_a = qf_type(&a.without_labels(), &increasing)?;
    let req = HomogenizationRequest {
        family,
        b: b.clone(),
        delta: coloring_delta(g.k, a.size()),
        types: Some(vec![p_a]),
        max_len: a.size(),
    };
    let res = homogenize(&req, budget)?;
    let lookup = g.lookup();
    let sub = index.induced(&res.copy.elements).without_labels();
    let inside = copy_sets(&sub, &a.without_labels())?;
    Ok(inside
        .iter()
        .map(|s| {
            let img: Vec<Elem> = s.iter().map(|&i| res.copy.elements[i]).collect();
            lookup.get(img.as_slice()).copied()
        })
        .all_equal())
}
