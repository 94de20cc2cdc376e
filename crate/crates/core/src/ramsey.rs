//! Arrow relations `C -> (B)^A_k`: colorings of copies, homogeneous copies,
//! and an exhaustive search for bad colorings.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;

use crate::closure::Copy;
use crate::error::{Error, ParseError, Result};
use crate::iso::{copy_sets, for_each_embedding};
use crate::structure::{Elem, FiniteStructure};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

const PREFIXES: usize = 64;

/// A finished branch: `Err` when the budget ran out.
type Branch = std::result::Result<Option<Vec<u8>>, ()>;

/// A k-coloring of the copies of a pattern in a host. Copies are element
/// lists in increasing order; `colors[i]` colors `copies[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    pub k: usize,
    pub copies: Vec<Vec<Elem>>,
    pub colors: Vec<usize>,
}

impl Coloring {
    /// Colors every copy of `a` in `host` by `f`.
    pub fn from_fn(
        host: &FiniteStructure,
        a: &FiniteStructure,
        k: usize,
        mut f: impl FnMut(&[Elem]) -> usize,
    ) -> Result<Coloring> {
        let copies = copy_sets(host, a)?;
        let colors: Vec<usize> = copies.iter().map(|c| f(c)).collect();
        if let Some(&c) = colors.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidArgument(format!("color {c} out of range 0..{k}")));
        }
        Ok(Coloring { k, copies, colors })
    }

    pub fn color_of(&self, copy: &[Elem]) -> Option<usize> {
        self.copies.iter().position(|c| c == copy).map(|i| self.colors[i])
    }

    pub fn lookup(&self) -> HashMap<&[Elem], usize> {
        self.copies.iter().map(Vec::as_slice).zip(self.colors.iter().copied()).collect()
    }

    /// Whether this colors exactly the copies of `a` in `host`, each once,
    /// with colors below `k`.
    pub fn is_total_on(&self, host: &FiniteStructure, a: &FiniteStructure) -> Result<bool> {
        let mut mine = self.copies.clone();
        mine.sort();
        Ok(self.copies.len() == self.colors.len()
            && self.colors.iter().all(|&c| c < self.k)
            && mine == copy_sets(host, a)?)
    }
}

/// The copies of `b` in a host, each with the indices of the copies of `a`
/// (from a fixed list) it contains.
#[derive(Debug, Clone)]
pub struct CopyIncidence {
    pub a_copies: Vec<Vec<Elem>>,
    pub b_copies: Vec<Vec<Elem>>,
    pub members: Vec<Vec<usize>>,
}

impl CopyIncidence {
    pub fn new(host: &FiniteStructure, b: &FiniteStructure, a: &FiniteStructure) -> Result<CopyIncidence> {
        let a_copies = copy_sets(host, a)?;
        let inner = copy_sets(b, a)?;
        let index: HashMap<&[Elem], usize> = a_copies.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut seen: HashMap<Vec<Elem>, Vec<Elem>> = HashMap::new();
        for_each_embedding(b, host, &mut |m| {
            let mut set = m.to_vec();
            host.sort_increasing(&mut set);
            seen.entry(set).or_insert_with(|| m.to_vec());
            true
        })?;
        let mut b_copies: Vec<(Vec<Elem>, Vec<Elem>)> = seen.into_iter().collect();
        b_copies.sort();
        let mut members = Vec::with_capacity(b_copies.len());
        for (_, map) in &b_copies {
            let mut ids: Vec<usize> = inner
                .iter()
                .map(|s| {
                    let mut img: Vec<Elem> = s.iter().map(|&x| map[x]).collect();
                    host.sort_increasing(&mut img);
                    index[img.as_slice()]
                })
                .collect();
            ids.sort_unstable();
            ids.dedup();
            members.push(ids);
        }
        Ok(CopyIncidence { a_copies, b_copies: b_copies.into_iter().map(|(s, _)| s).collect(), members })
    }
}

/// The lexicographically least copy of `b` in `host` all of whose
/// sub-copies of `a` get the same color.
pub fn find_homogeneous(
    host: &FiniteStructure,
    a: &FiniteStructure,
    b: &FiniteStructure,
    coloring: &Coloring,
) -> Result<Option<Copy>> {
    let inc = CopyIncidence::new(host, b, a)?;
    let lookup = coloring.lookup();
    let colors: Vec<Option<usize>> = inc.a_copies.iter().map(|c| lookup.get(c.as_slice()).copied()).collect();
    if colors.iter().any(Option::is_none) {
        return Err(Error::InvalidArgument("coloring does not cover every copy".into()));
    }
    for (set, ids) in inc.b_copies.iter().zip(&inc.members) {
        if ids.iter().map(|&i| colors[i]).all_equal() {
            return Ok(Some(Copy::of(host, set.clone())));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    /// A coloring with no homogeneous copy.
    Fails(Coloring),
}

#[derive(Debug, Clone)]
pub struct ArrowVerdict {
    pub outcome: Outcome,
    /// Search nodes, counted as if the search ran sequentially.
    pub nodes: u64,
    pub a_copies: usize,
    pub b_copies: usize,
    pub elapsed: Duration,
}

impl ArrowVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn witness(&self) -> Option<&Coloring> {
        match &self.outcome {
            Outcome::Fails(c) => Some(c),
            Outcome::Holds => None,
        }
    }
}

/// Search state for one branch of the coloring search.
#[derive(Clone)]
struct State {
    colors: Vec<u8>,
    masks: Vec<u64>,
    open: Vec<u32>,
    used: usize,
}

struct Problem<'a> {
    k: usize,
    containing: Vec<Vec<usize>>,
    members: &'a [Vec<usize>],
}

impl Problem<'_> {
    fn initial(&self) -> State {
        State {
            colors: Vec::with_capacity(self.containing.len()),
            masks: vec![0; self.members.len()],
            open: self.members.iter().map(|m| m.len() as u32).collect(),
            used: 0,
        }
    }

    /// Colors the next copy with `c`; `false` if that completes a
    /// homogeneous copy of `b`. Undo with [`unassign`](Self::unassign).
    fn assign(&self, st: &mut State, c: usize) -> bool {
        let i = st.colors.len();
        st.colors.push(c as u8);
        let mut ok = true;
        for &j in &self.containing[i] {
            st.masks[j] |= 1 << c;
            st.open[j] -= 1;
            if st.open[j] == 0 && st.masks[j].count_ones() == 1 {
                ok = false;
            }
        }
        ok
    }

    fn unassign(&self, st: &mut State, old_masks: &[(usize, u64)]) {
        let i = st.colors.len() - 1;
        st.colors.pop();
        for &j in &self.containing[i] {
            st.open[j] += 1;
        }
        for &(j, m) in old_masks {
            st.masks[j] = m;
        }
    }

    /// Depth-first search below `st`. Returns `Some(colors)` on the first
    /// bad coloring; `Err` when the budget runs out or `stop` is raised.
    fn dfs(&self, st: &mut State, nodes: &mut u64, counter: &Counter) -> std::result::Result<Option<Vec<u8>>, ()> {
        if st.colors.len() == self.containing.len() {
            return Ok(Some(st.colors.clone()));
        }
        let i = st.colors.len();
        let limit = (st.used + 1).min(self.k);
        for c in 0..limit {
            *nodes += 1;
            if nodes.is_multiple_of(4096) && !counter.charge(4096) {
                return Err(());
            }
            let saved: Vec<(usize, u64)> = self.containing[i].iter().map(|&j| (j, st.masks[j])).collect();
            let prev_used = st.used;
            st.used = st.used.max(c + 1);
            let ok = self.assign(st, c);
            if ok {
                if let Some(w) = self.dfs(st, nodes, counter)? {
                    return Ok(Some(w));
                }
            }
            self.unassign(st, &saved);
            st.used = prev_used;
        }
        Ok(None)
    }
}

struct Counter {
    spent: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
}

impl Counter {
    fn charge(&self, n: u64) -> bool {
        let total = self.spent.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.exhausted.load(Ordering::Relaxed)
    }
}

/// Decides `c -> (b)^a_k` by searching for a k-coloring of the copies of
/// `a` in `c` without a homogeneous copy of `b`.
///
/// Copies are colored in lexicographic order, each with a color at most one
/// above the largest used so far. The search is split into prefixes that
/// run in parallel; the reported witness is the first bad coloring in the
/// sequential order, whatever the thread timing.
pub fn arrow_holds(
    c: &FiniteStructure,
    b: &FiniteStructure,
    a: &FiniteStructure,
    k: usize,
    budget: u64,
) -> Result<ArrowVerdict> {
    let start = Instant::now();
    if k == 0 || k > 64 {
        return Err(Error::InvalidArgument(format!("number of colors must be in 1..=64, got {k}")));
    }
    let inc = CopyIncidence::new(c, b, a)?;
    let n = inc.a_copies.len();
    let finish = |outcome: Outcome, nodes| ArrowVerdict {
        outcome: {
            if let Outcome::Fails(w) = &outcome {
                assert!(
                    inc.members.iter().all(|m| !m.iter().map(|&i| w.colors[i]).all_equal()),
                    "search returned a coloring with a monochromatic copy"
                );
            }
            outcome
        },
        nodes,
        a_copies: n,
        b_copies: inc.b_copies.len(),
        elapsed: start.elapsed(),
    };
    if inc.b_copies.is_empty() {
        let w = Coloring { k, copies: inc.a_copies.clone(), colors: vec![0; n] };
        return Ok(finish(Outcome::Fails(w), 0));
    }
    if inc.members.iter().any(Vec::is_empty) {
        return Ok(finish(Outcome::Holds, 0));
    }
    let mut containing = vec![Vec::new(); n];
    for (j, m) in inc.members.iter().enumerate() {
        for &i in m {
            containing[i].push(j);
        }
    }
    let problem = Problem { k, containing, members: &inc.members };
    let counter = Counter { spent: AtomicU64::new(0), budget, exhausted: AtomicBool::new(false) };

    // Breadth-first expansion into independent prefixes. The split does not
    // depend on the thread count, so neither does the node count.
    let target = PREFIXES;
    let mut prefixes = vec![problem.initial()];
    let mut prefix_nodes = 0u64;
    while prefixes.len() < target && prefixes[0].colors.len() < n.min(24) {
        let mut next = Vec::new();
        for st in &prefixes {
            let limit = (st.used + 1).min(k);
            for col in 0..limit {
                prefix_nodes += 1;
                let mut child = st.clone();
                child.used = child.used.max(col + 1);
                if problem.assign(&mut child, col) {
                    next.push(child);
                }
            }
        }
        prefixes = next;
        if prefixes.is_empty() {
            break;
        }
    }
    if !counter.charge(prefix_nodes) {
        return Err(Error::BudgetExceeded { budget });
    }
    if prefixes.first().is_some_and(|p| p.colors.len() == n) {
        let colors = prefixes[0].colors.iter().map(|&x| x as usize).collect();
        let w = Coloring { k, copies: inc.a_copies.clone(), colors };
        return Ok(finish(Outcome::Fails(w), prefix_nodes));
    }

    let best = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<(Branch, u64)>> = prefixes
        .into_par_iter()
        .enumerate()
        .map(|(idx, mut st)| {
            if idx > best.load(Ordering::Relaxed) {
                return None;
            }
            let mut nodes = 0u64;
            let r = problem.dfs(&mut st, &mut nodes, &counter);
            if let Ok(Some(_)) = r {
                best.fetch_min(idx, Ordering::Relaxed);
            }
            Some((r, nodes))
        })
        .collect();

    let mut nodes = prefix_nodes;
    for r in results {
        match r {
            Some((Ok(None), used)) => nodes += used,
            Some((Ok(Some(colors)), used)) => {
                nodes += used;
                let colors = colors.into_iter().map(usize::from).collect();
                let w = Coloring { k, copies: inc.a_copies.clone(), colors };
                return Ok(finish(Outcome::Fails(w), nodes));
            }
            Some((Err(()), _)) => return Err(Error::BudgetExceeded { budget }),
            None => unreachable!("a prefix is skipped only after an earlier witness"),
        }
    }
    if nodes > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    Ok(finish(Outcome::Holds, nodes))
}

/// A `t`-subset of `0..n` all of whose `m`-subsets get the same color, the
/// lexicographically least one if any.
pub fn ramsey_homogeneous_levels(
    n: usize,
    m: usize,
    t: usize,
    color: &dyn Fn(&[usize]) -> usize,
) -> Option<Vec<usize>> {
    (0..n).combinations(t).find(|set| set.iter().copied().combinations(m).map(|s| color(&s)).all_equal())
}

/// Line-oriented report of a verdict.
pub fn serialize_verdict(v: &ArrowVerdict) -> String {
    let mut out = String::new();
    match &v.outcome {
        Outcome::Holds => {
            let _ = writeln!(out, "verdict: holds\nnodes: {}", v.nodes);
        }
        Outcome::Fails(w) => {
            let _ = writeln!(out, "verdict: fails\nnodes: {}", v.nodes);
            out.push_str(&serialize_coloring(w));
        }
    }
    out
}

pub fn serialize_budget_report(budget: u64) -> String {
    format!("verdict: budget\nbudget: {budget}\n")
}

pub fn serialize_coloring(w: &Coloring) -> String {
    let mut out = format!("colors: {}\ncoloring:\n", w.k);
    for (copy, c) in w.copies.iter().zip(&w.colors) {
        let _ = writeln!(out, "copy {} color {c}", copy.iter().join(" "));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Report {
    Holds { nodes: u64 },
    Fails { nodes: u64, witness: Coloring },
    Budget { budget: u64 },
}

pub fn parse_report(text: &str) -> Result<Report> {
    let err = |line: usize, msg: &str| Error::Parse(ParseError { line, column: 1, message: msg.into() });
    let mut verdict = None;
    let mut nodes = 0;
    let mut budget = 0;
    let mut k = None;
    let mut copies = Vec::new();
    let mut colors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| err(ln, "expected a number"));
        if let Some(v) = line.strip_prefix("verdict:") {
            verdict = Some(v.trim().to_string());
        } else if let Some(v) = line.strip_prefix("nodes:") {
            nodes = num(v)?;
        } else if let Some(v) = line.strip_prefix("budget:") {
            budget = num(v)?;
        } else if let Some(v) = line.strip_prefix("colors:") {
            k = Some(num(v)? as usize);
        } else if line == "coloring:" {
        } else if let Some(rest) = line.strip_prefix("copy ") {
            let (elems, color) = rest.split_once(" color ").ok_or_else(|| err(ln, "expected `copy ... color c`"))?;
            let elems = elems
                .split_whitespace()
                .map(|x| x.parse::<Elem>().map_err(|_| err(ln, "bad element")))
                .collect::<Result<Vec<_>>>()?;
            copies.push(elems);
            colors.push(num(color)? as usize);
        } else {
            return Err(err(ln, "unrecognized line"));
        }
    }
    match verdict.as_deref() {
        Some("holds") => Ok(Report::Holds { nodes }),
        Some("budget") => Ok(Report::Budget { budget }),
        Some("fails") => {
            let k = k.unwrap_or_else(|| colors.iter().max().map_or(1, |m| m + 1));
            Ok(Report::Fails { nodes, witness: Coloring { k, copies, colors } })
        }
        _ => Err(err(1, "missing or unknown verdict")),
    }
}

/// Rechecks a witness: it must color every copy of `a` in `c` and leave no
/// homogeneous copy of `b`.
pub fn verify_witness(c: &FiniteStructure, b: &FiniteStructure, a: &FiniteStructure, w: &Coloring) -> Result<bool> {
    Ok(w.is_total_on(c, a)? && find_homogeneous(c, a, b, w)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    fn chain(n: usize) -> FiniteStructure {
        let sig = Signature::relational(&[("<", 2)], Some("<")).unwrap();
        let mut b = FiniteStructure::builder(sig, n);
        for x in 0..n {
            for y in x + 1..n {
                b.relation("<", &[x, y]).unwrap();
            }
        }
        b.build()
    }

    #[test]
    fn pigeonhole() {
        let v = arrow_holds(&chain(5), &chain(3), &chain(1), 2, DEFAULT_BUDGET).unwrap();
        assert!(v.holds());
        let v = arrow_holds(&chain(4), &chain(3), &chain(1), 2, DEFAULT_BUDGET).unwrap();
        assert!(!v.holds());
    }

    #[test]
    fn single_color_holds_when_b_embeds() {
        assert!(arrow_holds(&chain(3), &chain(2), &chain(1), 1, 10).unwrap().holds());
        assert!(!arrow_holds(&chain(1), &chain(2), &chain(1), 1, 10).unwrap().holds());
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let r = arrow_holds(&chain(6), &chain(3), &chain(2), 2, 5);
        assert_eq!(r.unwrap_err(), Error::BudgetExceeded { budget: 5 });
    }

    #[test]
    fn report_round_trip() {
        let v = arrow_holds(&chain(5), &chain(3), &chain(2), 2, DEFAULT_BUDGET).unwrap();
        let text = serialize_verdict(&v);
        match parse_report(&text).unwrap() {
            Report::Fails { witness, .. } => {
                assert_eq!(&witness, v.witness().unwrap());
                assert!(verify_witness(&chain(5), &chain(3), &chain(2), &witness).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn homogeneous_levels() {
        let parity = |s: &[usize]| (s[0] + s[1]) % 2;
        assert_eq!(ramsey_homogeneous_levels(6, 2, 3, &parity), Some(vec![0, 2, 4]));
        let by_value = |s: &[usize]| s[0] % 2;
        assert_eq!(ramsey_homogeneous_levels(5, 1, 3, &by_value), Some(vec![0, 2, 4]));
        assert_eq!(ramsey_homogeneous_levels(4, 1, 3, &by_value), None);
    }
}
