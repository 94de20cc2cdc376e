//! Finite trees of sequences and their structures in the four tree
//! languages.
//!
//! | dialect | relations                    | functions |
//! |---------|------------------------------|-----------|
//! | `L0`    | `<=`, `<lex`                 | `meet`    |
//! | `L1`    | `<=`, `<lex`, `<len`         | `meet`    |
//! | `Ls`    | `<=`, `<lex`, `P0` .. `Pm`   | `meet`    |
//! | `Lt`    | `<=`, `<lex`                 |           |
//!
//! `<=` is the (reflexive) prefix order, `<lex` the strict lexicographic
//! order (a prefix precedes its extensions), which is the designated order.
//! Elements are numbered in lexicographic order, so element ids are ranks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::structure::{Elem, FiniteStructure};

pub const PREFIX: &str = "<=";
pub const LEX: &str = "<lex";
pub const LEN: &str = "<len";
pub const MEET: &str = "meet";

pub fn level_predicate(n: usize) -> String {
    format!("P{n}")
}

/// A finite sequence of naturals. The derived order is the lexicographic
/// order with prefixes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TreeNode(pub Vec<u32>);

impl TreeNode {
    pub fn root() -> TreeNode {
        TreeNode(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_prefix_of(&self, other: &TreeNode) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn child(&self, i: u32) -> TreeNode {
        let mut v = self.0.clone();
        v.push(i);
        TreeNode(v)
    }

    pub fn extended(&self, tail: &[u32]) -> TreeNode {
        let mut v = self.0.clone();
        v.extend_from_slice(tail);
        TreeNode(v)
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for TreeNode {
    type Err = Error;

    fn from_str(s: &str) -> Result<TreeNode> {
        let s = s.trim();
        if s == "()" || s == "<>" {
            return Ok(TreeNode::root());
        }
        s.split('.')
            .map(|p| p.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(TreeNode)
            .map_err(|_| Error::InvalidArgument(format!("bad tree node `{s}`")))
    }
}

/// Longest common prefix.
pub fn meet(a: &TreeNode, b: &TreeNode) -> TreeNode {
    let n = a.0.iter().zip(&b.0).take_while(|(x, y)| x == y).count();
    TreeNode(a.0[..n].to_vec())
}

pub fn lex_cmp(a: &TreeNode, b: &TreeNode) -> Ordering {
    a.cmp(b)
}

pub fn level(a: &TreeNode) -> usize {
    a.level()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dialect {
    L0,
    L1,
    Ls,
    Lt,
}

impl Dialect {
    pub fn has_meet(self) -> bool {
        self != Dialect::Lt
    }

    /// The signature of this dialect; `m` is the largest level predicate
    /// and only matters for `Ls`.
    pub fn signature(self, m: usize) -> Signature {
        let mut rels = vec![(PREFIX.to_string(), 2), (LEX.to_string(), 2)];
        match self {
            Dialect::L1 => rels.push((LEN.to_string(), 2)),
            Dialect::Ls => rels.extend((0..=m).map(|n| (level_predicate(n), 1))),
            _ => {}
        }
        let funs = if self.has_meet() { vec![(MEET.to_string(), 2)] } else { vec![] };
        Signature::new(rels, funs, vec![], Some(LEX)).expect("tree signatures are well formed")
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dialect::L0 => "L0",
            Dialect::L1 => "L1",
            Dialect::Ls => "Ls",
            Dialect::Lt => "Lt",
        };
        f.write_str(s)
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Dialect> {
        match s {
            "L0" => Ok(Dialect::L0),
            "L1" => Ok(Dialect::L1),
            "Ls" => Ok(Dialect::Ls),
            "Lt" => Ok(Dialect::Lt),
            _ => Err(Error::InvalidArgument(format!("unknown dialect `{s}`"))),
        }
    }
}

/// A finite set of nodes with its structure in one dialect.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeStructure {
    nodes: Vec<TreeNode>,
    dialect: Dialect,
    structure: FiniteStructure,
}

impl TreeStructure {
    /// For `Ls` the level predicates run up to the deepest node.
    pub fn from_nodes(nodes: impl IntoIterator<Item = TreeNode>, dialect: Dialect) -> Result<TreeStructure> {
        let nodes: Vec<TreeNode> = nodes.into_iter().collect();
        let m = nodes.iter().map(TreeNode::level).max().unwrap_or(0);
        TreeStructure::with_levels(nodes, dialect, m)
    }

    /// Like [`from_nodes`](Self::from_nodes) with level predicates
    /// `P0..Pm`.
    pub fn with_levels(nodes: impl IntoIterator<Item = TreeNode>, dialect: Dialect, m: usize) -> Result<TreeStructure> {
        let mut nodes: Vec<TreeNode> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        if dialect == Dialect::Ls {
            if let Some(deep) = nodes.iter().find(|n| n.level() > m) {
                return Err(Error::LevelExceedsM { level: deep.level(), m });
            }
        }
        let sig = Arc::new(dialect.signature(m));
        let n = nodes.len();
        let mut b = FiniteStructure::builder(Arc::clone(&sig), n);
        let prefix = sig.relation_index(PREFIX).unwrap();
        let lex = sig.relation_index(LEX).unwrap();
        let len = sig.relation_index(LEN);
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (&nodes[i], &nodes[j]);
                if x.is_prefix_of(y) {
                    b.relation_at(prefix, &[i, j])?;
                }
                if i < j {
                    b.relation_at(lex, &[i, j])?;
                }
                if let Some(len) = len {
                    if x.level() < y.level() {
                        b.relation_at(len, &[i, j])?;
                    }
                }
                if dialect.has_meet() {
                    let w = meet(x, y);
                    let k = nodes.binary_search(&w).map_err(|_| Error::MeetNotClosed)?;
                    b.function_at(0, &[i, j], k)?;
                }
            }
            if dialect == Dialect::Ls {
                b.relation(&level_predicate(nodes[i].level()), &[i])?;
            }
        }
        b.labels(nodes.iter().map(TreeNode::to_string).collect());
        Ok(TreeStructure { structure: b.build(), nodes, dialect })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn into_structure(self) -> FiniteStructure {
        self.structure
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, e: Elem) -> &TreeNode {
        &self.nodes[e]
    }

    pub fn element(&self, node: &TreeNode) -> Option<Elem> {
        self.nodes.binary_search(node).ok()
    }
}

/// All nodes of `k^{<=n}` in lexicographic order.
pub fn full_tree_nodes(k: u32, n: usize) -> Vec<TreeNode> {
    fn go(k: u32, n: usize, cur: &mut Vec<u32>, out: &mut Vec<TreeNode>) {
        out.push(TreeNode(cur.clone()));
        if cur.len() == n {
            return;
        }
        for i in 0..k {
            cur.push(i);
            go(k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, n, &mut Vec::new(), &mut out);
    out
}

/// The full tree `k^{<=n}`. For `Ls` the level predicates are `P0..Pn`.
pub fn build_tree(k: u32, n: usize, dialect: Dialect) -> TreeStructure {
    TreeStructure::with_levels(full_tree_nodes(k, n), dialect, n).expect("full trees are meet-closed")
}

/// Parses the shorthand `k^<=n@dialect`, e.g. `2^<=3@L0`.
pub fn parse_tree_shorthand(s: &str) -> Result<TreeStructure> {
    let bad = || Error::InvalidArgument(format!("expected `k^<=n@dialect`, found `{s}`"));
    let (shape, dialect) = s.split_once('@').ok_or_else(bad)?;
    let (k, n) = shape.split_once("^<=").ok_or_else(bad)?;
    let k: u32 = k.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if k == 0 {
        return Err(Error::InvalidArgument("branching must be at least 1".into()));
    }
    Ok(build_tree(k, n, dialect.trim().parse()?))
}

/// Reads the nodes back from the labels of a tree structure.
pub fn nodes_of(s: &FiniteStructure) -> Result<Vec<TreeNode>> {
    let labels = s.labels().ok_or_else(|| Error::NotATree("structure carries no node labels".into()))?;
    labels.iter().map(|l| l.parse()).collect()
}
