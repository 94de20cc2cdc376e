//! Skew embeddings of full trees: meet- and lex-preserving maps whose node
//! lengths strictly increase along the lexicographic order.

use std::collections::BTreeMap;

use crate::tree::{full_tree_nodes, TreeNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewEmbedding {
    pub k: u32,
    pub n: usize,
    /// Padding lengths `l_0 .. l_{n-1}`.
    pub levels: Vec<usize>,
    pub map: BTreeMap<TreeNode, TreeNode>,
}

impl SkewEmbedding {
    pub fn image(&self, node: &TreeNode) -> Option<&TreeNode> {
        self.map.get(node)
    }
}

/// Builds `h_n : k^{<=n} -> k^{<omega}` by the recursion
///
/// ```text
/// h_0(<>) = <>
/// h_{m+1}(<>) = <>
/// h_{m+1}(<t> ^ v) = <t> ^ 0^((t+1) * l_m) ^ h_m(v)
/// l_m = 1 + max length of h_m on k^{<=m}
/// ```
pub fn skew_embed(k: u32, n: usize) -> SkewEmbedding {
    let mut h: BTreeMap<TreeNode, TreeNode> = BTreeMap::new();
    h.insert(TreeNode::root(), TreeNode::root());
    let mut levels = Vec::with_capacity(n);
    for m in 0..n {
        let l = 1 + h.values().map(TreeNode::level).max().unwrap_or(0);
        levels.push(l);
        let mut next = BTreeMap::new();
        for node in full_tree_nodes(k, m + 1) {
            let image = match node.0.split_first() {
                None => TreeNode::root(),
                Some((&t, rest)) => {
                    let mut v = vec![t];
                    v.resize(1 + (t as usize + 1) * l, 0);
                    v.extend_from_slice(&h[&TreeNode(rest.to_vec())].0);
                    TreeNode(v)
                }
            };
            next.insert(node, image);
        }
        h = next;
    }
    SkewEmbedding { k, n, levels, map: h }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(s: &str) -> TreeNode {
        s.parse().unwrap()
    }

    #[test]
    fn binary_height_one() {
        let s = skew_embed(2, 1);
        assert_eq!(s.levels, vec![1]);
        assert_eq!(s.map[&node("0")], node("0.0"));
        assert_eq!(s.map[&node("1")], node("1.0.0"));
        assert_eq!(s.map[&TreeNode::root()], TreeNode::root());
    }

    #[test]
    fn binary_height_two_lengths() {
        let s = skew_embed(2, 2);
        assert_eq!(s.levels, vec![1, 4]);
        let lens: Vec<usize> = s.map.iter().skip(1).map(|(_, v)| v.level()).collect();
        assert_eq!(lens, vec![5, 7, 8, 9, 11, 12]);
    }

    #[test]
    fn height_zero_is_the_root() {
        let s = skew_embed(3, 0);
        assert_eq!(s.map.len(), 1);
        assert!(s.levels.is_empty());
    }
}
