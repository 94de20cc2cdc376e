//! Small named structures used by the examples, the tests and the
//! command-line `fixtures` subcommand.

use std::fmt::Write as _;

use crate::amalgam::{check_amalgamation, refute_tree_amalgam, TreeAge};
use crate::error::{Error, Result};
use crate::iso::Embedding;
use crate::ramsey::{arrow_holds, serialize_verdict, verify_witness};
use crate::signature::Signature;
use crate::skew::skew_embed;
use crate::structure::{Elem, FiniteStructure};
use crate::tree::{Dialect, TreeNode, LEX, PREFIX};

/// The strict linear order on `n` points.
pub fn chain(n: usize) -> FiniteStructure {
    let sig = Signature::relational(&[("<", 2)], Some("<")).expect("valid");
    let mut b = FiniteStructure::builder(sig, n);
    for x in 0..n {
        for y in x + 1..n {
            b.relation_at(0, &[x, y]).expect("binary");
        }
    }
    b.build()
}

/// The prefix/lex structure on `nodes`, element `i` being `nodes[i]`.
pub fn lt_structure(nodes: &[TreeNode], labels: &[&str]) -> FiniteStructure {
    let mut b = FiniteStructure::builder(Dialect::Lt.signature(0), nodes.len());
    for (i, x) in nodes.iter().enumerate() {
        for (j, y) in nodes.iter().enumerate() {
            if x.is_prefix_of(y) {
                b.relation(PREFIX, &[i, j]).expect("binary");
            }
            if x < y {
                b.relation(LEX, &[i, j]).expect("binary");
            }
        }
    }
    b.labels(labels.iter().map(|s| s.to_string()).collect());
    b.build()
}

fn nodes(list: &[&str]) -> Vec<TreeNode> {
    list.iter().map(|s| s.parse().expect("node literal")).collect()
}

/// The amalgamation counterexample for the tree age: a root below three
/// nodes, and two extensions that insert a node below different pairs.
#[derive(Debug, Clone)]
pub struct AmalgamationCounterexample {
    pub a: FiniteStructure,
    pub b1: FiniteStructure,
    pub b2: FiniteStructure,
    pub e1: Embedding,
    pub e2: Embedding,
}

pub fn amalgamation_counterexample() -> AmalgamationCounterexample {
    let a = lt_structure(&nodes(&["()", "0", "1", "2"]), &["a0", "a1", "a2", "a3"]);
    // b4 sits below b1 and b2; c4 sits below c2 and c3
    let b1 = lt_structure(&nodes(&["()", "0.0", "0.1", "1", "0"]), &["b0", "b1", "b2", "b3", "b4"]);
    let b2 = lt_structure(&nodes(&["()", "0", "1.0", "1.1", "1"]), &["c0", "c1", "c2", "c3", "c4"]);
    let id = Embedding { map: vec![0, 1, 2, 3] };
    AmalgamationCounterexample { a, b1, b2, e1: id.clone(), e2: id }
}

pub const FIXTURE_NAMES: &[&str] = &["amalgamation-It", "r33", "r33-lower", "skew-2-1"];

/// Result of a named reproduction: the printed report and whether the
/// expected positive outcome occurred (for `amalgamation-It` the expected
/// outcome is the absence of an amalgam, reported as a negative result).
#[derive(Debug, Clone)]
pub struct FixtureRun {
    pub text: String,
    pub positive: bool,
}

pub fn run_fixture(name: &str, bound: usize, budget: u64) -> Result<FixtureRun> {
    let mut text = String::new();
    match name {
        "amalgamation-It" => {
            let ce = amalgamation_counterexample();
            for (label, b, e) in [("B1", &ce.b1, &ce.e1), ("B2", &ce.b2, &ce.e2)] {
                let ok = ce.a.is_embedding(b, &e.map);
                let pairs: Vec<String> =
                    e.map.iter().enumerate().map(|(x, &y)| format!("{}->{}", ce.a.label(x), b.label(y))).collect();
                let _ =
                    writeln!(text, "A embeds in {label} via {}: {}", pairs.join(" "), if ok { "yes" } else { "no" });
                if !ok {
                    return Err(Error::InvalidArgument(format!("fixture map into {label} is not an embedding")));
                }
            }
            let r = refute_tree_amalgam(&ce.b1, &ce.b2, &ce.e1, &ce.e2)
                .ok_or_else(|| Error::InvalidArgument("symbolic refutation not found".into()))?;
            text.push_str(&r.to_string());
            let s = check_amalgamation(&ce.a, &ce.b1, &ce.b2, &ce.e1, &ce.e2, &TreeAge, bound, budget)?;
            let _ = writeln!(text, "candidates generated: {}", s.generated);
            let _ = writeln!(text, "candidates tested: {}", s.candidates);
            match s.amalgam {
                None => {
                    let _ = writeln!(text, "no amalgam up to bound {bound}");
                    Ok(FixtureRun { text, positive: false })
                }
                Some(am) => {
                    let _ = writeln!(text, "amalgam found with {} elements", am.d.size());
                    Ok(FixtureRun { text, positive: true })
                }
            }
        }
        "r33" | "r33-lower" => {
            let n = if name == "r33" { 6 } else { 5 };
            let (c, b, a) = (chain(n), chain(3), chain(2));
            let v = arrow_holds(&c, &b, &a, 2, budget)?;
            let _ = writeln!(text, "{n}-chain -> (3-chain)^(2-chain)_2");
            text.push_str(&serialize_verdict(&v));
            if let Some(w) = v.witness() {
                let ok = verify_witness(&c, &b, &a, w)?;
                let _ = writeln!(text, "witness verified: {}", if ok { "yes" } else { "no" });
            }
            Ok(FixtureRun { text, positive: v.holds() })
        }
        "skew-2-1" => {
            let s = skew_embed(2, 1);
            for (from, to) in &s.map {
                let _ = writeln!(text, "{from} -> {to}");
            }
            Ok(FixtureRun { text, positive: true })
        }
        other => Err(Error::InvalidArgument(format!("unknown fixture `{other}`; known: {}", FIXTURE_NAMES.join(", ")))),
    }
}

/// Elements of `s` by label.
pub fn labelled(s: &FiniteStructure, names: &[&str]) -> Vec<Elem> {
    names.iter().map(|n| s.element_by_label(n).expect("known label")).collect()
}
