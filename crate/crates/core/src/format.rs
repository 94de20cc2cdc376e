//! The line-oriented text format for structures.
//!
//! ```text
//! # comments run to the end of the line
//! signature:
//! rel <= 2
//! fun meet 2
//! const root
//! order <lex
//! universe 3
//! labels
//! 0 ()
//! table <=
//! 0 0
//! table meet
//! 0 1 0
//! table root
//! 0
//! ```
//!
//! Function rows list the input tuple followed by the value; a constant's
//! block holds a single row with its element. [`serialize_structure`] always
//! emits the canonical layout (relations, functions, constants, order, then
//! every table in signature order with rows sorted), so serializing a parsed
//! canonical file reproduces it byte for byte.

use std::fmt::Write as _;

use crate::error::{ParseError, Result};
use crate::signature::{Signature, Symbol};
use crate::structure::{Elem, FiniteStructure};

pub fn serialize_structure(s: &FiniteStructure) -> String {
    let sig = s.signature();
    let mut out = String::from("signature:\n");
    for (name, arity) in sig.relations() {
        let _ = writeln!(out, "rel {name} {arity}");
    }
    for (name, arity) in sig.functions() {
        let _ = writeln!(out, "fun {name} {arity}");
    }
    for name in sig.constants() {
        let _ = writeln!(out, "const {name}");
    }
    if let Some(o) = sig.order_name() {
        let _ = writeln!(out, "order {o}");
    }
    let _ = writeln!(out, "universe {}", s.size());
    if let Some(labels) = s.labels() {
        out.push_str("labels\n");
        for (e, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "{e} {l}");
        }
    }
    let join = |t: &[Elem]| t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for (r, (name, _)) in sig.relations().iter().enumerate() {
        let _ = writeln!(out, "table {name}");
        for t in s.relation_tuples(r) {
            out.push_str(&join(t));
            out.push('\n');
        }
    }
    for (f, (name, _)) in sig.functions().iter().enumerate() {
        let _ = writeln!(out, "table {name}");
        for (args, v) in s.function_entries(f) {
            let _ = writeln!(out, "{} {v}", join(args));
        }
    }
    for (c, name) in sig.constants().iter().enumerate() {
        let _ = writeln!(out, "table {name}");
        if let Some(v) = s.constant(c) {
            let _ = writeln!(out, "{v}");
        }
    }
    out
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &content[s..i], column: s + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &content[s..], column: s + 1 });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn number(tok: &Token<'_>, line: usize) -> Result<usize, ParseError> {
    tok.text.parse().map_err(|_| err(line, tok.column, format!("expected a natural number, found `{}`", tok.text)))
}

enum Block {
    Labels,
    Table(Symbol),
}

pub fn parse_structure(text: &str) -> Result<FiniteStructure> {
    let mut relations = Vec::new();
    let mut functions = Vec::new();
    let mut constants = Vec::new();
    let mut order: Option<(String, usize, usize)> = None;
    let mut builder = None;
    let mut labels: Option<Vec<Option<String>>> = None;
    let mut block: Option<Block> = None;
    let mut saw_header = false;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        last_line = ln;
        let toks = tokens(raw);
        let Some(first) = toks.first() else { continue };
        if !saw_header {
            if first.text != "signature:" || toks.len() != 1 {
                return Err(err(ln, first.column, "expected `signature:`").into());
            }
            saw_header = true;
            continue;
        }
        let Some(b) = builder.as_mut() else {
            match first.text {
                "rel" | "fun" => {
                    if toks.len() != 3 {
                        return Err(err(ln, first.column, "expected `<kind> <name> <arity>`").into());
                    }
                    let arity = number(&toks[2], ln)?;
                    let entry = (toks[1].text.to_string(), arity);
                    if first.text == "rel" {
                        relations.push(entry)
                    } else {
                        functions.push(entry)
                    }
                }
                "const" => {
                    if toks.len() != 2 {
                        return Err(err(ln, first.column, "expected `const <name>`").into());
                    }
                    constants.push(toks[1].text.to_string());
                }
                "order" => {
                    if toks.len() != 2 {
                        return Err(err(ln, first.column, "expected `order <relation>`").into());
                    }
                    order = Some((toks[1].text.to_string(), ln, toks[1].column));
                }
                "universe" => {
                    if toks.len() != 2 {
                        return Err(err(ln, first.column, "expected `universe <n>`").into());
                    }
                    let n = number(&toks[1], ln)?;
                    let sig = Signature::new(
                        std::mem::take(&mut relations),
                        std::mem::take(&mut functions),
                        std::mem::take(&mut constants),
                        order.as_ref().map(|o| o.0.as_str()),
                    )
                    .map_err(|e| {
                        let (l, c) = order.as_ref().map_or((ln, 1), |o| (o.1, o.2));
                        err(l, c, e.to_string())
                    })?;
                    builder = Some(FiniteStructure::builder(sig, n));
                }
                other => return Err(err(ln, first.column, format!("unexpected `{other}` in signature")).into()),
            }
            continue;
        };
        match first.text {
            "labels" if toks.len() == 1 => {
                let n = b.size();
                labels = Some(vec![None; n]);
                block = Some(Block::Labels);
            }
            "table" => {
                if toks.len() != 2 {
                    return Err(err(ln, first.column, "expected `table <symbol>`").into());
                }
                let sym = b
                    .signature()
                    .lookup(toks[1].text)
                    .ok_or_else(|| err(ln, toks[1].column, format!("unknown symbol `{}`", toks[1].text)))?;
                block = Some(Block::Table(sym));
            }
            _ => match &block {
                None => return Err(err(ln, first.column, "row outside of a block").into()),
                Some(Block::Labels) => {
                    if toks.len() != 2 {
                        return Err(err(ln, first.column, "expected `<element> <label>`").into());
                    }
                    let e = number(&toks[0], ln)?;
                    let slots = labels.as_mut().expect("labels block open");
                    if e >= slots.len() {
                        return Err(err(ln, toks[0].column, "label for an element outside the universe").into());
                    }
                    slots[e] = Some(toks[1].text.to_string());
                }
                Some(Block::Table(sym)) => {
                    let row = toks.iter().map(|t| number(t, ln)).collect::<Result<Vec<_>, _>>()?;
                    let sig = b.signature();
                    let expected = match *sym {
                        Symbol::Relation(r) => sig.relations()[r].1,
                        Symbol::Function(f) => sig.functions()[f].1 + 1,
                        Symbol::Constant(_) => 1,
                    };
                    if row.len() != expected {
                        return Err(err(
                            ln,
                            first.column,
                            format!("row has {} entries, expected {expected}", row.len()),
                        )
                        .into());
                    }
                    match *sym {
                        Symbol::Relation(r) => {
                            b.relation_at(r, &row).expect("arity checked");
                        }
                        Symbol::Function(f) => {
                            let (args, v) = row.split_at(row.len() - 1);
                            b.function_at(f, args, v[0]).expect("arity checked");
                        }
                        Symbol::Constant(c) => {
                            let name = sig.constants()[c].clone();
                            b.constant(&name, row[0]).expect("known constant");
                        }
                    }
                }
            },
        }
    }
    let Some(mut b) = builder else {
        return Err(err(last_line.max(1), 1, "missing `universe` line").into());
    };
    if let Some(slots) = labels {
        let all: Option<Vec<String>> = slots.into_iter().collect();
        match all {
            Some(l) => {
                b.labels(l);
            }
            None => return Err(err(last_line, 1, "label table does not cover the universe").into()),
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    const FAN: &str = "\
signature:
rel <= 2
rel <lex 2
order <lex
universe 3
labels
0 a0
1 a1
2 a2
table <=
0 0
0 1
0 2
1 1
2 2
table <lex
0 1
0 2
1 2
";

    #[test]
    fn canonical_text_round_trips_bit_exact() {
        let s = parse_structure(FAN).unwrap();
        assert!(s.is_valid());
        assert_eq!(serialize_structure(&s), FAN);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# a fan\n\n{}", FAN.replace("table <=\n", "table <=   # tree order\n"));
        assert_eq!(parse_structure(&text).unwrap(), parse_structure(FAN).unwrap());
    }

    #[test]
    fn malformed_arity_is_a_parse_error() {
        let bad = FAN.replace("0 1\n0 2\n1 2\n", "0 1\n0 2 1\n");
        match parse_structure(&bad) {
            Err(Error::Parse(p)) => assert_eq!(p.line, 18),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_symbol_reports_column() {
        let bad = FAN.replace("table <lex", "table  nope");
        match parse_structure(&bad) {
            Err(Error::Parse(p)) => assert_eq!((p.line, p.column), (16, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn functions_and_constants() {
        let text = "\
signature:
fun f 1
const c
universe 2
table f
0 1
1 1
table c
1
";
        let s = parse_structure(text).unwrap();
        assert_eq!(s.apply(0, &[0]), 1);
        assert_eq!(s.constant(0), Some(1));
        assert_eq!(serialize_structure(&s), text);
    }
}
