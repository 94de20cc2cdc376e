//! Quantifier-free formulas: syntax, a prefix text form, and evaluation.
//!
//! The text form is an s-expression:
//!
//! ```text
//! (and (rel <= x1 x2) (not (eq x1 (fn meet x1 x2))))
//! ```
//!
//! Variables are written `x1`, `x2`, ... and are numbered from zero in the
//! syntax tree. Constants are written `(const c)`.

use std::fmt;

use crate::error::{Error, ParseError, Result};
use crate::signature::Signature;
use crate::structure::{Elem, FiniteStructure};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(i) => Some(*i),
            Term::Const(_) => None,
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{}", i + 1),
            Term::Const(c) => write!(f, "(const {c})"),
            Term::App(name, args) => {
                write!(f, "(fn {name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(name.to_string(), args)
    }

    pub fn negate(self) -> Formula {
        match self {
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    /// Conjuncts of a top-level conjunction (the formula itself otherwise).
    pub fn conjuncts(&self) -> &[Formula] {
        match self {
            Formula::And(parts) => parts,
            other => std::slice::from_ref(other),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Rel(_, args) => args.iter().filter_map(Term::max_var).max(),
            Formula::Eq(a, b) => a.max_var().max(b.max_var()),
            Formula::Not(f) => f.max_var(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_var).max(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, parts: &[Formula]| {
            write!(f, "({head}")?;
            for p in parts {
                write!(f, " {p}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Rel(name, args) => {
                write!(f, "(rel {name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            Formula::Eq(a, b) => write!(f, "(eq {a} {b})"),
            Formula::Not(inner) => write!(f, "(not {inner})"),
            Formula::And(parts) => list(f, "and", parts),
            Formula::Or(parts) => list(f, "or", parts),
        }
    }
}

/// A quantifier-free formula together with the number of its free
/// variables `x1..x{arity}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfFormula {
    pub arity: usize,
    pub body: Formula,
}

impl QfFormula {
    /// Wraps `body`; the arity is the largest variable index used, or
    /// `arity` if that is larger.
    pub fn new(arity: usize, body: Formula) -> QfFormula {
        let used = body.max_var().map_or(0, |v| v + 1);
        QfFormula { arity: arity.max(used), body }
    }

    pub fn parse(text: &str) -> Result<QfFormula> {
        let body = parse_formula(text)?;
        Ok(QfFormula::new(0, body))
    }

    /// Resolves symbol names against `sig`.
    pub fn compile(&self, sig: &Signature) -> Result<CompiledFormula> {
        Ok(CompiledFormula { arity: self.arity, root: compile_formula(&self.body, sig)? })
    }

    pub fn eval(&self, s: &FiniteStructure, tuple: &[Elem]) -> Result<bool> {
        self.compile(s.signature())?.eval(s, tuple)
    }
}

impl fmt::Display for QfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

/// Parses a file of formulas, one per non-empty, non-comment line.
pub fn parse_formula_list(text: &str) -> Result<Vec<QfFormula>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let body = parse_formula(content).map_err(|e| match e {
            Error::Parse(p) => Error::Parse(ParseError { line: i + 1, ..p }),
            other => other,
        })?;
        out.push(QfFormula::new(0, body));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum CTerm {
    Var(usize),
    Const(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Debug, Clone)]
enum CFormula {
    Const(bool),
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
}

/// A formula resolved against a signature, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    arity: usize,
    root: CFormula,
}

fn compile_term(t: &Term, sig: &Signature) -> Result<CTerm> {
    Ok(match t {
        Term::Var(i) => CTerm::Var(*i),
        Term::Const(c) => CTerm::Const(sig.constant_index(c).ok_or_else(|| Error::UnknownSymbol(c.clone()))?),
        Term::App(name, args) => {
            let f = sig.function_index(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            let arity = sig.functions()[f].1;
            if args.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: args.len() });
            }
            CTerm::App(f, args.iter().map(|a| compile_term(a, sig)).collect::<Result<_>>()?)
        }
    })
}

fn compile_formula(f: &Formula, sig: &Signature) -> Result<CFormula> {
    Ok(match f {
        Formula::True => CFormula::Const(true),
        Formula::False => CFormula::Const(false),
        Formula::Rel(name, args) => {
            let r = sig.relation_index(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            let arity = sig.relations()[r].1;
            if args.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: args.len() });
            }
            CFormula::Rel(r, args.iter().map(|a| compile_term(a, sig)).collect::<Result<_>>()?)
        }
        Formula::Eq(a, b) => CFormula::Eq(compile_term(a, sig)?, compile_term(b, sig)?),
        Formula::Not(inner) => CFormula::Not(Box::new(compile_formula(inner, sig)?)),
        Formula::And(parts) => CFormula::And(parts.iter().map(|p| compile_formula(p, sig)).collect::<Result<_>>()?),
        Formula::Or(parts) => CFormula::Or(parts.iter().map(|p| compile_formula(p, sig)).collect::<Result<_>>()?),
    })
}

impl CompiledFormula {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, s: &FiniteStructure, tuple: &[Elem]) -> Result<bool> {
        if tuple.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: tuple.len() });
        }
        if let Some(&x) = tuple.iter().find(|&&x| x >= s.size()) {
            return Err(Error::OutOfUniverse(x));
        }
        Ok(self.eval_unchecked(s, tuple))
    }

    /// Evaluation without the arity and universe checks.
    pub fn eval_unchecked(&self, s: &FiniteStructure, tuple: &[Elem]) -> bool {
        eval_formula(&self.root, s, tuple)
    }
}

fn eval_term(t: &CTerm, s: &FiniteStructure, tuple: &[Elem]) -> Elem {
    match t {
        CTerm::Var(i) => tuple[*i],
        CTerm::Const(c) => s.constant(*c).expect("constant interpreted"),
        CTerm::App(f, args) => {
            let mut vals = [0usize; 4];
            if args.len() <= 4 {
                for (slot, a) in vals.iter_mut().zip(args) {
                    *slot = eval_term(a, s, tuple);
                }
                s.apply(*f, &vals[..args.len()])
            } else {
                let vals: Vec<Elem> = args.iter().map(|a| eval_term(a, s, tuple)).collect();
                s.apply(*f, &vals)
            }
        }
    }
}

fn eval_formula(f: &CFormula, s: &FiniteStructure, tuple: &[Elem]) -> bool {
    match f {
        CFormula::Const(b) => *b,
        CFormula::Rel(r, args) => {
            let mut vals = [0usize; 4];
            if args.len() <= 4 {
                for (slot, a) in vals.iter_mut().zip(args) {
                    *slot = eval_term(a, s, tuple);
                }
                s.holds(*r, &vals[..args.len()])
            } else {
                let vals: Vec<Elem> = args.iter().map(|a| eval_term(a, s, tuple)).collect();
                s.holds(*r, &vals)
            }
        }
        CFormula::Eq(a, b) => eval_term(a, s, tuple) == eval_term(b, s, tuple),
        CFormula::Not(inner) => !eval_formula(inner, s, tuple),
        CFormula::And(parts) => parts.iter().all(|p| eval_formula(p, s, tuple)),
        CFormula::Or(parts) => parts.iter().any(|p| eval_formula(p, s, tuple)),
    }
}

// --- parsing ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    end: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        let mut toks = Vec::new();
        let mut start: Option<usize> = None;
        for (i, ch) in text.char_indices() {
            if ch == '(' || ch == ')' || ch.is_whitespace() {
                if let Some(s) = start.take() {
                    toks.push((Tok::Atom(&text[s..i]), s + 1));
                }
                if ch == '(' {
                    toks.push((Tok::Open, i + 1));
                } else if ch == ')' {
                    toks.push((Tok::Close, i + 1));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            toks.push((Tok::Atom(&text[s..]), s + 1));
        }
        Lexer { toks, pos: 0, end: text.len() + 1 }
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse(ParseError { line: 1, column: self.column(), message: msg.into() })
    }

    fn next(&mut self) -> Result<Tok<'a>> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        match t {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next()? {
            Tok::Close => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.error("expected `)`"))
            }
        }
    }

    fn atom(&mut self) -> Result<&'a str> {
        match self.next()? {
            Tok::Atom(a) => Ok(a),
            _ => {
                self.pos -= 1;
                Err(self.error("expected a name"))
            }
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut lx = Lexer::new(text);
    let f = formula(&mut lx)?;
    if lx.peek().is_some() {
        return Err(lx.error("trailing input"));
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut lx = Lexer::new(text);
    let t = term(&mut lx)?;
    if lx.peek().is_some() {
        return Err(lx.error("trailing input"));
    }
    Ok(t)
}

fn formula(lx: &mut Lexer<'_>) -> Result<Formula> {
    match lx.next()? {
        Tok::Atom("true") => Ok(Formula::True),
        Tok::Atom("false") => Ok(Formula::False),
        Tok::Open => {
            let head = lx.atom()?;
            let f = match head {
                "rel" => {
                    let name = lx.atom()?.to_string();
                    let mut args = Vec::new();
                    while lx.peek() != Some(&Tok::Close) {
                        args.push(term(lx)?);
                    }
                    Formula::Rel(name, args)
                }
                "eq" => Formula::Eq(term(lx)?, term(lx)?),
                "not" => Formula::Not(Box::new(formula(lx)?)),
                "and" | "or" => {
                    let mut parts = Vec::new();
                    while lx.peek() != Some(&Tok::Close) {
                        parts.push(formula(lx)?);
                    }
                    if head == "and" {
                        Formula::And(parts)
                    } else {
                        Formula::Or(parts)
                    }
                }
                other => {
                    lx.pos -= 1;
                    return Err(lx.error(format!("unknown connective `{other}`")));
                }
            };
            lx.expect_close()?;
            Ok(f)
        }
        _ => {
            lx.pos -= 1;
            Err(lx.error("expected a formula"))
        }
    }
}

fn term(lx: &mut Lexer<'_>) -> Result<Term> {
    match lx.next()? {
        Tok::Atom(a) => match a.strip_prefix('x').and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 1 => Ok(Term::Var(n - 1)),
            _ => {
                lx.pos -= 1;
                Err(lx.error(format!("expected a variable `x1`, `x2`, ..., found `{a}`")))
            }
        },
        Tok::Open => {
            let head = lx.atom()?;
            let t = match head {
                "fn" => {
                    let name = lx.atom()?.to_string();
                    let mut args = Vec::new();
                    while lx.peek() != Some(&Tok::Close) {
                        args.push(term(lx)?);
                    }
                    Term::App(name, args)
                }
                "const" => Term::Const(lx.atom()?.to_string()),
                other => {
                    lx.pos -= 1;
                    return Err(lx.error(format!("unknown term former `{other}`")));
                }
            };
            lx.expect_close()?;
            Ok(t)
        }
        Tok::Close => {
            lx.pos -= 1;
            Err(lx.error("unexpected `)`"))
        }
    }
}
