//! Signatures: the symbols a structure interprets.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A symbol of a signature, resolved to its position in the symbol list of
/// its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Relation(usize),
    Function(usize),
    Constant(usize),
}

/// A finite first-order signature.
///
/// Relations and functions carry arities; `order` optionally designates one
/// binary relation as the linear order of every structure over this
/// signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Signature {
    relations: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
    constants: Vec<String>,
    order: Option<usize>,
}

impl Signature {
    pub fn new(
        relations: Vec<(String, usize)>,
        functions: Vec<(String, usize)>,
        constants: Vec<String>,
        order: Option<&str>,
    ) -> Result<Signature> {
        let mut seen = HashSet::new();
        let names = relations.iter().map(|(n, _)| n).chain(functions.iter().map(|(n, _)| n)).chain(constants.iter());
        for name in names {
            if name.is_empty() || name.starts_with('#') || name.contains(char::is_whitespace) {
                return Err(Error::InvalidSignature(format!("bad symbol name `{name}`")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidSignature(format!("duplicate symbol `{name}`")));
            }
        }
        if let Some((name, _)) = relations.iter().chain(functions.iter()).find(|(_, a)| *a == 0) {
            return Err(Error::InvalidSignature(format!("symbol `{name}` has arity 0")));
        }
        let order = match order {
            None => None,
            Some(o) => match relations.iter().position(|(n, _)| n == o) {
                Some(i) if relations[i].1 == 2 => Some(i),
                Some(_) => return Err(Error::InvalidSignature(format!("order `{o}` is not binary"))),
                None => return Err(Error::InvalidSignature(format!("order `{o}` is not a relation"))),
            },
        };
        Ok(Signature { relations, functions, constants, order })
    }

    /// Shorthand for a purely relational signature.
    pub fn relational(relations: &[(&str, usize)], order: Option<&str>) -> Result<Signature> {
        Signature::new(relations.iter().map(|(n, a)| (n.to_string(), *a)).collect(), Vec::new(), Vec::new(), order)
    }

    pub fn into_shared(self) -> Arc<Signature> {
        Arc::new(self)
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    /// Index of the designated order relation, if any.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn order_name(&self) -> Option<&str> {
        self.order.map(|i| self.relations[i].0.as_str())
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|(n, _)| n == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|n| n == name)
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.relation_index(name)
            .map(Symbol::Relation)
            .or_else(|| self.function_index(name).map(Symbol::Function))
            .or_else(|| self.constant_index(name).map(Symbol::Constant))
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.relations.iter().all(|(n, a)| other.relation_index(n).map(|i| other.relations[i].1) == Some(*a))
            && self.functions.iter().all(|(n, a)| other.function_index(n).map(|i| other.functions[i].1) == Some(*a))
            && self.constants.iter().all(|n| other.constant_index(n).is_some())
    }
}
