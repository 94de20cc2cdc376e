use std::fmt;

use thiserror::Error;

use crate::structure::Violation;

/// Location-carrying error produced by the text parsers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("structure has no designated linear order")]
    NoOrder,
    #[error("tuple is not strictly increasing in the designated order")]
    NotIncreasing,
    #[error("signatures do not match")]
    SignatureMismatch,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("element {0} lies outside the universe")]
    OutOfUniverse(usize),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidStructure(Vec<Violation>),
    #[error("node set is not closed under meet")]
    MeetNotClosed,
    #[error("structure is not a tree of the expected dialect: {0}")]
    NotATree(String),
    #[error("structure uses level {level}, which exceeds m = {m}")]
    LevelExceedsM { level: usize, m: usize },
    #[error("structure does not embed into any finite full tree of height {m}")]
    NotInAge { m: usize },
    #[error("tuple lengths differ within a family")]
    LengthMismatch,
    #[error("type is not realized in the index structure")]
    TypeNotRealized,
    #[error("no homogeneous copy exists in the finite index")]
    NoHomogeneousCopy,
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable, module-qualified code used by the command-line reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "structures.parse",
            Error::NoOrder => "structures.no-order",
            Error::NotIncreasing => "structures.not-increasing",
            Error::SignatureMismatch => "structures.signature-mismatch",
            Error::ArityMismatch { .. } => "logic.arity-mismatch",
            Error::OutOfUniverse(_) => "structures.out-of-universe",
            Error::UnknownSymbol(_) => "logic.unknown-symbol",
            Error::InvalidSignature(_) => "structures.invalid-signature",
            Error::InvalidStructure(_) => "structures.invalid",
            Error::MeetNotClosed => "trees.meet-not-closed",
            Error::NotATree(_) => "trees.not-a-tree",
            Error::LevelExceedsM { .. } => "trees.level-exceeds-m",
            Error::NotInAge { .. } => "trees.not-in-age",
            Error::LengthMismatch => "logic.length-mismatch",
            Error::TypeNotRealized => "homogenizer.type-not-realized",
            Error::NoHomogeneousCopy => "homogenizer.no-homogeneous-copy",
            Error::BudgetExceeded { .. } => "ramsey.budget-exceeded",
            Error::InvalidArgument(_) => "cli.invalid-argument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
