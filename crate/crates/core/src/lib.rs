//! Finite model theory and Ramsey combinatorics on ordered, locally finite
//! structures.

pub mod amalgam;
pub mod closure;
pub mod error;
pub mod fill;
pub mod fixtures;
pub mod format;
pub mod formula;
pub mod homogenize;
pub mod indiscernible;
pub mod iso;
pub mod ramsey;
pub mod signature;
pub mod skew;
pub mod structure;
pub mod tree;
pub mod types;

pub use amalgam::{check_amalgamation, kt_membership, refute_tree_amalgam, StructureClass};
pub use closure::{cl, closure_set, generated_substructure, Copy};
pub use error::{Error, ParseError, Result};
pub use fill::{expand_to_ls, extract_s, fill_m, in_kmu};
pub use format::{parse_structure, serialize_structure};
pub use formula::{CompiledFormula, Formula, QfFormula, Term};
pub use homogenize::{encode_coloring_as_structure, homogenize, sigma_eta, HomogenizationRequest};
pub use indiscernible::{em_pattern, ind_fragment, is_indiscernible, locally_based_check, IndexedFamily};
pub use iso::{age_up_to, canonical_form, enumerate_copies, enumerate_embeddings, find_isomorphism, Embedding};
pub use ramsey::{arrow_holds, find_homogeneous, ArrowVerdict, Coloring};
pub use signature::{Signature, Symbol};
pub use structure::{Elem, FiniteStructure, StructureBuilder, Violation, ViolationKind};
pub use tree::{build_tree, Dialect, TreeNode, TreeStructure};
pub use types::{isolating_formula, qf_type, QfType};
