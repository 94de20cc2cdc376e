//! The book's chapters, one module each, so that `cargo test --doc` runs
//! every code listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/structures.md")]
pub mod structures {}
#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}
#[doc = include_str!("../../../book/src/types.md")]
pub mod types {}
#[doc = include_str!("../../../book/src/arrows.md")]
pub mod arrows {}
#[doc = include_str!("../../../book/src/amalgamation.md")]
pub mod amalgamation {}
#[doc = include_str!("../../../book/src/homogenization.md")]
pub mod homogenization {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
