//! Library behind the `licheck` tool: detects the open-source licenses of a
//! Java project's modules and dependencies, checks every module→library and
//! parent→submodule edge against a compatibility matrix, and suggests a
//! project license compatible with everything in use.
//!
//! The pieces compose in pipeline order: [`corpus`] holds the sixteen
//! supported licenses with their canonical texts and the matrix; [`detector`]
//! maps arbitrary text to a license id (classifier first, word-overlap
//! fallback); [`scanner`] discovers the module tree and each module's
//! declared license; [`resolver`] finds out what the dependencies are under;
//! [`compat`] turns the assembled tree into violations and suggestions.

pub mod buildfiles;
pub mod compat;
pub mod corpus;
pub mod detector;
pub mod error;
pub mod resolver;
pub mod scanner;

pub use error::{Error, Result};
