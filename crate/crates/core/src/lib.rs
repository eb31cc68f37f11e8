//! Monadic datalog and monadic second-order logic over unranked labeled trees.
//!
//! The crate covers:
//!
//! * [`tree`] and [`structure`]: Σ-labeled trees (ordered or unordered) and
//!   their relational encodings under the usual tree schemas;
//! * [`datalog`]: monadic datalog programs with least-fixpoint semantics;
//! * [`mso`]: MSO formulas and their direct evaluation on finite structures;
//! * [`translate`]: datalog to Π₁-MSO, elimination of derived axes, and the
//!   unordered-to-ordered transfer;
//! * [`automata`]: bottom-up tree automata over first-child/next-sibling
//!   encodings, compiled from MSO;
//! * [`decide`]: containment, equivalence and satisfiability of unary queries,
//!   plus a bounded enumeration oracle.

pub mod automata;
pub mod datalog;
pub mod decide;
#[cfg(test)]
mod fixtures;
pub mod mso;
pub mod structure;
pub mod translate;
pub mod tree;

pub use structure::{build_structure, Axis, Fact, FactSet, Schema, Structure, StructureError};
pub use tree::{enumerate_trees, Alphabet, Label, LabeledTree, NodeId, TreeError};
