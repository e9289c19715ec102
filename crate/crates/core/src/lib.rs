//! Satisfiability of the interval logic BE over finite homogeneous
//! interval structures.
//!
//! The pipeline is: [`formula::Formula::to_homogeneous_nf`], then
//! [`normalize::normalize`] into a pair `psi & [G]xi` of depth at most two,
//! then [`automaton::decide_sat`], which returns a checked witness or a
//! refutation.

pub mod automaton;
pub mod formula;
pub mod gen;
pub mod normalize;
pub mod semantics;
pub mod types;

pub use formula::{Dag, Formula, LetterSet, Node, Signature, WorkingPair};
