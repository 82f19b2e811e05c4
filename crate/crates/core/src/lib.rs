//! Exact machinery for the canonical Ramsey theorem of Erdős and Rado.
//!
//! For every `n`-place coloring `f` of a large enough `[N]^n` there is an
//! `m`-subset `A'` and a set of positions `v ⊆ {1..n}` such that two
//! increasing tuples from `A'` get the same color exactly when they agree on
//! the positions in `v`. This crate provides:
//!
//! - [`combinatorics`]: subsets, colex ranks, the neighbor relation, beth towers;
//! - [`coloring`]: the coloring model, generators and file format;
//! - [`canonicity`]: the predicate, a pruned exhaustive oracle and exact `ER` search;
//! - [`ramification`]: the ramification tree that stabilizes the last coordinate;
//! - [`pipeline`]: the constructive canonization procedure, stage by stage;
//! - [`bounds`]: exact evaluation of the tower bounds that make every stage succeed.
//!
//! Every stage of the constructive procedure runs on inputs of any size and
//! returns either an independently verified result or a structured failure.

pub mod bounds;
pub mod canonicity;
pub mod coloring;
pub mod combinatorics;
pub mod error;
pub mod pipeline;
pub mod ramification;

pub use canonicity::{CanonicalWitness, Pattern};
pub use coloring::{Coloring, Generator, NPlace};
pub use combinatorics::SortedSubset;
pub use error::{Error, Result};
