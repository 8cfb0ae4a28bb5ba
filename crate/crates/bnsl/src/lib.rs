//! Exact solvers for score-based Bayesian network structure learning under
//! sparsity constraints on the learned DAG or on its moralized graph.
//!
//! Given per-vertex local scores in non-zero representation, the crate
//! answers whether an acyclic arc set of total score at least `t` exists
//! whose moralized graph (or DAG) satisfies a sparsity constraint with
//! budget `k`, and returns an optimal witness:
//!
//! - [`dissociation::solve_pi1v`] — the moralized graph becomes a graph of
//!   maximum degree one after deleting at most `k` vertices. Enumerates
//!   dissociation-set candidates and ancestor tuples, then completes each
//!   choice optimally through a maximum weight matching.
//! - [`arc_bounded::solve_ba_topological`] — at most `k` arcs, superstructure
//!   acyclic: dynamic program over a topological order.
//! - [`arc_bounded::solve_ba_color_coding`] — at most `k` arcs in general:
//!   randomized color coding with a subset DP over color classes.
//! - [`arc_bounded::solve_pi0e`] — at most `k` edges in the moralized graph:
//!   brute force over superstructure arc subsets.
//! - [`oracle::oracle_solve`] — exhaustive reference solver for every
//!   variant at tiny scale; the ground truth the others are tested against.
//!
//! [`generators`] builds instances with known yes/no status from graphs via
//! the hardness reductions, plus seeded random instances. [`cli`] exposes
//! everything as a command-line tool over plain text file formats.
//!
//! The `book/` directory of the repository walks through the concepts with
//! runnable examples; its code blocks compile and run as doc-tests.

pub mod arc_bounded;
pub mod cli;
pub mod dissociation;
pub mod generators;
pub mod graphs;
pub mod matching;
pub mod oracle;
pub mod scores;
pub mod solve;

pub use graphs::{ArcSet, ClassSpec, DeletionMode, Graph, MoralGraph, PiClass};
pub use scores::{Instance, ParentScoreTable, ParentSet, Score, VertexId};
pub use solve::{ConstraintWitness, SolveResult, Telemetry};

// The guide's code blocks double as doc-tests, so `cargo test --doc` keeps
// the book in sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/moral_graphs.md")]
    mod moral_graphs {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/dissociation.md")]
    mod dissociation {}
    #[doc = include_str!("../../../book/src/arc_bounded.md")]
    mod arc_bounded {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
