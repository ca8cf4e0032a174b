//! Exact toolkit for prize-collecting TSP (PCTSP).
//!
//! Given a complete metric graph with a root, edge costs, and per-vertex
//! penalties, the task is to pick a cycle through the root minimizing cycle
//! cost plus the penalties of skipped vertices. This crate implements an
//! LP-relative approximation pipeline with exact rational arithmetic:
//!
//! 1. [`lp`] solves the natural relaxation by exact simplex plus cutting
//!    planes separated with max-flow.
//! 2. [`splitting`] removes low-value vertices from the fractional solution
//!    by admissible splitting-off moves that keep every cut constraint.
//! 3. [`decompose`] rewrites the fractional solution as a convex combination
//!    of root-containing trees dominated by the edge values.
//! 4. [`parity`] prunes each tree to threshold cores, fixes parity with a
//!    minimum matching, and shortcuts an Eulerian walk to a cycle; it also
//!    builds join-dominance certificates for the matching-cost bound.
//! 5. [`solver`] ties the pipeline together, enumerates candidate thresholds,
//!    and reports the best tour alongside the LP value.
//! 6. [`oracle`] provides brute-force cross-checks (exact optimum for small
//!    instances, exhaustive cut verification).
//! 7. [`constants`] evaluates the closed-form guarantee factors of the
//!    pipeline, with certified grid maximization where needed.
//!
//! Every runnable capability has a program under `examples/`; start with
//! `cargo run -p pctsp --example end_to_end_solve`. A thin CLI with the same
//! functionality lives in the `pctsp` binary.

pub mod constants;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod maxflow;
pub mod oracle;
pub mod parity;
pub mod rational;
pub mod simplex;
pub mod solver;
pub mod splitting;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use instance::{generate_euclidean, load_instance, solution_cost, PctspInstance, Tour};
pub use lp::{solve_relaxation, FractionalSolution};
pub use rational::Rat;
