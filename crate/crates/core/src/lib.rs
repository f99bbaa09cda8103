//! Compiler for graph constraints attached to propositional formulas.
//!
//! A formula may designate some of its variables as arc indicators of a
//! directed graph. This crate compiles constraints on the graph induced by
//! the true arc variables — acyclicity, s-t-reachability, s-t-unreachability
//! and s-t-eventual-reachability — into plain CNF clauses, so any SAT solver
//! can enforce them.
//!
//! The main encodings are based on vertex elimination graphs, which stay
//! small when the underlying graph is sparse. Classical baselines (transitive
//! closure, tree reduction, explicit layered reachability) are provided for
//! comparison. The crate also ships a GCNF file format for annotated
//! instances, a small complete CDCL solver, model verification oracles, and
//! benchmark instance generators.

pub mod bench;
pub mod encode;
pub mod formula;
pub mod graph;
pub mod oracle;
pub mod solver;

pub use encode::{encode_instance, EncodePlan, Method, OrderChoice};
pub use formula::{Cnf, ConstraintKind, EncodedFormula, GraphConstraint, GraphInstance};
pub use graph::{DirectedGraph, EliminationOrdering, EliminationResult};
pub use oracle::{Model, VerificationReport};
pub use solver::{solve, SolveResult, SolveStatus};
