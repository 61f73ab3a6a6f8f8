//! Spatial model checking on finite quasi-discrete closure models.
//!
//! A quasi-discrete closure model is a finite directed graph with a
//! proposition valuation on its nodes; the edge relation is kept reflexive
//! implicitly, so every point belongs to its own minimal neighbourhood. On
//! top of that structure this crate provides:
//!
//! - the spatial logic SLCS (near, reachable-from, propagates-to, plus the
//!   derived surrounded operator) with a concrete syntax, a fixpoint model
//!   checker, and an independent walk-enumeration oracle;
//! - closure-space predicates the logic itself cannot express: T0/T1
//!   separation, connectedness, transitivity of the edge relation;
//! - four bisimulation notions (neighbourhood, modal, modal with converse,
//!   path preserving), coarsest-bisimulation computation by partition
//!   refinement, model quotienting, and constructive path lifting;
//! - a `slcs` command-line front-end over JSON model and relation files.
//!
//! The crate-level entry points are re-exported below; each module also
//! documents its own corner of the theory. The rendered guide under `book/`
//! walks through the same material with runnable examples.

pub mod bisim;
pub mod checker;
pub mod cli;
pub mod corpus;
pub mod logic;
pub mod model;
pub mod random;
#[cfg(test)]
pub(crate) mod testutil;

pub use bisim::{
    bisimilar, coarsest_bisimulation, coarsest_partition, lift_path_anchored, lift_path_forward,
    verify_path_preserving_on_walks, BisimError, Coarsest, LiftError, LiftedPathMatch,
    PointRelation, PpbViolation, Variant, Violation,
};
pub use checker::{models, oracle_sat_set, sat_set, CheckError, Walk, WalkError};
pub use logic::{parse, Formula, ParseError};
pub use model::{isomorphic, ModelError, Partition, Point, PointSet, QDModel};
