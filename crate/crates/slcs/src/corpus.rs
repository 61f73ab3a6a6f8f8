//! Bundled example models and relations.
//!
//! The same JSON files ship under `fixtures/` at the repository root so the
//! CLI examples in the guide can be run verbatim; here they are embedded so
//! library users and tests get them without touching the filesystem.
//!
//! The two `fig1` models are T0-distinguishable cycles (the second doubles
//! one point), the two `fig2` models are a 2-cycle and its unrolled 4-cycle,
//! and the `sec4` pair is the minimal example separating modal bisimilarity
//! from its converse variant.

use crate::model::QDModel;

pub const FIG1_M1_JSON: &str = include_str!("../../../fixtures/fig1_m1.json");
pub const FIG1_M2_JSON: &str = include_str!("../../../fixtures/fig1_m2.json");
pub const FIG2_MTOP_JSON: &str = include_str!("../../../fixtures/fig2_mtop.json");
pub const FIG2_MSQ_JSON: &str = include_str!("../../../fixtures/fig2_msq.json");
pub const SEC4_M1_JSON: &str = include_str!("../../../fixtures/sec4_m1.json");
pub const SEC4_M2_JSON: &str = include_str!("../../../fixtures/sec4_m2.json");

/// Relation pairing each point of the three-cycle with its counterparts in
/// the doubled cycle; a modal bisimulation with converse.
pub const FIG1_RELATION_JSON: &str = include_str!("../../../fixtures/fig1_relation.json");
/// Relation between the 2-cycle and the 4-cycle matching points of equal
/// parity; a modal bisimulation with converse.
pub const FIG2_RELATION_JSON: &str = include_str!("../../../fixtures/fig2_relation.json");
/// The single-pair relation that is a modal bisimulation but not a converse
/// one.
pub const SEC4_RELATION_JSON: &str = include_str!("../../../fixtures/sec4_relation.json");

fn parse(text: &str) -> QDModel {
    let loaded = QDModel::from_json(text).expect("bundled fixture parses");
    debug_assert!(loaded.warnings.is_empty());
    loaded.model
}

/// Three-point cycle `x0 -> x1 -> x2 -> x0` with propositions p0, p1, p2.
pub fn fig1_m1() -> QDModel {
    parse(FIG1_M1_JSON)
}

/// The same cycle with `y0` doubled into mutually adjacent `y0`, `y0'`.
pub fn fig1_m2() -> QDModel {
    parse(FIG1_M2_JSON)
}

/// Two-point cycle `x0 <-> x1`; its reflexive edge relation is transitive.
pub fn fig2_mtop() -> QDModel {
    parse(FIG2_MTOP_JSON)
}

/// Four-point cycle alternating p0/p1; not transitive.
pub fn fig2_msq() -> QDModel {
    parse(FIG2_MSQ_JSON)
}

/// A single point satisfying p.
pub fn sec4_m1() -> QDModel {
    parse(SEC4_M1_JSON)
}

/// Two points `y1 -> y2` with q at the source and p at the target.
pub fn sec4_m2() -> QDModel {
    parse(SEC4_M2_JSON)
}
