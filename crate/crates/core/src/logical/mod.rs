//! Logical layer for abelian D(G): charge and flux strings, tunnel and loop
//! operators on hole encodings, and topological charge projectors.

mod encoding;
mod monomial;
mod paths;

pub use encoding::{
    logical_algebra, matrix_record, relations, ChargeProjectorFamily, Encoding, EncodingRecord,
    HoleRecord, LogicalFrame, LogicalOperator, LogicalRecord, LogicalReport, LoopSpec,
    ProjectorRecord, ProjectorResiduals, Relation, StringOperator, LOGICAL_TOLERANCE,
};
pub use monomial::{EdgeFactor, MonomialOperator};
pub use paths::{
    dual_ring, hole_windings, primal_ring, shortest_dual, shortest_primal, DualPath, DualStep,
    PathStep, PrimalPath,
};
