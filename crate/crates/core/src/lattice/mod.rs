//! Quantum-double lattice Hamiltonians with gapped boundaries: geometry,
//! projector terms, commutation audit and ground-space dimension.

mod audit;
mod gauge;
mod geometry;
mod gsd;
mod terms;

pub use audit::{
    audit_commutation, commutator_norm, projector_defects, AuditReport, CommutatorFinding,
    ProjectorFinding, COMMUTATOR_TOLERANCE, LOCAL_LIMIT,
};
pub use gauge::GaugeReduction;
pub use geometry::{
    CycleStep, Edge, End, Face, Hole, HoleSpec, Lattice, LatticeSpec, Plaquette, Topology, Vertex,
};
pub use gsd::{
    counting_method, dense_method, ground_space_dimension, trace_method, GroundSpace, GsdMethod,
    DENSE_LIMIT, EIGENVECTOR_TOLERANCE, TRACE_LIMIT,
};
pub use terms::{
    build_boundary_terms, build_terms, hamiltonian_terms, holonomy, literal_edge_term,
    RimEdgeGauge, Side, Term, TermKind, TermOp, TermSet,
};
