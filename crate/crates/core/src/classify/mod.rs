//! Classification of D(G) data: bulk anyons, gapped boundaries, boundary
//! excitations and defects, condensation multiplicities, qudit dimensions,
//! abelian modular data and the action of group automorphisms on labels.
//!
//! Every list-producing function re-asserts its dimension sum rule before
//! returning.

mod abelian;
mod anyons;
mod boundary;
mod symmetry;

pub use abelian::{abelian_data, AbelianData, Branch};
pub use anyons::{classify_anyons, AnyonLabel, AnyonModel};
pub use boundary::{
    boundary_defects, boundary_excitations, lagrangian_algebra, qudit_dimension,
    BoundaryExcitationLabel, BoundaryType, DefectLabel, LagrangianAlgebra, QuditDimension,
};
pub use symmetry::{symmetry_action, SymmetryAction};
/// Rounds to 12 decimals and normalizes `-0.0`, for stable serialized floats.
pub use anyons::clean as clean_float;

/// Absolute tolerance for the floating-point dimension sum rules.
pub const SUM_RULE_TOLERANCE: f64 = 1e-9;
