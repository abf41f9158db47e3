pub mod error;
pub mod group;
pub mod character;
pub mod classify;
pub mod lattice;
pub mod logical;
