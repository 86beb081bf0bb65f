//! Exact combinatorics for equivariant models of spherical homogeneous
//! spaces over non-closed fields: homogeneous spherical data, their
//! automorphism groups, the Galois `*`-action on the combinatorial
//! invariants, model counting through Galois cohomology, and colored fans.

pub mod automorphisms;
pub mod cli;
pub mod cohomology;
pub mod error;
pub mod exact;
pub mod fans;
pub mod fixtures;
pub mod galois;
pub mod lattice;
pub mod perm;
pub mod sphericaldata;

pub use error::{Error, Result};
