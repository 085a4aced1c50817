//! Combinatorial decision procedures for Thurston equivalence of branched
//! covers of the sphere, built on free groups and punctured-sphere mapping
//! class groups.

pub mod freegroup;
pub mod lattice;
pub mod perm;
pub mod sphere;
pub mod mapping_class;
pub mod centralizer;
pub mod cover;
pub mod obstruction;
pub mod pipeline;
pub mod format;
