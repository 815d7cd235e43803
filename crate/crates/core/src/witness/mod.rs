//! Witness sets and witness collections: construction by total-degree
//! homotopies, slice moves and membership tests.

mod ops;
mod set;
mod start;

pub use ops::{
    membership, move_slice, pooled_slice, slice_through, slice_types, total_degree_solve, witness_collection,
    witness_curve, witness_set, Membership, Moved, Solved,
};
pub use set::{relative_residual, CollectionEntry, WitnessCollection, WitnessFile, WitnessSet, WITNESS_TOL};
pub use start::{multihomogeneous_bezout, total_degree_start, StartSystem};
pub(crate) use set::{group_names, homogenizer_names, ring_from_names};
pub(crate) use start::null_vector;
