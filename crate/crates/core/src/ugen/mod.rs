//! u-generation in one projective space: the structured start hypersurface
//! `g₀`, the homotopy on the cone over a curve, elimination of `u`, and the
//! equation-by-equation cascade.

mod cascade;
mod g0;
mod intersect;

pub use cascade::{
    ambient_witness_set, cascade, eliminate_redundant, CascadeConfig, CascadeResult, Pruned,
    RoundDiagnostics,
};
pub use g0::{cone_ring, make_g0, u_start_points};
pub use intersect::{
    eliminate_u, intersect_hypersurface, G0Choice, IntersectDiagnostics, Intersection, UElimination,
    UGenConfig, UHomotopy, DEFAULT_ROUNDS, DEFAULT_T_STAR,
};
pub(crate) use g0::{roots_in, to_cone};
pub(crate) use intersect::{
    collect, reduce_to_curve, run_rounds, split_by, square_up,
};
