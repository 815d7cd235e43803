//! u-generation in products of projective spaces: the multi-cone over a
//! curve, start points at `t = ε` from the asymptotics of the paths, and
//! the reduction of higher-dimensional witness collections to curves.

mod g0;
mod intersect;

pub use g0::{
    expected_path_count, make_g0_multi, random_g0_multi, u_multiproj_start_points, G0Variant,
    MultiStarts,
};
pub use intersect::{
    condition_at, eliminate_cone_vars, intersect_curve_multi, intersect_hypersurface_multi,
    polish_starts, CurveRun, MultiDiagnostics, MultiIntersection, MultiUGenConfig, MultiUHomotopy,
    DEFAULT_EPSILON,
};
