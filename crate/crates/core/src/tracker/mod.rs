//! Path tracking: homotopies, predictor-corrector continuation, endpoint
//! normalization, classification and deduplication.

mod homotopy;
mod path;
mod point;
mod stats;

pub use homotopy::{
    make_straight_line, make_straight_line_factored, random_charts, Eliminated, Homotopy, StraightLine, Workspace};
pub use path::{
    condition_number, newton, track_batch, track_batch_switching, track_path,
    track_path_switching, track_segment, PathResult, PathStatus, Segment, TrackerSettings,
};
pub use point::{
    chordal_distance, chordal_factor, classify_endpoint, dedup_endpoints, project_out, CoordRule,
    Deduped, FiniteCriterion, DEDUP_TOL, FiniteWhen, MultiProjPoint, Verdict,
};
pub use stats::PathStats;
