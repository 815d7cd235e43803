use serde::{Deserialize, Serialize};

use super::path::{PathResult, PathStatus};

/// Path counts by outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub paths: usize,
    pub successes: usize,
    pub at_infinity: usize,
    pub singular: usize,
    pub failures: usize,
}

impl PathStats {
    pub fn of(results: &[PathResult]) -> Self {
        let mut s = PathStats::default();
        for r in results {
            s.record(r.status);
        }
        s
    }

    pub fn record(&mut self, status: PathStatus) {
        self.paths += 1;
        match status {
            PathStatus::Success => self.successes += 1,
            PathStatus::AtInfinity => self.at_infinity += 1,
            PathStatus::Singular => self.singular += 1,
            PathStatus::MinStepFailure | PathStatus::MaxStepsExceeded => self.failures += 1,
        }
    }

    pub fn merge(&mut self, other: &PathStats) {
        self.paths += other.paths;
        self.successes += other.successes;
        self.at_infinity += other.at_infinity;
        self.singular += other.singular;
        self.failures += other.failures;
    }
}
