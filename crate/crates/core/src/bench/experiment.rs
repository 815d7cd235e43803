use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::PolySystem;
use crate::error::{Error, Result};
use crate::multiproj::{intersect_hypersurface_multi, MultiDiagnostics, MultiUGenConfig, DEFAULT_EPSILON};
use crate::regen::regen_intersect;
use crate::rng;
use crate::tracker::{classify_endpoint, FiniteCriterion, MultiProjPoint, PathStats, TrackerSettings};
use crate::ugen::{intersect_hypersurface, UElimination, UGenConfig};
use crate::witness::{witness_collection, witness_curve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ugen,
    Regen,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ugen => "ugen",
            Method::Regen => "regen",
        })
    }
}

/// Counts of one intersection run. Singular endpoints count as failures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub system: String,
    pub method: Method,
    pub paths_prep: usize,
    pub paths_main: usize,
    pub successes: usize,
    pub at_infinity: usize,
    pub failures: usize,
    pub distinct_solutions: usize,
    /// Seconds, curve witness set excluded.
    pub wall_time: f64,
    pub seed: u64,
}

impl BenchReport {
    /// Whether every tracked path is accounted for.
    pub fn is_consistent(&self) -> bool {
        self.paths_prep + self.paths_main == self.successes + self.at_infinity + self.failures
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Settings of the intersection step; its seed drives all randomness.
    pub settings: TrackerSettings,
    /// Settings of the curve witness computation.
    pub curve_settings: TrackerSettings,
    /// Start offset of the multiprojective homotopy.
    pub epsilon: f64,
    pub eliminate: Option<(UElimination, f64)>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            settings: TrackerSettings::default(),
            curve_settings: TrackerSettings::default(),
            epsilon: DEFAULT_EPSILON,
            eliminate: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub report: BenchReport,
    /// The system that was solved, homogenized if the input was affine.
    pub system: PolySystem,
    /// Deduplicated endpoints, finite ones first.
    pub solutions: Vec<MultiProjPoint>,
    /// Number of leading entries of `solutions` that are finite.
    pub finite: usize,
    /// Endpoint statuses of all intersection paths.
    pub stats: PathStats,
    pub curve_stats: PathStats,
    /// Per-curve accounting of a multiprojective run, empty otherwise.
    pub multi: Vec<MultiDiagnostics>,
}

/// The system as a square projective system: returned unchanged when it is
/// already homogeneous with one equation per projective dimension,
/// homogenized otherwise.
pub fn projectivize(f: &PolySystem) -> Result<PolySystem> {
    let dims: usize = f.ring().factor_dims().iter().sum();
    if f.is_homogeneous() && f.len() == dims {
        return Ok(f.clone());
    }
    let h = f.homogenize()?;
    let dims: usize = h.ring().factor_dims().iter().sum();
    if h.len() != dims {
        return Err(Error::NotSquare {
            equations: h.len(),
            charts: h.ring().ngroups(),
            variables: h.ring().nvars(),
        });
    }
    Ok(h)
}

/// Drops equation `which_eq` of the (projectivized) system, computes a
/// witness set of the remaining curve by a total-degree homotopy and
/// intersects it with the dropped hypersurface by `method`.
pub fn run_dropped_equation_experiment(
    name: &str,
    system: &PolySystem,
    which_eq: usize,
    method: Method,
    cfg: &ExperimentConfig,
) -> Result<Experiment> {
    let f = projectivize(system)?;
    let (rest, g1) = f.without(which_eq)?;
    let ring = f.ring().clone();
    let seed = cfg.settings.seed;
    let mut r = rng::stream(seed, 0);
    let criterion = FiniteCriterion::from_ring(&ring);
    let threshold = cfg.settings.infinity_threshold;

    let (report_stats, prep_paths, main_paths, points, curve_stats, elapsed);
    let mut multi = Vec::new();
    if ring.ngroups() == 1 {
        let (w, st) = witness_curve(&rest, &cfg.curve_settings, &mut r)
            .map_err(|e| e.context("curve witness set"))?;
        curve_stats = st;
        let t = Instant::now();
        let res = match method {
            Method::Ugen => {
                let ucfg = UGenConfig {
                    settings: cfg.settings.clone(),
                    eliminate: cfg.eliminate,
                    ..Default::default()
                };
                intersect_hypersurface(&w, &g1, &ucfg, &mut r)?
            }
            Method::Regen => regen_intersect(&w, &g1, &cfg.settings, &mut r)?,
        };
        elapsed = t.elapsed();
        let d = &res.diagnostics;
        let mut stats = d.prep_stats;
        stats.merge(&d.stats);
        report_stats = stats;
        prep_paths = d.prep_paths;
        main_paths = d.paths;
        points = res.lower.map(|l| l.points().to_vec()).unwrap_or_default();
    } else {
        if method == Method::Regen {
            return Err(Error::InvalidArgument(
                "regeneration is implemented for one projective space only".into(),
            ));
        }
        let (wc, st) = witness_collection(&rest, 1, &cfg.curve_settings, &mut r)
            .map_err(|e| e.context("curve witness collection"))?;
        curve_stats = st;
        let mcfg = MultiUGenConfig {
            settings: cfg.settings.clone(),
            epsilon: cfg.epsilon,
            eliminate: cfg.eliminate,
            ..Default::default()
        };
        let t = Instant::now();
        let res = intersect_hypersurface_multi(&wc, &g1, &mcfg, &mut r)?;
        elapsed = t.elapsed();
        let mut stats = PathStats::default();
        let mut prep = 0;
        let mut main = 0;
        for d in &res.diagnostics {
            stats.merge(&d.stats);
            stats.merge(&d.alignment_stats);
            prep += d.alignment_paths;
            main += d.paths;
        }
        report_stats = stats;
        prep_paths = prep;
        main_paths = main;
        points = res
            .lower
            .and_then(|l| l.entries().values().next().map(|e| e.points.clone()))
            .unwrap_or_default();
        multi = res.diagnostics;
    }
    let (finite_pts, infinite): (Vec<_>, Vec<_>) = points
        .into_iter()
        .partition(|p| classify_endpoint(&p.normalized(), &criterion, threshold).is_finite());
    let finite = finite_pts.len();
    let mut solutions = finite_pts;
    solutions.extend(infinite);
    let report = BenchReport {
        system: name.to_string(),
        method,
        paths_prep: prep_paths,
        paths_main: main_paths,
        successes: report_stats.successes,
        at_infinity: report_stats.at_infinity,
        failures: report_stats.singular + report_stats.failures,
        distinct_solutions: finite,
        wall_time: elapsed.as_secs_f64(),
        seed,
    };
    Ok(Experiment {
        report,
        system: f,
        solutions,
        finite,
        stats: report_stats,
        curve_stats,
        multi,
    })
}
