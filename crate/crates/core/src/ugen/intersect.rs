use rand::Rng;
use serde::{Deserialize, Serialize};

use super::g0::{cone_ring, make_g0, system_to_cone, to_cone, u_start_points};
use crate::algebra::{Cx, MPoly, PolySystem};
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::{
    dedup_endpoints, make_straight_line, project_out, random_charts, track_batch,
    track_batch_switching, Eliminated, FiniteCriterion, MultiProjPoint, PathResult, PathStats,
    PathStatus, StraightLine, TrackerSettings, DEDUP_TOL,
};
use crate::witness::{relative_residual, WitnessSet, WITNESS_TOL};

/// Which equation the cone variable is solved from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UElimination {
    /// The affine chart of the cone.
    Chart,
    /// The moving slice row `(1−t)γℓ + t u = 0`; needs `t > 0`.
    HomotopyEquation,
}

/// How `g₀` is chosen.
#[derive(Clone, Debug, Default)]
pub enum G0Choice {
    /// `u^d − ℓ₀^d` with a random linear `ℓ₀`.
    #[default]
    Random,
    /// `u^d − ℓ₀^d` with the given `ℓ₀` (a form in the ambient ring).
    Linear(MPoly),
    /// A fixed polynomial of the cone ring, used as given.
    Explicit(MPoly),
}

#[derive(Clone, Debug)]
pub struct UGenConfig {
    pub settings: TrackerSettings,
    /// `None` draws a random unit constant.
    pub gamma: Option<Cx>,
    pub g0: G0Choice,
    /// Eliminate `u` once `t` exceeds `t_star`.
    pub eliminate: Option<(UElimination, f64)>,
    /// Upper bound on independent runs; see [`DEFAULT_ROUNDS`].
    pub rounds: usize,
}

/// A run with failed or singular paths, or with two paths ending at the
/// same point, may have lost endpoints. Such a run is repeated with fresh
/// random choices (up to this many runs in total) and the verified endpoints
/// of all runs are merged, until a run is clean or adds nothing new.
pub const DEFAULT_ROUNDS: usize = 3;

/// Activation threshold used when elimination is switched on.
pub const DEFAULT_T_STAR: f64 = 0.1;

impl Default for UGenConfig {
    fn default() -> Self {
        UGenConfig {
            settings: TrackerSettings::default(),
            gamma: None,
            g0: G0Choice::Random,
            eliminate: None,
            rounds: DEFAULT_ROUNDS,
        }
    }
}

impl UGenConfig {
    pub fn validate(&self) -> Result<()> {
        self.settings.validate()?;
        if let Some(g) = self.gamma {
            if (g.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("|gamma| = {} is not 1", g.norm())));
            }
        }
        if self.rounds == 0 {
            return Err(Error::InvalidArgument("rounds must be at least 1".into()));
        }
        if let Some((_, t)) = self.eliminate {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidArgument(format!("t* = {t} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Accounting of one hypersurface intersection.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntersectDiagnostics {
    /// Witness points already on the hypersurface.
    pub contained: usize,
    /// Paths tracked before the main homotopy (regeneration only).
    pub prep_paths: usize,
    pub prep_stats: PathStats,
    /// Paths of the main homotopy.
    pub paths: usize,
    pub stats: PathStats,
    /// Success endpoints dropped by the residual check.
    pub rejected: usize,
    /// Endpoint cluster sizes of the first run.
    pub cluster_sizes: Vec<usize>,
    /// Independent runs performed; paths and stats add up over all of them.
    pub rounds: usize,
    pub warning: Option<String>,
}

/// `X ∩ V(g₁)` as witness sets: the part of `X` inside the hypersurface
/// (same dimension) and the proper intersection (one dimension lower).
#[derive(Clone, Debug)]
pub struct Intersection {
    pub same_dim: Option<WitnessSet>,
    pub lower: Option<WitnessSet>,
    pub diagnostics: IntersectDiagnostics,
}

impl Intersection {
    pub fn sets(&self) -> impl Iterator<Item = &WitnessSet> {
        self.same_dim.iter().chain(self.lower.iter())
    }
}

/// Points of `w` on `V(g1)` and off it.
pub(crate) fn split_by(w: &WitnessSet, g1: &MPoly) -> (Vec<MultiProjPoint>, Vec<MultiProjPoint>) {
    w.points()
        .iter()
        .cloned()
        .partition(|p| relative_residual([g1], p) <= WITNESS_TOL)
}

/// Replaces an overdetermined `F` by `codim` random combinations with the
/// same solutions near generic points of the component. Rows are padded to
/// equal degree with powers of random linear forms.
pub(crate) fn square_up<R: Rng>(f: &PolySystem, codim: usize, rng: &mut R) -> Result<PolySystem> {
    if f.len() <= codim {
        return Ok(f.clone());
    }
    let ring = f.ring();
    let mut order: Vec<usize> = (0..f.len()).collect();
    let degs = f
        .polys()
        .iter()
        .map(|p| p.total_degree())
        .collect::<Result<Vec<_>>>()?;
    order.sort_by_key(|&i| std::cmp::Reverse(degs[i]));
    let mut rows = Vec::with_capacity(codim);
    for &i in &order[..codim] {
        let mut row = f.polys()[i].clone();
        for &j in &order[codim..] {
            let pad = rng::linear_form(rng, ring, 0).pow(degs[i] - degs[j]);
            row = &row + &(&pad * &f.polys()[j]).scale(rng::gaussian(rng));
        }
        rows.push(row);
    }
    PolySystem::new(ring, rows)
}

/// The curve left after dropping the last slice form, restricted to the
/// given points: `(F ∪ L', {ℓ}, points)`.
pub(crate) fn reduce_to_curve(w: &WitnessSet, points: Vec<MultiProjPoint>) -> Result<WitnessSet> {
    let (last, rest) = w
        .slice()
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("a 0-dimensional set has no curve".into()))?;
    let system = w.system().extended(rest.iter().cloned())?;
    WitnessSet::new(system, vec![last.clone()], points, 1)
}

/// The u-homotopy `(F̃, g₀, ℓ) ⇝ (F̃, g₁, u)` on the cone over a curve.
pub struct UHomotopy {
    pub line: StraightLine,
    pub g_row: usize,
    pub ell_row: usize,
}

impl UHomotopy {
    /// Builds the homotopy from the start witness set of
    /// [`u_start_points`]: its system is `F̃ ∪ {g₀}` and its slice `{ℓ̃}`.
    /// `f_square` replaces `F̃` in the tracked rows when given.
    pub fn new<R: Rng>(
        start: &WitnessSet,
        g1: &MPoly,
        f_square: Option<&PolySystem>,
        gamma: Cx,
        rng: &mut R,
    ) -> Result<Self> {
        let cone = start.ring().clone();
        let (g0, f) = start
            .system()
            .polys()
            .split_last()
            .ok_or_else(|| Error::InvalidArgument("start system lacks g0".into()))?;
        let f: Vec<MPoly> = match f_square {
            Some(s) => s.polys().to_vec(),
            None => f.to_vec(),
        };
        let g1 = to_cone(g1, &cone)?;
        let u = MPoly::var(&cone, 0);
        let g_row = f.len();
        let ell_row = g_row + 1;
        let start_sys = PolySystem::new(&cone, f.iter().cloned().chain([g0.clone(), start.slice()[0].clone()]).collect())?;
        let target_sys = PolySystem::new(&cone, f.into_iter().chain([g1, u]).collect())?;
        let charts = random_charts(&cone, rng);
        let line = make_straight_line(&start_sys, &target_sys, gamma, &charts)?;
        Ok(UHomotopy { line, g_row, ell_row })
    }
}

/// The homotopy with `u` solved from the chosen equation, valid for
/// `t ≥ t_star`.
pub fn eliminate_u(h: &UHomotopy, mode: UElimination, t_star: f64) -> Result<Eliminated<'_>> {
    let row = match mode {
        UElimination::Chart => h.line.chart_row0(),
        UElimination::HomotopyEquation => {
            if t_star <= 0.0 {
                return Err(Error::EliminationTooEarly { t: t_star, t_star: 0.0 });
            }
            h.ell_row
        }
    };
    Eliminated::new(&h.line, &[(0, row)], t_star)
}

/// Tracks from the start set and returns the raw results.
pub(crate) fn track_u(
    h: &UHomotopy,
    start: &WitnessSet,
    cfg: &UGenConfig,
) -> Result<Vec<PathResult>> {
    let starts = start
        .points()
        .iter()
        .map(|p| h.line.chart_point(p))
        .collect::<Result<Vec<_>>>()?;
    let criterion = FiniteCriterion::from_ring(start.ring()).cones_only();
    Ok(match cfg.eliminate {
        None => track_batch(&h.line, &starts, 0.0, &cfg.settings, &criterion),
        Some((mode, t_star)) => {
            let e = eliminate_u(h, mode, t_star)?;
            track_batch_switching(&h.line, &e, &starts, 0.0, &cfg.settings, &criterion)
        }
    })
}

/// Success endpoints, mapped by `project`, that satisfy `check` to the
/// witness tolerance; deduplicated.
pub(crate) fn collect(
    results: &[PathResult],
    project: impl Fn(&MultiProjPoint) -> MultiProjPoint,
    check: &[&MPoly],
    diag: &mut IntersectDiagnostics,
) -> Vec<MultiProjPoint> {
    let mut kept = Vec::new();
    for r in results.iter().filter(|r| r.status == PathStatus::Success) {
        let p = project(&r.endpoint);
        if relative_residual(check.iter().copied(), &p) <= WITNESS_TOL {
            kept.push(p);
        } else {
            diag.rejected += 1;
        }
    }
    let d = dedup_endpoints(&kept, DEDUP_TOL);
    diag.cluster_sizes = d.cluster_sizes;
    d.points
}

pub(crate) fn check_failures(diag: &mut IntersectDiagnostics) -> Result<()> {
    let s = &diag.stats;
    if s.paths > 0 && s.failures == s.paths {
        return Err(Error::AllPathsFailed(s.paths));
    }
    if s.failures > 0 {
        diag.warning = Some(format!("{} of {} paths failed", s.failures, s.paths));
    }
    Ok(())
}

/// Repeats `run` while its runs look incomplete, merging the endpoints.
/// `run` fills a fresh diagnostics record for its own paths.
pub(crate) fn run_rounds(
    max_rounds: usize,
    diag: &mut IntersectDiagnostics,
    mut run: impl FnMut(&mut IntersectDiagnostics) -> Result<Vec<MultiProjPoint>>,
) -> Result<Vec<MultiProjPoint>> {
    let mut points: Vec<MultiProjPoint> = Vec::new();
    for round in 0..max_rounds.max(1) {
        let mut rd = IntersectDiagnostics::default();
        let found = run(&mut rd)?;
        diag.prep_paths += rd.prep_paths;
        diag.prep_stats.merge(&rd.prep_stats);
        diag.paths += rd.paths;
        diag.stats.merge(&rd.stats);
        diag.rejected += rd.rejected;
        diag.rounds += 1;
        if round == 0 {
            diag.cluster_sizes = rd.cluster_sizes.clone();
        }
        let before = points.len();
        points.extend(found);
        points = dedup_endpoints(&points, DEDUP_TOL).points;
        let st = &rd.stats;
        let clean = st.failures == 0 && st.singular == 0 && rd.cluster_sizes.iter().all(|&c| c == 1);
        if clean || (round > 0 && points.len() == before) {
            break;
        }
    }
    check_failures(diag)?;
    Ok(points)
}

/// Intersects the variety of `w` with `V(g1)` by u-generation.
pub fn intersect_hypersurface<R: Rng>(
    w: &WitnessSet,
    g1: &MPoly,
    cfg: &UGenConfig,
    rng: &mut R,
) -> Result<Intersection> {
    cfg.validate()?;
    let ring = w.ring().clone();
    if ring.ngroups() != 1 {
        return Err(Error::InvalidArgument(
            "intersect_hypersurface works in one projective space; see intersect_hypersurface_multi"
                .into(),
        ));
    }
    if g1.ring() != &ring {
        return Err(Error::RingMismatch("g1 lives in another ring".into()));
    }
    if !g1.is_homogeneous() || g1.is_zero() {
        return Err(Error::InvalidArgument("g1 must be a nonzero homogeneous polynomial".into()));
    }
    let (inside, outside) = split_by(w, g1);
    let mut diag = IntersectDiagnostics {
        contained: inside.len(),
        ..Default::default()
    };
    let same_dim = if inside.is_empty() {
        None
    } else {
        Some(w.with_points(inside))
    };
    if w.dim() == 0 || outside.is_empty() {
        return Ok(Intersection {
            same_dim,
            lower: None,
            diagnostics: diag,
        });
    }
    let z = reduce_to_curve(w, outside)?;
    let d = g1.total_degree()?;
    if let G0Choice::Explicit(g) = &cfg.g0 {
        if g.total_degree()? != d {
            return Err(Error::InvalidArgument(format!(
                "g0 has degree {}, g1 has degree {d}",
                g.total_degree()?
            )));
        }
    }
    let cone = cone_ring(&ring);
    let n = ring.factor_dims()[0];
    let target = w.system().extended([g1.clone()])?;
    let rest = &w.slice()[..w.dim() - 1];
    let check: Vec<&MPoly> = target.polys().iter().chain(rest).collect();
    let points = run_rounds(cfg.rounds, &mut diag, |rd| {
        let g0 = match &cfg.g0 {
            G0Choice::Random => make_g0(d, &rng::linear_form(rng, &ring, 0), Cx::new(1.0, 0.0))?,
            G0Choice::Linear(l) => make_g0(d, l, Cx::new(1.0, 0.0))?,
            G0Choice::Explicit(g) => g.clone(),
        };
        let start = u_start_points(&z, &g0)?;
        let f_square = if z.system().len() + 1 > n {
            let sq = square_up(z.system(), n - 1, rng)?;
            Some(system_to_cone(&sq, &cone)?)
        } else {
            None
        };
        let gamma = cfg.gamma.unwrap_or_else(|| rng::unit_circle(rng));
        let h = UHomotopy::new(&start, g1, f_square.as_ref(), gamma, rng)?;
        let results = track_u(&h, &start, cfg)?;
        rd.paths = results.len();
        rd.stats = PathStats::of(&results);
        Ok(collect(&results, |p| project_out(&cone, p, &[0]), &check, rd))
    })?;
    let lower = WitnessSet::new(target, rest.to_vec(), points, w.dim() - 1)?;
    Ok(Intersection {
        same_dim,
        lower: Some(lower),
        diagnostics: diag,
    })
}
