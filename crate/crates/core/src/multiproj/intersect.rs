use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::g0::{expected_path_count, random_g0_multi, u_multiproj_start_points, G0Variant};
use crate::algebra::{Cx, MPoly, PolySystem};
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::{
    condition_number, dedup_endpoints, make_straight_line, newton, project_out, random_charts,
    track_batch, track_batch_switching, Eliminated, FiniteCriterion, Homotopy, MultiProjPoint,
    PathResult, PathStats, PathStatus, StraightLine, TrackerSettings, DEDUP_TOL,
};
use crate::ugen::{to_cone, UElimination};
use crate::witness::{
    move_slice, pooled_slice, relative_residual, slice_types, CollectionEntry, WitnessCollection,
    WitnessSet, WITNESS_TOL,
};

/// Newton iterations allowed when polishing a start point.
const POLISH_ITERS: usize = 20;

#[derive(Clone, Debug)]
pub struct MultiUGenConfig {
    pub settings: TrackerSettings,
    pub epsilon: f64,
    pub g0_variant: G0Variant,
    /// `None` draws a random unit constant.
    pub gamma: Option<Cx>,
    /// Eliminate the cone variables once `t` exceeds the threshold.
    pub eliminate: Option<(UElimination, f64)>,
}

pub const DEFAULT_EPSILON: f64 = 1e-5;

impl Default for MultiUGenConfig {
    fn default() -> Self {
        MultiUGenConfig {
            settings: TrackerSettings::default(),
            epsilon: DEFAULT_EPSILON,
            g0_variant: G0Variant::Binomial,
            gamma: None,
            eliminate: None,
        }
    }
}

impl MultiUGenConfig {
    pub fn validate(&self) -> Result<()> {
        self.settings.validate()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if let Some(g) = self.gamma {
            if (g.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("|gamma| = {} is not 1", g.norm())));
            }
        }
        if let Some((_, t)) = self.eliminate {
            if !(t >= self.epsilon && t < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "t* = {t} must lie in [epsilon, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// `(F̃, g₀, ℓ_1 … ℓ_k) ⇝ (F̃, g₁, u_1 … u_k)` on the multi-cone of a curve.
pub struct MultiUHomotopy {
    pub line: StraightLine,
    pub gamma: Cx,
    pub g_row: usize,
    /// Row of `(1−t)γℓ_i + t u_i` for each group.
    pub ell_rows: Vec<usize>,
}

impl MultiUHomotopy {
    /// `f` and `g1` live in the original ring, `g0` in its multi-cone.
    pub fn new<R: Rng>(
        f: &PolySystem,
        ells: &[MPoly],
        g0: &MPoly,
        g1: &MPoly,
        gamma: Cx,
        rng: &mut R,
    ) -> Result<Self> {
        let ring = f.ring();
        let k = ring.ngroups();
        if ells.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: ells.len(),
            });
        }
        let cone = ring.cone();
        let ft: Vec<MPoly> = f.polys().iter().map(|p| to_cone(p, &cone)).collect::<Result<_>>()?;
        let g_row = ft.len();
        let mut start = ft.clone();
        start.push(g0.clone());
        let mut target = ft;
        target.push(to_cone(g1, &cone)?);
        for (i, l) in ells.iter().enumerate() {
            start.push(to_cone(l, &cone)?);
            target.push(MPoly::var(&cone, i));
        }
        let start = PolySystem::new(&cone, start)?;
        let target = PolySystem::new(&cone, target)?;
        let charts = random_charts(&cone, rng);
        let line = make_straight_line(&start, &target, gamma, &charts)?;
        Ok(MultiUHomotopy {
            line,
            gamma,
            g_row,
            ell_rows: (0..k).map(|i| g_row + 1 + i).collect(),
        })
    }

    pub fn ngroups(&self) -> usize {
        self.ell_rows.len()
    }
}

/// The homotopy with every cone variable solved from its chart or its
/// slice row, valid for `t ≥ t_min`.
pub fn eliminate_cone_vars(h: &MultiUHomotopy, mode: UElimination, t_min: f64) -> Result<Eliminated<'_>> {
    let k = h.ngroups();
    let pairs: Vec<(usize, usize)> = match mode {
        UElimination::Chart => (0..k).map(|g| (g, h.line.chart_row0() + g)).collect(),
        UElimination::HomotopyEquation => {
            if t_min <= 0.0 {
                return Err(Error::EliminationTooEarly { t: t_min, t_star: 0.0 });
            }
            (0..k).map(|g| (g, h.ell_rows[g])).collect()
        }
    };
    Eliminated::new(&h.line, &pairs, t_min)
}

/// Condition number of `∂H/∂x` at `(x, t)` for a state of `h`.
pub fn condition_at(h: &dyn Homotopy, x: &[Cx], t: f64) -> f64 {
    let mut ws = h.workspace();
    h.evaluate(x, t, &mut ws);
    condition_number(&ws.jac)
}

/// Chart coordinates of the start points, each Newton-polished at `t = ε`.
/// Returns the states and the number of points that did not converge
/// (they are kept and fail at the start of tracking).
pub fn polish_starts(
    h: &MultiUHomotopy,
    points: &[MultiProjPoint],
    epsilon: f64,
    settings: &TrackerSettings,
) -> Result<(Vec<Vec<Cx>>, usize)> {
    let mut ws = h.line.workspace();
    let mut failures = 0;
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let x0 = h.line.chart_point(p)?;
        let mut x = x0.clone();
        if newton(&h.line, &mut x, epsilon, POLISH_ITERS, settings.corrector_tol, &mut ws).is_some() {
            out.push(x);
        } else {
            failures += 1;
            out.push(x0);
        }
    }
    Ok((out, failures))
}

/// Accounting of one curve-level intersection.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiDiagnostics {
    /// Slice type of the output entry.
    pub slice_type: Vec<usize>,
    /// Witness points per group used as starts.
    pub witness_counts: Vec<usize>,
    pub expected_paths: usize,
    pub paths: usize,
    pub polish_failures: usize,
    pub stats: PathStats,
    /// Paths spent aligning input entries to shared slices.
    pub alignment_paths: usize,
    pub alignment_stats: PathStats,
    pub rejected: usize,
    /// Success endpoints before deduplication.
    pub raw_successes: usize,
    pub cluster_sizes: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MultiIntersection {
    /// The part of the variety inside the hypersurface.
    pub same_dim: Option<WitnessCollection>,
    /// The proper intersection, one dimension lower.
    pub lower: Option<WitnessCollection>,
    pub contained: usize,
    pub diagnostics: Vec<MultiDiagnostics>,
}

/// Result of u-generation on one curve.
#[derive(Clone, Debug)]
pub struct CurveRun {
    /// Deduplicated endpoints in the original ring.
    pub points: Vec<MultiProjPoint>,
    pub results: Vec<PathResult>,
    pub diagnostics: MultiDiagnostics,
}

/// u-generation on a curve `V(F)` of a product of projective spaces.
/// `slices[i]` is `(ℓ_i, W_i)`: a form of group `i` and the curve's points
/// on it. `check` holds the equations every endpoint must satisfy.
pub fn intersect_curve_multi<R: Rng>(
    f: &PolySystem,
    slices: &[(MPoly, Vec<MultiProjPoint>)],
    g1: &MPoly,
    cfg: &MultiUGenConfig,
    check: &[&MPoly],
    rng: &mut R,
) -> Result<CurveRun> {
    cfg.validate()?;
    let ring = f.ring();
    let k = ring.ngroups();
    let dims = ring.factor_dims();
    if f.len() + 1 != dims.iter().sum::<usize>() {
        return Err(Error::NotSquare {
            equations: f.len() + 1,
            charts: k,
            variables: ring.nvars(),
        });
    }
    let degrees = g1.multidegree()?;
    let g0 = random_g0_multi(ring, &degrees, cfg.g0_variant, rng)?;
    let gamma = cfg.gamma.unwrap_or_else(|| rng::unit_circle(rng));
    let ells: Vec<MPoly> = slices.iter().map(|(l, _)| l.clone()).collect();
    let h = MultiUHomotopy::new(f, &ells, &g0, g1, gamma, rng)?;
    let starts = u_multiproj_start_points(slices, &g0, gamma, cfg.epsilon)?;
    let (states, polish_failures) = polish_starts(&h, &starts.points, cfg.epsilon, &cfg.settings)?;
    let cone = h.line.ring().clone();
    let criterion = FiniteCriterion::from_ring(&cone).cones_only();
    let results = match cfg.eliminate {
        None => track_batch(&h.line, &states, cfg.epsilon, &cfg.settings, &criterion),
        Some((mode, t_star)) => {
            let e = eliminate_cone_vars(&h, mode, t_star)?;
            track_batch_switching(&h.line, &e, &states, cfg.epsilon, &cfg.settings, &criterion)
        }
    };
    let witness_counts: Vec<usize> = slices.iter().map(|(_, w)| w.len()).collect();
    let mut diag = MultiDiagnostics {
        expected_paths: expected_path_count(&witness_counts, &degrees)?,
        witness_counts,
        paths: results.len(),
        polish_failures,
        stats: PathStats::of(&results),
        ..Default::default()
    };
    let cone_vars: Vec<usize> = (0..k).collect();
    let mut kept = Vec::new();
    for r in results.iter().filter(|r| r.status == PathStatus::Success) {
        diag.raw_successes += 1;
        let p = project_out(&cone, &r.endpoint, &cone_vars);
        if relative_residual(check.iter().copied(), &p) <= WITNESS_TOL {
            kept.push(p);
        } else {
            diag.rejected += 1;
        }
    }
    let d = dedup_endpoints(&kept, DEDUP_TOL);
    diag.cluster_sizes = d.cluster_sizes;
    Ok(CurveRun {
        points: d.points,
        results,
        diagnostics: diag,
    })
}

/// Forms of group `g` in a grouped slice.
fn group_forms(slice: &[MPoly], g: usize) -> Vec<MPoly> {
    slice
        .iter()
        .filter(|l| l.support().first().map(|&v| l.ring().group_of(v)) == Some(g))
        .cloned()
        .collect()
}

/// Intersects the variety of a witness collection with `V(g1)`. For every
/// slice type `a` of the result, the curve `V(F ∪ L_a)` is intersected by
/// u-generation, with the entries `a + e_i` supplying the start points.
pub fn intersect_hypersurface_multi<R: Rng>(
    wc: &WitnessCollection,
    g1: &MPoly,
    cfg: &MultiUGenConfig,
    rng: &mut R,
) -> Result<MultiIntersection> {
    cfg.validate()?;
    let f = wc.system();
    let ring = f.ring().clone();
    if g1.ring() != &ring {
        return Err(Error::RingMismatch("g1 lives in another ring".into()));
    }
    if g1.is_zero() {
        return Err(Error::InvalidArgument("g1 is zero".into()));
    }
    let degrees = g1.multidegree()?;
    let k = ring.ngroups();
    let dims = ring.factor_dims();
    let dim = wc.dim();

    // containment split, entry by entry
    let mut inside = BTreeMap::new();
    let mut outside: BTreeMap<Vec<usize>, CollectionEntry> = BTreeMap::new();
    let mut contained = 0;
    for (a, e) in wc.entries() {
        let (ins, outs): (Vec<_>, Vec<_>) = e
            .points
            .iter()
            .cloned()
            .partition(|p| relative_residual([g1], p) <= WITNESS_TOL);
        contained += ins.len();
        if !ins.is_empty() {
            inside.insert(a.clone(), CollectionEntry { slice: e.slice.clone(), points: ins });
        }
        outside.insert(a.clone(), CollectionEntry { slice: e.slice.clone(), points: outs });
    }
    let same_dim = if inside.is_empty() {
        None
    } else {
        Some(WitnessCollection::new(f.clone(), dim, inside)?)
    };
    if dim == 0 || outside.values().all(|e| e.points.is_empty()) {
        return Ok(MultiIntersection {
            same_dim,
            lower: None,
            contained,
            diagnostics: Vec::new(),
        });
    }

    // one pool of forms per group, taken from the entry using the most
    let mut pools: Vec<Vec<MPoly>> = vec![Vec::new(); k];
    for (a, e) in &outside {
        for g in 0..k {
            if a[g] > pools[g].len() {
                pools[g] = group_forms(&e.slice, g);
            }
        }
    }
    let targets = slice_types(&dims, dim - 1);
    let mut missing = Vec::new();
    for a in &targets {
        for i in 0..k {
            if degrees[i] == 0 || a[i] + 1 > dims[i] {
                continue;
            }
            let mut b = a.clone();
            b[i] += 1;
            if !outside.contains_key(&b) {
                missing.push(b);
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::MissingEntries(missing));
    }
    for (g, pool) in pools.iter_mut().enumerate() {
        while pool.len() < dim {
            pool.push(rng::linear_form(rng, &ring, g));
        }
    }

    let out_system = f.extended([g1.clone()])?;
    let mut entries = BTreeMap::new();
    let mut diagnostics = Vec::new();
    for a in targets {
        let l = pooled_slice(&pools, &a);
        let curve = f.extended(l.iter().cloned())?;
        let mut slices = Vec::with_capacity(k);
        let mut alignment = PathStats::default();
        for i in 0..k {
            let ell = pools[i][a[i]].clone();
            let mut b = a.clone();
            b[i] += 1;
            let points = match outside.get(&b) {
                Some(e) if degrees[i] > 0 && a[i] + 1 <= dims[i] => {
                    let want = pooled_slice(&pools, &b);
                    if e.slice == want {
                        e.points.clone()
                    } else {
                        let w = WitnessSet::new(f.clone(), e.slice.clone(), e.points.clone(), dim)?;
                        let moved = move_slice(&w, &want, &cfg.settings, rng)?;
                        alignment.merge(&moved.stats);
                        moved.set.points().to_vec()
                    }
                }
                _ => Vec::new(),
            };
            slices.push((ell, points));
        }
        let check: Vec<&MPoly> = out_system.polys().iter().chain(&l).collect();
        let run = intersect_curve_multi(&curve, &slices, g1, cfg, &check, rng)
            .map_err(|e| e.context(format!("slice type {a:?}")))?;
        let mut diag = run.diagnostics;
        diag.slice_type = a.clone();
        diag.alignment_paths = alignment.paths;
        diag.alignment_stats = alignment;
        diagnostics.push(diag);
        entries.insert(a, CollectionEntry { slice: l, points: run.points });
    }
    let lower = WitnessCollection::new(out_system, dim - 1, entries)?;
    Ok(MultiIntersection {
        same_dim,
        lower: Some(lower),
        contained,
        diagnostics,
    })
}
