use std::collections::BTreeMap;

use rand::Rng;

use super::set::{relative_residual, CollectionEntry, WitnessCollection, WitnessSet, WITNESS_TOL};
use super::start::total_degree_start;
use crate::algebra::{Cx, MPoly, PolySystem};
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::{
    chordal_distance, dedup_endpoints, make_straight_line, make_straight_line_factored, random_charts, track_batch,
    FiniteCriterion, MultiProjPoint, PathResult, PathStats, PathStatus, TrackerSettings, DEDUP_TOL,
};

/// Deduplicated endpoints of a solve, with path accounting.
#[derive(Clone, Debug)]
pub struct Solved {
    pub points: Vec<MultiProjPoint>,
    pub stats: PathStats,
    pub cluster_sizes: Vec<usize>,
    /// Success endpoints dropped for a relative residual above
    /// [`WITNESS_TOL`].
    pub rejected: usize,
}

fn collect_successes(results: &[PathResult], polys: &[&MPoly]) -> Solved {
    let mut kept = Vec::new();
    let mut rejected = 0;
    for r in results.iter().filter(|r| r.status == PathStatus::Success) {
        if relative_residual(polys.iter().copied(), &r.endpoint) <= WITNESS_TOL {
            kept.push(r.endpoint.clone());
        } else {
            rejected += 1;
        }
    }
    let d = dedup_endpoints(&kept, DEDUP_TOL);
    Solved {
        points: d.points,
        stats: PathStats::of(results),
        cluster_sizes: d.cluster_sizes,
        rejected,
    }
}

/// Solves a square homogeneous system by a total-degree homotopy with the
/// γ-trick. Returns the deduplicated Success endpoints; points whose
/// homogenizing coordinates vanish count as at infinity.
pub fn total_degree_solve<R: Rng>(
    f: &PolySystem,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<Solved> {
    settings.validate()?;
    let ring = f.ring();
    let start = total_degree_start(f, rng)?;
    let charts = random_charts(ring, rng);
    let gamma = rng::unit_circle(rng);
    let h = match &start.factors {
        Some(fs) => make_straight_line_factored(&start.system, fs, f, gamma, &charts)?,
        None => make_straight_line(&start.system, f, gamma, &charts)?,
    };
    let starts = start
        .points
        .iter()
        .map(|p| h.chart_point(p))
        .collect::<Result<Vec<_>>>()?;
    let results = track_batch(&h, &starts, 0.0, settings, &FiniteCriterion::from_ring(ring));
    let polys: Vec<&MPoly> = f.polys().iter().collect();
    Ok(collect_successes(&results, &polys))
}

/// Witness set of the pure `dim`-dimensional variety `V(F)` in a single
/// projective space, by slicing with `dim` random forms and solving.
pub fn witness_set<R: Rng>(
    f: &PolySystem,
    dim: usize,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<(WitnessSet, PathStats)> {
    let ring = f.ring();
    if ring.ngroups() != 1 {
        return Err(Error::InvalidArgument(
            "witness_set works in one projective space; use witness_collection".into(),
        ));
    }
    let n = ring.factor_dims()[0];
    if f.len() + dim != n {
        return Err(Error::NotSquare {
            equations: f.len() + dim,
            charts: 1,
            variables: ring.nvars(),
        });
    }
    let slice: Vec<MPoly> = (0..dim).map(|_| rng::linear_form(rng, ring, 0)).collect();
    let solved = total_degree_solve(&f.extended(slice.iter().cloned())?, settings, rng)?;
    if solved.points.is_empty() {
        return Err(Error::EmptyWitnessSet(format!(
            "{} paths tracked, none ended on the variety (is it {dim}-dimensional?)",
            solved.stats.paths
        )));
    }
    Ok((WitnessSet::new(f.clone(), slice, solved.points, dim)?, solved.stats))
}

/// Witness set of a curve.
pub fn witness_curve<R: Rng>(
    f: &PolySystem,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<(WitnessSet, PathStats)> {
    witness_set(f, 1, settings, rng)
}

/// Witness set moved to a new slice, with the accounting of the move.
#[derive(Clone, Debug)]
pub struct Moved {
    pub set: WitnessSet,
    pub stats: PathStats,
}

impl Moved {
    /// Paths that did not end in a usable point.
    pub fn lost(&self) -> usize {
        self.stats.paths - self.stats.successes
    }
}

/// Tracks the witness points along `(F, L) ⇝ (F, L_new)`.
pub fn move_slice<R: Rng>(
    w: &WitnessSet,
    new_slice: &[MPoly],
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<Moved> {
    if new_slice.len() != w.slice().len() {
        return Err(Error::InvalidArgument(format!(
            "new slice has {} forms, expected {}",
            new_slice.len(),
            w.slice().len()
        )));
    }
    if new_slice == w.slice() {
        return Ok(Moved {
            set: w.clone(),
            stats: PathStats::default(),
        });
    }
    settings.validate()?;
    let ring = w.ring();
    let start = w.system().extended(w.slice().iter().cloned())?;
    let target = w.system().extended(new_slice.iter().cloned())?;
    let charts = random_charts(ring, rng);
    let gamma = rng::unit_circle(rng);
    let h = make_straight_line(&start, &target, gamma, &charts)?;
    let starts = w
        .points()
        .iter()
        .map(|p| h.chart_point(p))
        .collect::<Result<Vec<_>>>()?;
    let results = track_batch(&h, &starts, 0.0, settings, &FiniteCriterion::none());
    let polys: Vec<&MPoly> = target.polys().iter().collect();
    let solved = collect_successes(&results, &polys);
    let set = WitnessSet::new(w.system().clone(), new_slice.to_vec(), solved.points, w.dim())?;
    Ok(Moved {
        set,
        stats: solved.stats,
    })
}

/// Outcome of a membership test.
#[derive(Clone, Debug)]
pub struct Membership {
    pub member: bool,
    pub stats: PathStats,
}

/// Group of a homogeneous linear form.
fn form_group(l: &MPoly) -> usize {
    l.support()
        .first()
        .map(|&v| l.ring().group_of(v))
        .unwrap_or(0)
}

/// Random slice forms of the same groups as `slice`, all vanishing at `p`.
pub fn slice_through<R: Rng>(slice: &[MPoly], p: &MultiProjPoint, rng: &mut R) -> Result<Vec<MPoly>> {
    let Some(first) = slice.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    let z = p.normalized().to_flat(&ring);
    let mut anchors: Vec<Option<(MPoly, Cx)>> = vec![None; ring.ngroups()];
    let mut out = Vec::with_capacity(slice.len());
    for l in slice {
        let g = form_group(l);
        if anchors[g].is_none() {
            // An anchor form not vanishing at p.
            let mut best: Option<(MPoly, Cx)> = None;
            for _ in 0..8 {
                let mu = rng::linear_form(rng, &ring, g);
                let v = mu.evaluate(&z)?;
                if best.as_ref().map_or(true, |(_, b)| v.norm() > b.norm()) {
                    best = Some((mu, v));
                }
            }
            anchors[g] = best;
        }
        let (mu, mu_p) = anchors[g].clone().expect("anchor drawn");
        if mu_p.norm() == 0.0 {
            return Err(Error::InvalidArgument(format!("point has zero factor {g}")));
        }
        let lam = rng::linear_form(rng, &ring, g);
        let lam_p = lam.evaluate(&z)?;
        out.push(&lam - &mu.scale(lam_p / mu_p));
    }
    Ok(out)
}

/// Whether `p` lies on the component described by `w`: moves `w` to a
/// generic slice through `p` and looks for `p` among the moved points.
pub fn membership<R: Rng>(
    w: &WitnessSet,
    p: &MultiProjPoint,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<Membership> {
    let p = p.normalized();
    if relative_residual(w.system().polys(), &p) > 1e-6 {
        return Ok(Membership {
            member: false,
            stats: PathStats::default(),
        });
    }
    if w.dim() == 0 {
        let member = w.points().iter().any(|q| chordal_distance(&p, q) <= DEDUP_TOL);
        return Ok(Membership {
            member,
            stats: PathStats::default(),
        });
    }
    let through = slice_through(w.slice(), &p, rng)?;
    let moved = move_slice(w, &through, settings, rng)?;
    let member = moved
        .set
        .points()
        .iter()
        .any(|q| chordal_distance(&p, q) <= DEDUP_TOL);
    Ok(Membership {
        member,
        stats: moved.stats,
    })
}

/// All slice types `(a_1, …, a_k)` with `Σ a_i = dim` and `a_i ≤ dims[i]`,
/// in lexicographically decreasing order.
pub fn slice_types(dims: &[usize], dim: usize) -> Vec<Vec<usize>> {
    fn rec(dims: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == dims.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in (0..=dims[i].min(left)).rev() {
            cur.push(a);
            rec(dims, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dims, dim, &mut Vec::new(), &mut out);
    out
}

/// Witness collection of the pure `dim`-dimensional `V(F)` in a product
/// of projective spaces. One pool of random forms is drawn per group and the
/// entry of slice type `a` uses the first `a_i` forms of pool `i`, so entries
/// share their slices. Each entry is a total-degree solve; empty entries are
/// kept.
pub fn witness_collection<R: Rng>(
    f: &PolySystem,
    dim: usize,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<(WitnessCollection, PathStats)> {
    let ring = f.ring();
    let dims = ring.factor_dims();
    if f.len() + dim != dims.iter().sum::<usize>() {
        return Err(Error::NotSquare {
            equations: f.len() + dim,
            charts: ring.ngroups(),
            variables: ring.nvars(),
        });
    }
    let pools: Vec<Vec<MPoly>> = dims
        .iter()
        .enumerate()
        .map(|(g, &n)| (0..n.min(dim)).map(|_| rng::linear_form(rng, ring, g)).collect())
        .collect();
    let mut entries = BTreeMap::new();
    let mut stats = PathStats::default();
    for a in slice_types(&dims, dim) {
        let slice = pooled_slice(&pools, &a);
        let solved = total_degree_solve(&f.extended(slice.iter().cloned())?, settings, rng)?;
        stats.merge(&solved.stats);
        entries.insert(
            a,
            CollectionEntry {
                slice,
                points: solved.points,
            },
        );
    }
    Ok((WitnessCollection::new(f.clone(), dim, entries)?, stats))
}

/// The first `a_i` forms of every pool, in group order.
pub fn pooled_slice(pools: &[Vec<MPoly>], a: &[usize]) -> Vec<MPoly> {
    pools
        .iter()
        .zip(a)
        .flat_map(|(pool, &k)| pool[..k].iter().cloned())
        .collect()
}
