use rand::Rng;
use serde::{Deserialize, Serialize};

use super::intersect::{intersect_hypersurface, IntersectDiagnostics, UGenConfig};
use crate::algebra::{Cx, MPoly, PolySystem};
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::{MultiProjPoint, PathStats, TrackerSettings};
use crate::witness::{membership, WitnessSet};

#[derive(Clone, Debug, Default)]
pub struct CascadeConfig {
    pub ugen: UGenConfig,
    /// Drop witness points whose coordinate at this variable is below the
    /// infinity threshold after every round, discarding the components
    /// inside that hyperplane.
    pub affine_chart: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RoundDiagnostics {
    pub equation: usize,
    pub intersections: Vec<IntersectDiagnostics>,
    pub dropped_at_infinity: usize,
    pub pruned: usize,
    pub membership_paths: usize,
}

impl RoundDiagnostics {
    pub fn paths(&self) -> usize {
        self.intersections.iter().map(|d| d.paths).sum()
    }
}

#[derive(Clone, Debug)]
pub struct CascadeResult {
    /// Witness sets of the equidimensional pieces, by decreasing dimension.
    pub components: Vec<WitnessSet>,
    pub rounds: Vec<RoundDiagnostics>,
}

impl CascadeResult {
    pub fn of_dim(&self, dim: usize) -> impl Iterator<Item = &WitnessSet> {
        self.components.iter().filter(move |w| w.dim() == dim)
    }
}

/// Witness set of all of `ℙⁿ`: no equations, `n` random forms and their
/// common zero.
pub fn ambient_witness_set<R: Rng>(ring: &std::sync::Arc<crate::Ring>, rng: &mut R) -> Result<WitnessSet> {
    if ring.ngroups() != 1 {
        return Err(Error::InvalidArgument("the cascade works in one projective space".into()));
    }
    let n = ring.factor_dims()[0];
    let slice: Vec<MPoly> = (0..n).map(|_| rng::linear_form(rng, ring, 0)).collect();
    let rows: Vec<Vec<Cx>> = slice
        .iter()
        .map(|l| (0..ring.nvars()).map(|v| l.coefficient(&unit(ring.nvars(), v))).collect())
        .collect();
    let refs: Vec<&Vec<Cx>> = rows.iter().collect();
    let normalizer = rng::unit_sphere(rng, ring.nvars());
    let p = crate::witness::null_vector(&refs, &normalizer)?;
    WitnessSet::new(
        PolySystem::empty(ring),
        slice,
        vec![MultiProjPoint::from_flat(ring, &p)],
        n,
    )
}

fn unit(n: usize, v: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[v] = 1;
    e
}

/// Equation-by-equation decomposition of `V(F)` into equidimensional
/// pieces, intersecting every current witness set with the next equation.
pub fn cascade<R: Rng>(f: &PolySystem, cfg: &CascadeConfig, rng: &mut R) -> Result<CascadeResult> {
    cfg.ugen.validate()?;
    if !f.is_homogeneous() {
        return Err(Error::InvalidArgument("the cascade needs a homogeneous system".into()));
    }
    let ring = f.ring();
    if let Some(h) = cfg.affine_chart {
        if h >= ring.nvars() {
            return Err(Error::InvalidArgument(format!("no variable with index {h}")));
        }
    }
    let mut current = vec![ambient_witness_set(ring, rng)?];
    let mut rounds = Vec::with_capacity(f.len());
    for (i, fi) in f.polys().iter().enumerate() {
        let mut round = RoundDiagnostics {
            equation: i,
            ..Default::default()
        };
        let mut next = Vec::new();
        for (k, w) in current.iter().enumerate() {
            let r = intersect_hypersurface(w, fi, &cfg.ugen, rng).map_err(|e| {
                e.context(format!("equation {i}, component {k} of dimension {}", w.dim()))
            })?;
            if let Some(same) = r.same_dim {
                // the component lies on f_i: record that in its equations
                let sys = same.system().extended([fi.clone()])?;
                next.push(WitnessSet::new(sys, same.slice().to_vec(), same.points().to_vec(), same.dim())?);
            }
            next.extend(r.lower);
            round.intersections.push(r.diagnostics);
        }
        if let Some(h) = cfg.affine_chart {
            let threshold = cfg.ugen.settings.infinity_threshold;
            next = next
                .into_iter()
                .map(|w| {
                    let before = w.len();
                    let kept: Vec<MultiProjPoint> = w
                        .points()
                        .iter()
                        .filter(|p| p.normalized().to_flat(ring)[h].norm() >= threshold)
                        .cloned()
                        .collect();
                    round.dropped_at_infinity += before - kept.len();
                    w.with_points(kept)
                })
                .collect();
        }
        next.retain(|w| !w.is_empty());
        let before = next.len();
        let pruned = eliminate_redundant(next, &cfg.ugen.settings, rng)?;
        round.pruned = before - pruned.sets.len();
        round.membership_paths = pruned.stats.paths;
        current = pruned.sets;
        rounds.push(round);
    }
    Ok(CascadeResult {
        components: current,
        rounds,
    })
}

#[derive(Clone, Debug)]
pub struct Pruned {
    /// Survivors by decreasing dimension, ties in input order.
    pub sets: Vec<WitnessSet>,
    pub stats: PathStats,
    pub warnings: Vec<String>,
}

/// Removes every witness set whose points all lie on some other surviving
/// set of at least its dimension.
pub fn eliminate_redundant<R: Rng>(
    sets: Vec<WitnessSet>,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<Pruned> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(sets[i].dim()));
    let mut alive = vec![true; sets.len()];
    let mut stats = PathStats::default();
    let mut warnings = Vec::new();
    for &i in &order {
        let w = &sets[i];
        let others: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| j != i && alive[j] && sets[j].dim() >= w.dim() && sets[j].ring() == w.ring())
            .collect();
        if others.is_empty() {
            continue;
        }
        let mut all_inside = true;
        for p in w.points() {
            let mut found = false;
            for &j in &others {
                let m = membership(&sets[j], p, settings, rng)?;
                stats.merge(&m.stats);
                if m.stats.failures > 0 {
                    warnings.push(format!(
                        "membership of a point of set {i} in set {j}: {} failed paths",
                        m.stats.failures
                    ));
                }
                if m.member {
                    found = true;
                    break;
                }
            }
            if !found {
                all_inside = false;
                break;
            }
        }
        if all_inside {
            alive[i] = false;
        }
    }
    let sets_out = order
        .iter()
        .filter(|&&i| alive[i])
        .map(|&i| sets[i].clone())
        .collect();
    Ok(Pruned {
        sets: sets_out,
        stats,
        warnings,
    })
}
