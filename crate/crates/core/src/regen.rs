//! Regeneration: replace `g₁` by a product of `d` random linear forms whose
//! witness points are prepared by slice moves, then deform the product
//! into `g₁`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::MPoly;
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::{
    make_straight_line, random_charts, track_batch, FiniteCriterion, MultiProjPoint, PathStats,
    TrackerSettings,
};
use crate::ugen::{
    collect, reduce_to_curve, run_rounds, split_by, square_up, IntersectDiagnostics, Intersection,
    DEFAULT_ROUNDS,
};
use crate::witness::{move_slice, WitnessSet};

/// Start data of the regeneration homotopy.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// The factors `λ₁ … λ_d`; `λ₁` is the curve's own slice.
    pub lambdas: Vec<MPoly>,
    /// Points of the curve on `V(λ_i)`, tagged with `i`.
    pub starts: Vec<(usize, MultiProjPoint)>,
    pub paths: usize,
    pub stats: PathStats,
}

/// Moves the curve's witness points to `d − 1` further random slices.
pub fn regen_prepare<R: Rng>(
    w: &WitnessSet,
    d: u32,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<Prepared> {
    if w.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "regeneration prepares a curve, got dimension {}",
            w.dim()
        )));
    }
    if d == 0 {
        return Err(Error::InvalidDegree("regeneration needs d ≥ 1".into()));
    }
    let group = w.slice()[0]
        .support()
        .first()
        .map(|&v| w.ring().group_of(v))
        .unwrap_or(0);
    let mut lambdas = vec![w.slice()[0].clone()];
    let mut starts: Vec<(usize, MultiProjPoint)> = w.points().iter().map(|p| (0, p.clone())).collect();
    let mut stats = PathStats::default();
    for i in 1..d as usize {
        let lam = rng::linear_form(rng, w.ring(), group);
        let moved = move_slice(w, std::slice::from_ref(&lam), settings, rng)?;
        stats.merge(&moved.stats);
        starts.extend(moved.set.points().iter().map(|p| (i, p.clone())));
        lambdas.push(lam);
    }
    Ok(Prepared {
        lambdas,
        starts,
        paths: stats.paths,
        stats,
    })
}

/// Intersects the variety of `w` with `V(g1)` by regeneration. Same output
/// contract as [`crate::ugen::intersect_hypersurface`]; the preparation
/// paths are reported separately in the diagnostics.
pub fn regen_intersect<R: Rng>(
    w: &WitnessSet,
    g1: &MPoly,
    settings: &TrackerSettings,
    rng: &mut R,
) -> Result<Intersection> {
    regen_intersect_rounds(w, g1, settings, DEFAULT_ROUNDS, rng)
}

/// [`regen_intersect`] with an explicit bound on repeated runs.
pub fn regen_intersect_rounds<R: Rng>(
    w: &WitnessSet,
    g1: &MPoly,
    settings: &TrackerSettings,
    max_rounds: usize,
    rng: &mut R,
) -> Result<Intersection> {
    settings.validate()?;
    let ring = w.ring().clone();
    if ring.ngroups() != 1 {
        return Err(Error::InvalidArgument("regen_intersect works in one projective space".into()));
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
    let n = ring.factor_dims()[0];
    let out_sys = w.system().extended([g1.clone()])?;
    let rest = &w.slice()[..w.dim() - 1];
    let check: Vec<&MPoly> = out_sys.polys().iter().chain(rest).collect();
    let points = run_rounds(max_rounds, &mut diag, |rd| {
        let prep = regen_prepare(&z, d, settings, rng)?;
        rd.prep_paths = prep.paths;
        rd.prep_stats = prep.stats;
        let f = if z.system().len() + 1 > n {
            square_up(z.system(), n - 1, rng)?
        } else {
            z.system().clone()
        };
        let product = prep
            .lambdas
            .iter()
            .skip(1)
            .fold(prep.lambdas[0].clone(), |acc, l| &acc * l);
        let start = f.extended([product])?;
        let target = f.extended([g1.clone()])?;
        let charts = random_charts(&ring, rng);
        let gamma = rng::unit_circle(rng);
        let h = make_straight_line(&start, &target, gamma, &charts)?;
        let starts = prep
            .starts
            .iter()
            .map(|(_, p)| h.chart_point(p))
            .collect::<Result<Vec<_>>>()?;
        let results = track_batch(&h, &starts, 0.0, settings, &FiniteCriterion::none());
        rd.paths = results.len();
        rd.stats = PathStats::of(&results);
        Ok(collect(&results, |p| p.normalized(), &check, rd))
    })?;
    let lower = WitnessSet::new(out_sys, rest.to_vec(), points, w.dim() - 1)?;
    Ok(Intersection {
        same_dim,
        lower: Some(lower),
        diagnostics: diag,
    })
}

/// Predicted path counts of the two methods on a curve of degree `deg_x`
/// and a hypersurface of degree `deg_g1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Savings {
    pub ugen_paths: u64,
    pub regen_paths: u64,
    /// `ugen_paths / regen_paths = 1 / (2 − 1/deg g₁)`.
    pub ratio: f64,
}

pub fn savings_report(deg_g1: u64, deg_x: u64) -> Result<Savings> {
    if deg_g1 == 0 || deg_x == 0 {
        return Err(Error::InvalidArgument("degrees must be positive".into()));
    }
    let ugen_paths = deg_g1 * deg_x;
    let regen_paths = (2 * deg_g1 - 1) * deg_x;
    Ok(Savings {
        ugen_paths,
        regen_paths,
        ratio: ugen_paths as f64 / regen_paths as f64,
    })
}

/// Ratio of measured path totals, `ugen / regen`.
pub fn measured_ratio(ugen_paths: usize, regen_paths: usize) -> f64 {
    ugen_paths as f64 / regen_paths as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn savings_formula() {
        let s = savings_report(2, 128).unwrap();
        assert_eq!((s.ugen_paths, s.regen_paths), (256, 384));
        assert!((s.ratio - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(savings_report(1, 7).unwrap().ratio, 1.0);
        let big = savings_report(1_000_000, 3).unwrap().ratio;
        assert!((big - 0.5).abs() < 1e-6);
        assert!(savings_report(0, 3).is_err());
    }
}
