use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::homotopy::{Eliminated, Homotopy, Workspace};
use super::point::{classify_endpoint, FiniteCriterion, MultiProjPoint, Verdict};
use crate::algebra::Cx;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerSettings {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_corrector_iters: usize,
    /// Residual (max-norm) a corrected point must reach.
    pub corrector_tol: f64,
    /// Largest first Newton correction accepted, relative to `1 + |x|`.
    pub max_correction: f64,
    pub max_steps: usize,
    pub successes_before_increase: usize,
    pub infinity_threshold: f64,
    pub endpoint_refine_tol: f64,
    /// Condition number above which an endpoint counts as singular.
    pub singular_condition: f64,
    pub seed: u64,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        TrackerSettings {
            initial_step: 0.01,
            max_step: 0.1,
            min_step: 1e-8,
            max_corrector_iters: 3,
            corrector_tol: 1e-8,
            max_correction: 0.01,
            max_steps: 20_000,
            successes_before_increase: 4,
            infinity_threshold: 1e-6,
            endpoint_refine_tol: 1e-10,
            singular_condition: 1e10,
            seed: 0,
        }
    }
}

impl TrackerSettings {
    /// The tighter settings used for the likelihood systems.
    pub fn mle() -> Self {
        TrackerSettings {
            min_step: 1e-14,
            max_corrector_iters: 2,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step < 1.0
            && self.max_corrector_iters >= 1
            && self.corrector_tol > 0.0
            && self.infinity_threshold > 0.0
            && self.endpoint_refine_tol > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("inconsistent tracker settings {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Success,
    AtInfinity,
    MinStepFailure,
    MaxStepsExceeded,
    Singular,
}

impl PathStatus {
    pub fn is_failure(self) -> bool {
        !matches!(self, PathStatus::Success | PathStatus::AtInfinity)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathResult {
    pub status: PathStatus,
    /// Normalized endpoint in the homotopy's ring.
    pub endpoint: MultiProjPoint,
    pub t_reached: f64,
    pub steps_taken: usize,
    pub final_residual: f64,
    pub final_condition_estimate: f64,
}

impl PathResult {
    pub fn is_success(&self) -> bool {
        self.status == PathStatus::Success
    }
}

fn norm(x: &[Cx]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest scaled row value of the last evaluation.
fn residual(ws: &Workspace) -> f64 {
    ws.vals
        .iter()
        .zip(&ws.scales)
        .map(|(v, s)| v.norm() / s)
        .fold(0.0, f64::max)
}

fn solve(jac: &DMatrix<Cx>, rhs: &[Cx]) -> Option<Vec<Cx>> {
    let mut b = DVector::from_column_slice(rhs);
    if !jac.clone().lu().solve_mut(&mut b) {
        return None;
    }
    if b.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return None;
    }
    Some(b.as_slice().to_vec())
}

/// Condition number of a square matrix from its singular values.
pub fn condition_number(jac: &DMatrix<Cx>) -> f64 {
    let sv = jac.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Condition number of the Jacobian with every row divided by its scale.
fn scaled_condition(ws: &Workspace) -> f64 {
    let mut j = ws.jac.clone();
    for (i, s) in ws.scales.iter().enumerate() {
        j.row_mut(i).unscale_mut(*s);
    }
    condition_number(&j)
}

/// Newton at fixed `t` until the residual drops below `tol`.
pub fn newton(
    h: &dyn Homotopy,
    x: &mut Vec<Cx>,
    t: f64,
    max_iters: usize,
    tol: f64,
    ws: &mut Workspace,
) -> Option<f64> {
    for k in 0..=max_iters {
        h.evaluate(x, t, ws);
        let r = residual(ws);
        if !r.is_finite() {
            return None;
        }
        if r <= tol && k > 0 {
            return Some(r);
        }
        if k == max_iters {
            return None;
        }
        let dx = solve(&ws.jac, &ws.vals)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi -= d;
        }
    }
    None
}

/// Tangent `dx/dt = −J⁻¹ H_t` at `(x, t)`; `ws` must already hold `H(x,t)`.
fn tangent(ws: &Workspace) -> Option<Vec<Cx>> {
    let mut v = solve(&ws.jac, &ws.dt)?;
    v.iter_mut().for_each(|c| *c = -*c);
    Some(v)
}

fn axpy(x: &[Cx], a: f64, v: &[Cx]) -> Vec<Cx> {
    x.iter().zip(v).map(|(xi, vi)| xi + vi * a).collect()
}

fn rk4(h: &dyn Homotopy, x: &[Cx], t: f64, dt: f64, ws: &mut Workspace) -> Option<Vec<Cx>> {
    h.evaluate(x, t, ws);
    let k1 = tangent(ws)?;
    h.evaluate(&axpy(x, dt / 2.0, &k1), t + dt / 2.0, ws);
    let k2 = tangent(ws)?;
    h.evaluate(&axpy(x, dt / 2.0, &k2), t + dt / 2.0, ws);
    let k3 = tangent(ws)?;
    h.evaluate(&axpy(x, dt, &k3), t + dt, ws);
    let k4 = tangent(ws)?;
    Some(
        (0..x.len())
            .map(|i| x[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
            .collect(),
    )
}

/// Largest accepted ratio of consecutive Newton corrections.
const CONTRACTION: f64 = 0.5;

/// Newton at fixed `t` from a predicted point. Accepts once the residual is
/// below `corrector_tol`; rejects large first corrections.
fn correct(
    h: &dyn Homotopy,
    x: &mut Vec<Cx>,
    t: f64,
    s: &TrackerSettings,
    ws: &mut Workspace,
) -> bool {
    let mut last = f64::INFINITY;
    for k in 0..=s.max_corrector_iters {
        h.evaluate(x, t, ws);
        let r = residual(ws);
        if !r.is_finite() {
            return false;
        }
        if r <= s.corrector_tol && k > 0 {
            return true;
        }
        if k == s.max_corrector_iters {
            return false;
        }
        let Some(dx) = solve(&ws.jac, &ws.vals) else {
            return false;
        };
        let size = norm(&dx);
        if k == 0 && size > s.max_correction * (1.0 + norm(x)) {
            return false;
        }
        // Newton must contract quickly, or the prediction may sit near another path
        if size > CONTRACTION * last && size > 1e-10 * (1.0 + norm(x)) {
            return false;
        }
        last = size;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi -= d;
        }
    }
    false
}

/// Outcome of following a path over `[t0, t1]`.
#[derive(Clone, Debug)]
pub struct Segment {
    pub x: Vec<Cx>,
    pub t: f64,
    pub steps: usize,
    pub failure: Option<PathStatus>,
}

/// Predictor-corrector continuation from `(x, t0)` to `t1`.
pub fn track_segment(
    h: &dyn Homotopy,
    x: Vec<Cx>,
    t0: f64,
    t1: f64,
    s: &TrackerSettings,
    ws: &mut Workspace,
    steps_before: usize,
) -> Segment {
    let mut x = x;
    let mut t = t0;
    let mut step = s.initial_step;
    let mut streak = 0;
    let mut steps = steps_before;
    while t < t1 {
        if steps >= s.max_steps {
            return Segment {
                x,
                t,
                steps,
                failure: Some(PathStatus::MaxStepsExceeded),
            };
        }
        steps += 1;
        let dt = step.min(t1 - t);
        let t_next = if dt == t1 - t { t1 } else { t + dt };
        let accepted = match rk4(h, &x, t, t_next - t, ws) {
            Some(mut pred) => {
                if correct(h, &mut pred, t_next, s, ws) {
                    x = pred;
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        if accepted {
            t = t_next;
            streak += 1;
            if streak >= s.successes_before_increase {
                step = (step * 2.0).min(s.max_step);
                streak = 0;
            }
        } else {
            step /= 2.0;
            streak = 0;
            if step < s.min_step {
                return Segment {
                    x,
                    t,
                    steps,
                    failure: Some(PathStatus::MinStepFailure),
                };
            }
        }
    }
    Segment {
        x,
        t,
        steps,
        failure: None,
    }
}

fn finish(
    h: &dyn Homotopy,
    seg: Segment,
    s: &TrackerSettings,
    criterion: &FiniteCriterion,
    ws: &mut Workspace,
) -> PathResult {
    let Segment {
        mut x,
        t,
        steps,
        failure,
    } = seg;
    h.evaluate(&x, t, ws);
    let mut res = residual(ws);
    let condition = scaled_condition(ws);
    let endpoint_of = |x: &[Cx]| MultiProjPoint::from_flat(h.ring(), &h.lift(x, t)).normalized();
    if let Some(status) = failure {
        return PathResult {
            status,
            endpoint: endpoint_of(&x),
            t_reached: t,
            steps_taken: steps,
            final_residual: res,
            final_condition_estimate: condition,
        };
    }
    let verdict = classify_endpoint(&endpoint_of(&x), criterion, s.infinity_threshold);
    let singular = !(condition <= s.singular_condition);
    let mut status = match verdict {
        Verdict::AtInfinity(_) => PathStatus::AtInfinity,
        Verdict::Finite if singular => PathStatus::Singular,
        Verdict::Finite => PathStatus::Success,
    };
    if !singular {
        let mut y = x.clone();
        let mut refined = false;
        for _ in 0..10 {
            h.evaluate(&y, t, ws);
            let Some(dy) = solve(&ws.jac, &ws.vals) else {
                break;
            };
            for (yi, d) in y.iter_mut().zip(&dy) {
                *yi -= d;
            }
            if norm(&dy) <= s.endpoint_refine_tol * norm(&y) {
                refined = true;
                break;
            }
        }
        h.evaluate(&y, t, ws);
        let r = residual(ws);
        if r.is_finite() && r <= res.max(s.corrector_tol) {
            x = y;
            res = r;
        }
        if status == PathStatus::Success && (!refined || res > s.corrector_tol) {
            status = PathStatus::Singular;
        }
    }
    let endpoint = endpoint_of(&x);
    if status == PathStatus::Success && !classify_endpoint(&endpoint, criterion, s.infinity_threshold).is_finite() {
        status = PathStatus::AtInfinity;
    }
    PathResult {
        status,
        endpoint,
        t_reached: t,
        steps_taken: steps,
        final_residual: res,
        final_condition_estimate: condition,
    }
}

fn start_failure(h: &dyn Homotopy, x: &[Cx], t: f64, ws: &mut Workspace) -> PathResult {
    h.evaluate(x, t, ws);
    PathResult {
        status: PathStatus::MinStepFailure,
        endpoint: MultiProjPoint::from_flat(h.ring(), &h.lift(x, t)).normalized(),
        t_reached: t,
        steps_taken: 0,
        final_residual: residual(ws),
        final_condition_estimate: scaled_condition(ws),
    }
}

/// Tracks one path from `(x0, t_start)` to `t = 1`, refines and classifies
/// the endpoint.
pub fn track_path(
    h: &dyn Homotopy,
    x0: &[Cx],
    t_start: f64,
    s: &TrackerSettings,
    criterion: &FiniteCriterion,
) -> PathResult {
    let mut ws = h.workspace();
    let mut x = x0.to_vec();
    if newton(h, &mut x, t_start, 8, s.corrector_tol, &mut ws).is_none() {
        return start_failure(h, x0, t_start, &mut ws);
    }
    let seg = track_segment(h, x, t_start, 1.0, s, &mut ws, 0);
    finish(h, seg, s, criterion, &mut ws)
}

/// Tracks on `full` up to `reduced.t_min()`, then continues on the reduced
/// homotopy. `x0` is a state of `full`.
pub fn track_path_switching(
    full: &dyn Homotopy,
    reduced: &Eliminated<'_>,
    x0: &[Cx],
    t_start: f64,
    s: &TrackerSettings,
    criterion: &FiniteCriterion,
) -> PathResult {
    let mut ws = full.workspace();
    let mut x = x0.to_vec();
    if newton(full, &mut x, t_start, 8, s.corrector_tol, &mut ws).is_none() {
        return start_failure(full, x0, t_start, &mut ws);
    }
    let t_switch = reduced.t_min().max(t_start);
    let first = track_segment(full, x, t_start, t_switch, s, &mut ws, 0);
    if first.failure.is_some() {
        return finish(full, first, s, criterion, &mut ws);
    }
    let mut rws = reduced.workspace();
    let y = reduced.restrict(&first.x);
    let seg = track_segment(reduced, y, t_switch, 1.0, s, &mut rws, first.steps);
    finish(reduced, seg, s, criterion, &mut rws)
}

/// [`track_path`] over many starts; results come back in start order.
pub fn track_batch(
    h: &dyn Homotopy,
    starts: &[Vec<Cx>],
    t_start: f64,
    s: &TrackerSettings,
    criterion: &FiniteCriterion,
) -> Vec<PathResult> {
    starts
        .par_iter()
        .map(|x| track_path(h, x, t_start, s, criterion))
        .collect()
}

pub fn track_batch_switching(
    full: &dyn Homotopy,
    reduced: &Eliminated<'_>,
    starts: &[Vec<Cx>],
    t_start: f64,
    s: &TrackerSettings,
    criterion: &FiniteCriterion,
) -> Vec<PathResult> {
    starts
        .par_iter()
        .map(|x| track_path_switching(full, reduced, x, t_start, s, criterion))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, PolySystem, Ring};
    use crate::rng;
    use crate::tracker::homotopy::{make_straight_line, random_charts};

    #[test]
    fn square_root_path() {
        // (x^2 - h^2) ~> (x^2 - 4 h^2), chart h = 1: x = sqrt(1 + 3t).
        let ring = Ring::single(&["x", "h"]).unwrap();
        let s = PolySystem::new(&ring, vec![parse_poly(&ring, "x^2 - h^2").unwrap()]).unwrap();
        let f = PolySystem::new(&ring, vec![parse_poly(&ring, "x^2 - 4*h^2").unwrap()]).unwrap();
        let chart = parse_poly(&ring, "h - 1").unwrap();
        let h = make_straight_line(&s, &f, Cx::new(1.0, 0.0), &[chart]).unwrap();
        let x0 = vec![Cx::new(1.0, 0.0), Cx::new(1.0, 0.0)];
        let mut ws = h.workspace();
        let seg = track_segment(&h, x0, 0.0, 1.0, &TrackerSettings::default(), &mut ws, 0);
        assert!(seg.failure.is_none());
        assert!((seg.x[0] - Cx::new(2.0, 0.0)).norm() < 1e-10);
        let r = track_path(
            &h,
            &[Cx::new(1.0, 0.0), Cx::new(1.0, 0.0)],
            0.0,
            &TrackerSettings::default(),
            &FiniteCriterion::none(),
        );
        assert_eq!(r.status, PathStatus::Success);
    }

    #[test]
    fn constant_homotopy_returns_its_start() {
        let ring = Ring::indexed("x", 3);
        let f = PolySystem::new(
            &ring,
            vec![
                parse_poly(&ring, "x0^2 - x1*x2").unwrap(),
                parse_poly(&ring, "x1 - 2*x2").unwrap(),
            ],
        )
        .unwrap();
        let charts = random_charts(&ring, &mut rng::stream(4, 0));
        let h = make_straight_line(&f, &f, Cx::new(1.0, 0.0), &charts).unwrap();
        let p = MultiProjPoint::new(vec![vec![
            Cx::new(2f64.sqrt(), 0.0),
            Cx::new(2.0, 0.0),
            Cx::new(1.0, 0.0),
        ]]);
        let x0 = h.chart_point(&p).unwrap();
        let r = track_path(&h, &x0, 0.0, &TrackerSettings::default(), &FiniteCriterion::none());
        assert_eq!(r.status, PathStatus::Success);
        assert!(super::super::point::chordal_distance(&r.endpoint, &p.normalized()) < 1e-12);
    }

    #[test]
    fn settings_validation() {
        assert!(TrackerSettings::default().validate().is_ok());
        assert!(TrackerSettings::mle().validate().is_ok());
        let bad = TrackerSettings {
            min_step: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
