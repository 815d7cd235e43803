use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Cx, Ring};

/// Relative slack when picking the coordinate that gets argument zero, so
/// that numerically tied coordinates resolve to the first one.
const TIE_SLACK: f64 = 1e-6;

/// Default chordal tolerance for identifying endpoints.
pub const DEDUP_TOL: f64 = 1e-6;

/// A point of a product of projective spaces, one coordinate vector per
/// factor. Factor `g` lists the coordinates of ring group `g` in group order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiProjPoint {
    pub factors: Vec<Vec<Cx>>,
}

impl MultiProjPoint {
    pub fn new(factors: Vec<Vec<Cx>>) -> Self {
        MultiProjPoint { factors }
    }

    /// Splits a flat coordinate vector (ring order) into factors.
    pub fn from_flat(ring: &Ring, z: &[Cx]) -> Self {
        let factors = ring
            .groups()
            .iter()
            .map(|g| g.iter().map(|&v| z[v]).collect())
            .collect();
        MultiProjPoint { factors }
    }

    /// Flat coordinates in ring order.
    pub fn to_flat(&self, ring: &Ring) -> Vec<Cx> {
        let mut z = vec![Cx::new(0.0, 0.0); ring.nvars()];
        for (g, members) in ring.groups().iter().enumerate() {
            for (k, &v) in members.iter().enumerate() {
                z[v] = self.factors[g][k];
            }
        }
        z
    }

    /// Unit norm per factor, with the first (up to ties) largest coordinate
    /// real and positive.
    pub fn normalized(&self) -> Self {
        MultiProjPoint {
            factors: self.factors.iter().map(|f| normalize_factor(f)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.factors
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Coordinates of the factors as `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        self.factors
            .iter()
            .map(|f| f.iter().map(|c| [c.re, c.im]).collect())
            .collect()
    }

    pub fn from_pairs(pairs: &[Vec<[f64; 2]>]) -> Self {
        MultiProjPoint {
            factors: pairs
                .iter()
                .map(|f| f.iter().map(|p| Cx::new(p[0], p[1])).collect())
                .collect(),
        }
    }
}

fn pivot(v: &[Cx]) -> Option<usize> {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return None;
    }
    v.iter().position(|c| c.norm() >= max * (1.0 - TIE_SLACK))
}

fn normalize_factor(v: &[Cx]) -> Vec<Cx> {
    let Some(k) = pivot(v) else {
        return v.to_vec();
    };
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() <= 4.0 * f64::EPSILON && v[k].im == 0.0 && v[k].re > 0.0 {
        return v.to_vec();
    }
    let phase = v[k].conj() / v[k].norm();
    let mut out: Vec<Cx> = v.iter().map(|c| c * phase / norm).collect();
    out[k].im = 0.0;
    out
}

/// Distance between the lines spanned by two unit vectors, insensitive to
/// phase: `min_θ |p - e^{iθ} q|`.
pub fn chordal_factor(p: &[Cx], q: &[Cx]) -> f64 {
    let inner: Cx = p.iter().zip(q).map(|(a, b)| b.conj() * a).sum();
    let n = inner.norm();
    let phase = if n > 0.0 { inner / n } else { Cx::new(1.0, 0.0) };
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Largest per-factor chordal distance between two normalized points.
pub fn chordal_distance(p: &MultiProjPoint, q: &MultiProjPoint) -> f64 {
    p.factors
        .iter()
        .zip(&q.factors)
        .map(|(a, b)| chordal_factor(a, b))
        .fold(0.0, f64::max)
}

/// Result of greedy clustering: one representative per cluster plus the
/// number of inputs that fell into each cluster.
#[derive(Clone, Debug, Default)]
pub struct Deduped {
    pub points: Vec<MultiProjPoint>,
    pub cluster_sizes: Vec<usize>,
    /// For every input, the index of its cluster.
    pub assignment: Vec<usize>,
}

/// Greedy clustering under chordal distance. The first point of each
/// cluster is its representative; input order is preserved.
pub fn dedup_endpoints(points: &[MultiProjPoint], tol: f64) -> Deduped {
    let mut out = Deduped::default();
    for p in points {
        match out.points.iter().position(|q| chordal_distance(p, q) <= tol) {
            Some(k) => {
                out.cluster_sizes[k] += 1;
                out.assignment.push(k);
            }
            None => {
                out.assignment.push(out.points.len());
                out.points.push(p.clone());
                out.cluster_sizes.push(1);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteWhen {
    /// Finite points have this coordinate away from zero (a homogenizer).
    Large,
    /// Finite points have this coordinate at zero (a cone variable).
    Small,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordRule {
    pub factor: usize,
    /// Position inside the factor.
    pub coord: usize,
    pub finite_when: FiniteWhen,
}

/// Which coordinate patterns count as finite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteCriterion {
    pub rules: Vec<CoordRule>,
}

impl FiniteCriterion {
    /// Homogenizers must be large and cone variables small.
    pub fn from_ring(ring: &Ring) -> Self {
        let mut rules = Vec::new();
        for (g, members) in ring.groups().iter().enumerate() {
            let pos = |v: usize| members.iter().position(|&m| m == v).unwrap();
            if let Some(c) = ring.cone_var(g) {
                rules.push(CoordRule {
                    factor: g,
                    coord: pos(c),
                    finite_when: FiniteWhen::Small,
                });
            }
            if let Some(h) = ring.homogenizer(g) {
                rules.push(CoordRule {
                    factor: g,
                    coord: pos(h),
                    finite_when: FiniteWhen::Large,
                });
            }
        }
        FiniteCriterion { rules }
    }

    /// Keeps only the cone-variable rules.
    pub fn cones_only(&self) -> Self {
        FiniteCriterion {
            rules: self
                .rules
                .iter()
                .copied()
                .filter(|r| r.finite_when == FiniteWhen::Small)
                .collect(),
        }
    }

    pub fn none() -> Self {
        FiniteCriterion::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Finite,
    AtInfinity(Vec<usize>),
}

impl Verdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, Verdict::Finite)
    }
}

/// Classifies a normalized point. A factor is at infinity when one of its
/// rules fails at `threshold`.
pub fn classify_endpoint(p: &MultiProjPoint, criterion: &FiniteCriterion, threshold: f64) -> Verdict {
    let mut bad: Vec<usize> = Vec::new();
    for r in &criterion.rules {
        let m = p.factors[r.factor][r.coord].norm();
        let ok = match r.finite_when {
            FiniteWhen::Large => m >= threshold,
            FiniteWhen::Small => m < threshold,
        };
        if !ok && !bad.contains(&r.factor) {
            bad.push(r.factor);
        }
    }
    if bad.is_empty() {
        Verdict::Finite
    } else {
        bad.sort_unstable();
        Verdict::AtInfinity(bad)
    }
}

/// Drops the coordinates of `vars` (flat ring indices) from a point of
/// `ring`, giving a point of the ring with those variables removed.
pub fn project_out(ring: &Arc<Ring>, p: &MultiProjPoint, vars: &[usize]) -> MultiProjPoint {
    let factors = ring
        .groups()
        .iter()
        .enumerate()
        .map(|(g, members)| {
            members
                .iter()
                .enumerate()
                .filter(|(_, v)| !vars.contains(v))
                .map(|(k, _)| p.factors[g][k])
                .collect()
        })
        .collect();
    MultiProjPoint { factors }.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn pt(v: &[f64]) -> MultiProjPoint {
        MultiProjPoint::new(vec![v.iter().map(|&x| Cx::new(x, 0.0)).collect()])
    }

    #[test]
    fn normalization_is_idempotent_bitwise() {
        let mut r = rng::stream(3, 0);
        for _ in 0..200 {
            let p = MultiProjPoint::new(vec![
                (0..5).map(|_| rng::gaussian(&mut r) * 7.0).collect(),
                (0..3).map(|_| rng::gaussian(&mut r)).collect(),
            ]);
            let n1 = p.normalized();
            let n2 = n1.normalized();
            assert_eq!(n1, n2);
        }
    }

    #[test]
    fn ties_pick_the_first_coordinate() {
        let a = pt(&[0.0, 1.0, -1.0, -1.0]).normalized();
        let b = pt(&[0.0, -1.0, 1.0 + 1e-12, 1.0]).normalized();
        assert!(a.factors[0][1].re > 0.0);
        assert!(chordal_distance(&a, &b) < 1e-11);
        for (x, y) in a.factors[0].iter().zip(&b.factors[0]) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn vertex_is_at_infinity_under_cone_rule() {
        let crit = FiniteCriterion {
            rules: vec![CoordRule {
                factor: 0,
                coord: 0,
                finite_when: FiniteWhen::Small,
            }],
        };
        let table = pt(&[0.0, 1.0, -1.0, -1.0]).normalized();
        assert_eq!(classify_endpoint(&table, &crit, 1e-6), Verdict::Finite);
        let vertex = pt(&[1.0, 0.0, 0.0, 0.0]).normalized();
        assert_eq!(classify_endpoint(&vertex, &crit, 1e-6), Verdict::AtInfinity(vec![0]));
    }

    #[test]
    fn dedup_merges_copies_and_keeps_perturbed_clusters() {
        let p = pt(&[1.0, 2.0, 3.0]).normalized();
        assert_eq!(dedup_endpoints(&[p.clone(), p.clone()], 1e-6).points.len(), 1);

        let mut r = rng::stream(9, 0);
        let centers: Vec<MultiProjPoint> = (0..10)
            .map(|_| MultiProjPoint::new(vec![rng::unit_sphere(&mut r, 4)]).normalized())
            .collect();
        let mut cloud = Vec::new();
        for c in &centers {
            for _ in 0..3 {
                let f = c.factors[0]
                    .iter()
                    .map(|z| z + rng::gaussian(&mut r) * 1e-9)
                    .collect();
                cloud.push(MultiProjPoint::new(vec![f]).normalized());
            }
        }
        let d = dedup_endpoints(&cloud, 1e-6);
        assert_eq!(d.points.len(), 10);
        assert!(d.cluster_sizes.iter().all(|&s| s == 3));
    }

    #[test]
    fn flat_round_trip_respects_group_order() {
        let ring = Ring::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![2, 0], vec![1]],
            vec![None, None],
        )
        .unwrap();
        let z = vec![Cx::new(1.0, 0.0), Cx::new(2.0, 0.0), Cx::new(3.0, 0.0)];
        let p = MultiProjPoint::from_flat(&ring, &z);
        assert_eq!(p.factors[0], vec![Cx::new(3.0, 0.0), Cx::new(1.0, 0.0)]);
        assert_eq!(p.to_flat(&ring), z);
    }
}
