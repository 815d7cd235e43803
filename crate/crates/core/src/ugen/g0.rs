use std::sync::Arc;

use crate::algebra::{univariate_roots, Cx, MPoly, PolySystem, Ring};
use crate::error::{Error, Result};
use crate::tracker::MultiProjPoint;
use crate::witness::WitnessSet;

/// Tolerance handed to the univariate solver for start roots.
const ROOT_TOL: f64 = 1e-13;

/// The cone ring of a one-group ring: `u` in front, old variable `j` at
/// `j + 1`.
pub fn cone_ring(ring: &Arc<Ring>) -> Arc<Ring> {
    ring.cone()
}

/// Index map from `ring` into `ring.cone()`.
pub(crate) fn cone_map(ring: &Ring) -> Vec<usize> {
    let k = ring.ngroups();
    (0..ring.nvars()).map(|v| v + k).collect()
}

pub(crate) fn to_cone(p: &MPoly, cone: &Arc<Ring>) -> Result<MPoly> {
    p.recast(cone, &cone_map(p.ring()))
}

pub(crate) fn system_to_cone(f: &PolySystem, cone: &Arc<Ring>) -> Result<PolySystem> {
    f.recast(cone, &cone_map(f.ring()))
}

/// `γ(u^d − ℓ₀^d)` in the cone ring of `ell0`'s ring.
pub fn make_g0(d: u32, ell0: &MPoly, gamma: Cx) -> Result<MPoly> {
    if d == 0 {
        return Err(Error::InvalidDegree("g0 needs degree at least 1".into()));
    }
    let ring = ell0.ring();
    if ring.ngroups() != 1 {
        return Err(Error::InvalidArgument(
            "make_g0 works in one projective space; see make_g0_multi".into(),
        ));
    }
    if ell0.total_degree()? != 1 || !ell0.is_homogeneous() {
        return Err(Error::InvalidArgument("ell0 must be a linear form".into()));
    }
    let cone = cone_ring(ring);
    let u = MPoly::var(&cone, 0);
    let l = to_cone(ell0, &cone)?;
    Ok((&u.pow(d) - &l.pow(d)).scale(gamma))
}

/// Coefficients in `var` of `p` with every other variable fixed at `z`.
pub(crate) fn coefficients_in(p: &MPoly, var: usize, z: &[Cx]) -> Vec<Cx> {
    let mut out: Vec<Cx> = Vec::new();
    for (m, &c) in p.terms() {
        let e = m.exponents()[var] as usize;
        if out.len() <= e {
            out.resize(e + 1, Cx::new(0.0, 0.0));
        }
        let mut v = c;
        for (j, &k) in m.exponents().iter().enumerate() {
            if j != var && k > 0 {
                v *= z[j].powu(k);
            }
        }
        out[e] += v;
    }
    out
}

/// Roots of `p(·, z)` in `var`, requiring exactly `degree` of them.
pub(crate) fn roots_in(p: &MPoly, var: usize, z: &[Cx], degree: usize) -> Result<Vec<Cx>> {
    let mut c = coefficients_in(p, var, z);
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    // drop leading coefficients that vanish at z
    while c.len() > 1 && c.last().unwrap().norm() <= 1e-12 * scale {
        c.pop();
    }
    if c.len() != degree + 1 {
        return Err(Error::InvalidDegree(format!(
            "specialized polynomial has degree {} instead of {degree}",
            c.len().saturating_sub(1)
        )));
    }
    univariate_roots(&c, ROOT_TOL)
}

/// Start points of u-generation: for every witness point `x*` of the curve
/// `w`, the points `[u : x*]` with `g₀(u, x*) = 0`. Returns the witness set
/// `(F ∪ {g₀}, {ℓ}, S₀)` of the cone over the curve cut by `g₀`.
pub fn u_start_points(w: &WitnessSet, g0: &MPoly) -> Result<WitnessSet> {
    if w.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "u-generation starts from a curve, got dimension {}",
            w.dim()
        )));
    }
    if w.ring().ngroups() != 1 {
        return Err(Error::InvalidArgument("u_start_points works in one projective space".into()));
    }
    let cone = cone_ring(w.ring());
    if g0.ring() != &cone {
        return Err(Error::RingMismatch("g0 must live in the cone ring".into()));
    }
    if !g0.is_homogeneous() {
        return Err(Error::InvalidArgument("g0 must be homogeneous".into()));
    }
    let d = g0.total_degree()? as usize;
    let mut points = Vec::with_capacity(d * w.len());
    for (index, p) in w.points().iter().enumerate() {
        let x = p.normalized().to_flat(w.ring());
        let mut z = vec![Cx::new(0.0, 0.0); cone.nvars()];
        z[1..].copy_from_slice(&x);
        let roots = roots_in(g0, 0, &z, d).map_err(|e| Error::StartPoint {
            index,
            msg: e.to_string(),
        })?;
        for u in roots {
            let mut y = z.clone();
            y[0] = u;
            points.push(MultiProjPoint::from_flat(&cone, &y));
        }
    }
    let system = system_to_cone(w.system(), &cone)?.extended([g0.clone()])?;
    let slice = w
        .slice()
        .iter()
        .map(|l| to_cone(l, &cone))
        .collect::<Result<Vec<_>>>()?;
    let expected = points.len();
    let set = WitnessSet::new(system, slice, points, 1)?;
    if set.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "start points collide: {} distinct of {expected} (is g0 generic?)",
            set.len()
        )));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    #[test]
    fn g0_roots_are_rotations_of_ell0() {
        let ring = Ring::indexed("x", 3);
        let ell0 = parse_poly(&ring, "x0 + (2-i)*x1 - 0.5*x2").unwrap();
        let gamma = Cx::from_polar(1.0, 0.7);
        let z = [Cx::new(0.0, 0.0), Cx::new(0.3, -1.1), Cx::new(0.8, 0.2), Cx::new(-0.4, 0.9)];
        let l = ell0.evaluate(&z[1..]).unwrap();
        for d in 1..=5u32 {
            let g0 = make_g0(d, &ell0, gamma).unwrap();
            assert!(g0.is_homogeneous());
            assert_eq!(g0.total_degree().unwrap(), d);
            let roots = roots_in(&g0, 0, &z, d as usize).unwrap();
            for k in 0..d {
                let zeta = Cx::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64);
                let want = l * zeta;
                assert!(roots.iter().any(|r| (r - want).norm() < 1e-12), "d={d} k={k}");
            }
        }
        assert!(make_g0(0, &ell0, gamma).is_err());
    }

    #[test]
    fn make_g0_matches_the_parabola_choice() {
        let ring = Ring::single(&["x0", "x1", "x2"]).unwrap();
        let x0 = parse_poly(&ring, "x0").unwrap();
        let g0 = make_g0(2, &x0, Cx::new(-1.0, 0.0)).unwrap();
        let cone = cone_ring(&ring);
        assert_eq!(g0, parse_poly(&cone, "x0^2 - u^2").unwrap());
    }
}
