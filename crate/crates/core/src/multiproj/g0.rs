use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Cx, MPoly, Ring};
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::MultiProjPoint;
use crate::ugen::{roots_in, to_cone};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum G0Variant {
    /// `∏_i (u_i^{d_i} − ℓ_i^{d_i})`.
    #[default]
    Binomial,
    /// `∏_i ∏_{a ≤ d_i} (u_i − ℓ_{i,a})`.
    ProductOfLinears,
}

fn check_group(l: &MPoly, g: usize) -> Result<()> {
    let ring = l.ring();
    if l.total_degree()? != 1 || !l.is_homogeneous() || l.support().iter().any(|&v| ring.group_of(v) != g) {
        return Err(Error::InvalidArgument(format!(
            "linear form for group {g} must be linear in that group's variables"
        )));
    }
    Ok(())
}

/// The start hypersurface on the multi-cone of `ring` for a target of
/// multidegree `degrees`. `linears[i]` holds the forms of group `i`: one
/// for [`G0Variant::Binomial`], `d_i` for [`G0Variant::ProductOfLinears`];
/// groups of degree zero contribute no factor.
pub fn make_g0_multi(
    ring: &Arc<Ring>,
    degrees: &[u32],
    linears: &[Vec<MPoly>],
    gamma: Cx,
    variant: G0Variant,
) -> Result<MPoly> {
    let k = ring.ngroups();
    if degrees.len() != k || linears.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: degrees.len().min(linears.len()),
        });
    }
    let cone = ring.cone();
    let mut g0 = MPoly::constant(&cone, gamma);
    for (i, (&d, forms)) in degrees.iter().zip(linears).enumerate() {
        if d == 0 {
            continue;
        }
        for l in forms {
            if l.ring() != ring {
                return Err(Error::RingMismatch(format!("linear form of group {i} lives in another ring")));
            }
            check_group(l, i)?;
        }
        let u = MPoly::var(&cone, i);
        match variant {
            G0Variant::Binomial => {
                let l = forms.first().ok_or_else(|| {
                    Error::InvalidArgument(format!("group {i} needs a linear form"))
                })?;
                let l = to_cone(l, &cone)?;
                g0 = &g0 * &(&u.pow(d) - &l.pow(d));
            }
            G0Variant::ProductOfLinears => {
                if forms.len() != d as usize {
                    return Err(Error::InvalidArgument(format!(
                        "group {i} needs {d} linear forms, got {}",
                        forms.len()
                    )));
                }
                for l in forms {
                    g0 = &g0 * &(&u - &to_cone(l, &cone)?);
                }
            }
        }
    }
    Ok(g0)
}

/// [`make_g0_multi`] with random linear forms and unit `γ`.
pub fn random_g0_multi<R: Rng>(
    ring: &Arc<Ring>,
    degrees: &[u32],
    variant: G0Variant,
    rng: &mut R,
) -> Result<MPoly> {
    let linears: Vec<Vec<MPoly>> = degrees
        .iter()
        .enumerate()
        .map(|(g, &d)| {
            let count = match variant {
                G0Variant::Binomial => usize::from(d > 0),
                G0Variant::ProductOfLinears => d as usize,
            };
            (0..count).map(|_| rng::linear_form(rng, ring, g)).collect()
        })
        .collect();
    make_g0_multi(ring, degrees, &linears, Cx::new(1.0, 0.0), variant)
}

/// Number of u-generation paths for a curve with witness counts `degrees_x`
/// (one per group) and a hypersurface of multidegree `g1_degree`.
pub fn expected_path_count(degrees_x: &[usize], g1_degree: &[u32]) -> Result<usize> {
    if degrees_x.len() != g1_degree.len() {
        return Err(Error::DimensionMismatch {
            expected: degrees_x.len(),
            got: g1_degree.len(),
        });
    }
    Ok(degrees_x
        .iter()
        .zip(g1_degree)
        .map(|(&w, &d)| w * d as usize)
        .sum())
}

/// Approximate points of the u-homotopy at `t = ε`.
#[derive(Clone, Debug)]
pub struct MultiStarts {
    /// Points of the multi-cone ring.
    pub points: Vec<MultiProjPoint>,
    /// `(group, index into that group's witness points)` of each point.
    pub origin: Vec<(usize, usize)>,
}

/// For each group `i` and witness point `P` of the curve sliced in group
/// `i` (by `slices[i].0`), the points whose group `i` cone coordinate is a
/// root of `g₀` with every other factor at `[1 : 0]`, and whose other cone
/// coordinates solve `(1−ε)γℓ_j + ε u_j = 0`.
pub fn u_multiproj_start_points(
    slices: &[(MPoly, Vec<MultiProjPoint>)],
    g0: &MPoly,
    gamma: Cx,
    epsilon: f64,
) -> Result<MultiStarts> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    let Some((first, _)) = slices.first() else {
        return Err(Error::InvalidArgument("no slices given".into()));
    };
    let ring = first.ring().clone();
    let k = ring.ngroups();
    if slices.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: slices.len(),
        });
    }
    for (g, (l, _)) in slices.iter().enumerate() {
        check_group(l, g)?;
    }
    let cone = ring.cone();
    if g0.ring() != &cone {
        return Err(Error::RingMismatch("g0 must live in the multi-cone ring".into()));
    }
    let degrees = g0.multidegree()?;
    let mut points = Vec::new();
    let mut origin = Vec::new();
    for (i, (_, wi)) in slices.iter().enumerate() {
        let d = degrees[i] as usize;
        if d == 0 {
            continue;
        }
        for (idx, p) in wi.iter().enumerate() {
            let z = p.normalized().to_flat(&ring);
            // g0 with every other factor at [1 : 0]
            let mut spec = vec![Cx::new(0.0, 0.0); cone.nvars()];
            for j in 0..k {
                spec[j] = Cx::new(1.0, 0.0);
            }
            for &v in &ring.groups()[i] {
                spec[v + k] = z[v];
            }
            let roots = roots_in(g0, i, &spec, d).map_err(|e| Error::DegenerateStart {
                group: i,
                msg: e.to_string(),
            })?;
            let mut y = vec![Cx::new(0.0, 0.0); cone.nvars()];
            for v in 0..ring.nvars() {
                y[v + k] = z[v];
            }
            for (j, (lj, _)) in slices.iter().enumerate() {
                if j != i {
                    y[j] = -gamma * lj.evaluate(&z)? * ((1.0 - epsilon) / epsilon);
                }
            }
            for u in roots {
                let mut q = y.clone();
                q[i] = u;
                points.push(MultiProjPoint::from_flat(&cone, &q));
                origin.push((i, idx));
            }
        }
    }
    Ok(MultiStarts { points, origin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn p1p1() -> Arc<Ring> {
        Ring::new(
            vec!["x0".into(), "x1".into(), "y0".into(), "y1".into()],
            vec![vec![0, 1], vec![2, 3]],
            vec![None, None],
        )
        .unwrap()
    }

    #[test]
    fn variants_agree_in_degree_one_and_have_the_requested_multidegree() {
        let ring = p1p1();
        let lx = parse_poly(&ring, "x0 + 2*x1").unwrap();
        let ly = parse_poly(&ring, "y0 - y1").unwrap();
        let ls = vec![vec![lx.clone()], vec![ly.clone()]];
        let g = Cx::new(0.6, 0.8);
        let a = make_g0_multi(&ring, &[1, 1], &ls, g, G0Variant::Binomial).unwrap();
        let b = make_g0_multi(&ring, &[1, 1], &ls, g, G0Variant::ProductOfLinears).unwrap();
        assert_eq!(a, b);
        let mut r = rng::stream(3, 0);
        for variant in [G0Variant::Binomial, G0Variant::ProductOfLinears] {
            let g0 = random_g0_multi(&ring, &[2, 3], variant, &mut r).unwrap();
            assert_eq!(g0.multidegree().unwrap(), vec![2, 3]);
            let g0 = random_g0_multi(&ring, &[0, 2], variant, &mut r).unwrap();
            assert_eq!(g0.multidegree().unwrap(), vec![0, 2]);
        }
        let wrong = vec![vec![ly.clone()], vec![ly]];
        assert!(make_g0_multi(&ring, &[1, 1], &wrong, g, G0Variant::Binomial).is_err());
    }

    #[test]
    fn path_count_formula() {
        assert_eq!(expected_path_count(&[2, 3], &[1, 1]).unwrap(), 5);
        assert_eq!(expected_path_count(&[7, 9, 4], &[0, 0, 0]).unwrap(), 0);
        assert_eq!(expected_path_count(&[3, 5, 2], &[1, 2, 1]).unwrap(), 15);
    }
}
