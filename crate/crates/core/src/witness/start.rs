use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::algebra::{Cx, MPoly, PolySystem};
use crate::error::{Error, Result};
use crate::rng;
use crate::tracker::MultiProjPoint;

/// A start system for `f` together with all of its solutions.
#[derive(Clone, Debug)]
pub struct StartSystem {
    pub system: PolySystem,
    pub points: Vec<MultiProjPoint>,
    /// Linear factors of each row when the rows are products of linears.
    pub factors: Option<Vec<Vec<MPoly>>>,
}

/// Start system matching the (multi)degrees of a square homogeneous system.
///
/// One group: `z_{i+1}^{d_i} − c_i z_0^{d_i}` with random unit `c_i`, whose
/// `∏ d_i` solutions are explicit. Several groups: each equation becomes a
/// product of random linear forms with the same multidegree; the solutions
/// are the multihomogeneous Bézout number of linear solves.
pub fn total_degree_start<R: Rng>(f: &PolySystem, rng: &mut R) -> Result<StartSystem> {
    let ring = f.ring();
    let dims = ring.factor_dims();
    if f.len() != dims.iter().sum::<usize>() {
        return Err(Error::NotSquare {
            equations: f.len(),
            charts: ring.ngroups(),
            variables: ring.nvars(),
        });
    }
    if !f.is_homogeneous() {
        return Err(Error::InvalidArgument(
            "total-degree start systems need a homogeneous target".into(),
        ));
    }
    if ring.ngroups() == 1 {
        binomial_start(f, rng)
    } else {
        linear_product_start(f, rng)
    }
}

fn binomial_start<R: Rng>(f: &PolySystem, rng: &mut R) -> Result<StartSystem> {
    let ring = f.ring();
    let members = &ring.groups()[0];
    let mut polys = Vec::with_capacity(f.len());
    let mut roots: Vec<Vec<Cx>> = Vec::with_capacity(f.len());
    for (i, p) in f.polys().iter().enumerate() {
        let d = p.total_degree()?;
        if d == 0 {
            return Err(Error::InvalidDegree(format!("equation {i} is constant")));
        }
        let c = rng::unit_circle(rng);
        let zi = MPoly::var(ring, members[i + 1]).pow(d);
        let z0 = MPoly::var(ring, members[0]).pow(d);
        polys.push(&zi - &z0.scale(c));
        let base = Cx::from_polar(1.0, c.arg() / d as f64);
        roots.push(
            (0..d)
                .map(|k| base * Cx::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64))
                .collect(),
        );
    }
    let mut points = Vec::new();
    let mut idx = vec![0usize; roots.len()];
    loop {
        let mut z = vec![Cx::new(1.0, 0.0)];
        z.extend(idx.iter().enumerate().map(|(i, &k)| roots[i][k]));
        points.push(MultiProjPoint::new(vec![z]));
        if !advance(&mut idx, |i| roots[i].len()) {
            break;
        }
    }
    Ok(StartSystem {
        system: PolySystem::new(ring, polys)?,
        points,
        factors: None,
    })
}

/// Mixed-radix increment; false once every combination has been produced.
fn advance(idx: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < radix(i) {
            return true;
        }
        idx[i] = 0;
    }
    false
}

fn linear_product_start<R: Rng>(f: &PolySystem, rng: &mut R) -> Result<StartSystem> {
    let ring = f.ring();
    let k = ring.ngroups();
    let dims = ring.factor_dims();
    let degs = f.multidegrees()?;
    // factors[i][g] = coefficient vectors (group order) of the linears.
    let mut factors: Vec<Vec<Vec<Vec<Cx>>>> = Vec::with_capacity(f.len());
    let mut polys = Vec::with_capacity(f.len());
    let mut linears = Vec::with_capacity(f.len());
    for (i, d) in degs.iter().enumerate() {
        if d.iter().all(|&e| e == 0) {
            return Err(Error::InvalidDegree(format!("equation {i} is constant")));
        }
        let mut per_group = Vec::with_capacity(k);
        let mut row = Vec::new();
        let mut prod = MPoly::constant(ring, Cx::new(1.0, 0.0));
        for g in 0..k {
            let members = &ring.groups()[g];
            let mut lins = Vec::with_capacity(d[g] as usize);
            for _ in 0..d[g] {
                let c = rng::unit_sphere(rng, members.len());
                let l = MPoly::linear(ring, members, &c);
                prod = &prod * &l;
                row.push(l);
                lins.push(c);
            }
            per_group.push(lins);
        }
        factors.push(per_group);
        linears.push(row);
        polys.push(prod);
    }
    let normalizers: Vec<Vec<Cx>> = (0..k)
        .map(|g| rng::unit_sphere(rng, ring.groups()[g].len()))
        .collect();

    let mut points = Vec::new();
    let mut assignment = vec![0usize; f.len()];
    let mut room = dims.clone();
    assign_groups(&degs, 0, &mut room, &mut assignment, &mut |groups| {
        let mut idx = vec![0usize; groups.len()];
        loop {
            let mut pt = Vec::with_capacity(k);
            for g in 0..k {
                let rows: Vec<&Vec<Cx>> = (0..groups.len())
                    .filter(|&i| groups[i] == g)
                    .map(|i| &factors[i][g][idx[i]])
                    .collect();
                pt.push(null_vector(&rows, &normalizers[g])?);
            }
            points.push(MultiProjPoint::new(pt));
            if !advance(&mut idx, |i| degs[i][groups[i]] as usize) {
                break;
            }
        }
        Ok(())
    })?;
    Ok(StartSystem {
        system: PolySystem::new(ring, polys)?,
        points,
        factors: Some(linears),
    })
}

/// Calls `emit` for every map equation → group using group `g` exactly
/// `room[g]` times and only where the equation has positive degree.
fn assign_groups(
    degs: &[Vec<u32>],
    i: usize,
    room: &mut [usize],
    assignment: &mut [usize],
    emit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if i == degs.len() {
        return emit(assignment);
    }
    for g in 0..room.len() {
        if room[g] > 0 && degs[i][g] > 0 {
            room[g] -= 1;
            assignment[i] = g;
            assign_groups(degs, i + 1, room, assignment, emit)?;
            room[g] += 1;
        }
    }
    Ok(())
}

/// The vector `z` with `row · z = 0` for all rows and `normalizer · z = 1`.
pub(crate) fn null_vector(rows: &[&Vec<Cx>], normalizer: &[Cx]) -> Result<Vec<Cx>> {
    let n = normalizer.len();
    let m = DMatrix::from_fn(n, n, |r, c| {
        if r < rows.len() {
            rows[r][c]
        } else {
            normalizer[c]
        }
    });
    let mut rhs = DVector::from_element(n, Cx::new(0.0, 0.0));
    rhs[n - 1] = Cx::new(1.0, 0.0);
    m.lu()
        .solve(&rhs)
        .map(|v| v.as_slice().to_vec())
        .ok_or_else(|| Error::InvalidArgument("degenerate linear-product start system".into()))
}

/// Multihomogeneous Bézout number of a square system on a product of
/// projective spaces with the given factor dimensions.
pub fn multihomogeneous_bezout(degrees: &[Vec<u32>], dims: &[usize]) -> u128 {
    fn rec(degs: &[Vec<u32>], i: usize, room: &mut [usize]) -> u128 {
        if i == degs.len() {
            return 1;
        }
        let mut total = 0;
        for g in 0..room.len() {
            if room[g] > 0 && degs[i][g] > 0 {
                room[g] -= 1;
                total += degs[i][g] as u128 * rec(degs, i + 1, room);
                room[g] += 1;
            }
        }
        total
    }
    if degrees.len() != dims.iter().sum::<usize>() {
        return 0;
    }
    rec(degrees, 0, &mut dims.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, Ring};

    #[test]
    fn binomial_start_points_solve_the_start_system() {
        let ring = Ring::single(&["x", "y", "z"]).unwrap();
        let f = PolySystem::new(
            &ring,
            vec![
                parse_poly(&ring, "x^2 - y*z").unwrap(),
                parse_poly(&ring, "x^3 - y^3 + z^3").unwrap(),
            ],
        )
        .unwrap();
        let s = total_degree_start(&f, &mut rng::stream(1, 0)).unwrap();
        assert_eq!(s.points.len(), 6);
        for p in &s.points {
            let z = p.to_flat(&ring);
            assert!(s.system.residual(&z).unwrap() < 1e-12);
        }
    }

    #[test]
    fn linear_product_count_is_multihomogeneous_bezout() {
        let ring = Ring::new(
            ["a0", "a1", "b0", "b1", "b2"].iter().map(|s| s.to_string()).collect(),
            vec![vec![0, 1], vec![2, 3, 4]],
            vec![None, None],
        )
        .unwrap();
        let f = PolySystem::new(
            &ring,
            vec![
                parse_poly(&ring, "a0*b0 - a1*b1").unwrap(),
                parse_poly(&ring, "a0*b2^2 + a1*b0*b1").unwrap(),
                parse_poly(&ring, "b0 + b1 - 3*b2").unwrap(),
            ],
        )
        .unwrap();
        let degs = f.multidegrees().unwrap();
        let expected = multihomogeneous_bezout(&degs, &ring.factor_dims());
        // (1,1),(1,2),(0,1) on P1 x P2: a-group from eq0 -> 2, from eq1 -> 1.
        assert_eq!(expected, 3);
        let s = total_degree_start(&f, &mut rng::stream(2, 0)).unwrap();
        assert_eq!(s.points.len() as u128, expected);
        for p in &s.points {
            let z = p.to_flat(&ring);
            let r = s.system.residual(&z).unwrap();
            assert!(r < 1e-12, "residual {r}");
        }
    }
}
