use std::f64::consts::TAU;

use super::Cx;
use crate::error::{Error, Result};

const MAX_ITERS: usize = 500;

/// All roots (with multiplicity) of `Σ coeffs[k] u^k`.
///
/// Binomials `a u^d + b` are solved in closed form; everything else goes
/// through Aberth–Ehrlich iteration. Each returned root satisfies
/// `|p(r)| <= tol * Σ |c_k| |r|^k`.
pub fn univariate_roots(coeffs: &[Cx], tol: f64) -> Result<Vec<Cx>> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficient".into()));
    }
    let deg = match coeffs.iter().rposition(|c| *c != Cx::new(0.0, 0.0)) {
        Some(d) if d + 1 == coeffs.len() && d >= 1 => d,
        Some(0) | None => return Err(Error::InvalidDegree("polynomial has degree 0".into())),
        Some(_) => {
            return Err(Error::InvalidArgument("leading coefficient is zero".into()));
        }
    };
    let zeros = coeffs.iter().position(|c| *c != Cx::new(0.0, 0.0)).unwrap();
    let reduced = &coeffs[zeros..];
    let mut roots = vec![Cx::new(0.0, 0.0); zeros];
    let d = deg - zeros;
    if d == 0 {
        return Ok(roots);
    }
    if reduced[1..d].iter().all(|c| *c == Cx::new(0.0, 0.0)) {
        roots.extend(binomial_roots(reduced[0], reduced[d], d));
        return Ok(roots);
    }
    roots.extend(aberth(reduced, tol)?);
    Ok(roots)
}

/// Roots of `lead * u^d + constant`.
fn binomial_roots(constant: Cx, lead: Cx, d: usize) -> Vec<Cx> {
    let c = -constant / lead;
    let r = c.norm().powf(1.0 / d as f64);
    let theta = c.arg();
    (0..d)
        .map(|k| Cx::from_polar(r, (theta + TAU * k as f64) / d as f64))
        .collect()
}

fn horner(coeffs: &[Cx], z: Cx) -> (Cx, Cx) {
    let mut p = Cx::new(0.0, 0.0);
    let mut dp = Cx::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn scale_at(coeffs: &[Cx], z: Cx) -> f64 {
    let a = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * a + c.norm())
}

fn aberth(coeffs: &[Cx], tol: f64) -> Result<Vec<Cx>> {
    let d = coeffs.len() - 1;
    let radius = (coeffs[0].norm() / coeffs[d].norm()).powf(1.0 / d as f64);
    let mut z: Vec<Cx> = (0..d)
        .map(|k| Cx::from_polar(radius, TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let mut converged = vec![false; d];
    for _ in 0..MAX_ITERS {
        for i in 0..d {
            if converged[i] {
                continue;
            }
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() <= f64::EPSILON * scale_at(coeffs, z[i]) {
                converged[i] = true;
                continue;
            }
            let w = p / dp;
            let repulsion: Cx = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (Cx::new(1.0, 0.0) - w * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            break;
        }
    }
    let worst = z
        .iter()
        .map(|&r| horner(coeffs, r).0.norm() / scale_at(coeffs, r))
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::NoConvergence {
            iterations: MAX_ITERS,
            residual: worst,
        });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Cx {
        Cx::new(re, 0.0)
    }

    fn expand(roots: &[Cx]) -> Vec<Cx> {
        let mut p = vec![c(1.0)];
        for &r in roots {
            let mut q = vec![c(0.0); p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * r;
            }
            p = q;
        }
        p
    }

    fn matches(found: &[Cx], expected: &[Cx], tol: f64) -> bool {
        let mut used = vec![false; found.len()];
        expected.iter().all(|e| {
            let hit = (0..found.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| (found[a] - e).norm().total_cmp(&(found[b] - e).norm()));
            match hit {
                Some(k) if (found[k] - e).norm() <= tol => {
                    used[k] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn square_roots_of_one() {
        let r = univariate_roots(&[c(-1.0), c(0.0), c(1.0)], 1e-12).unwrap();
        assert!(matches(&r, &[c(1.0), c(-1.0)], 1e-14));
    }

    #[test]
    fn linear() {
        let r = univariate_roots(&[c(-5.0), c(1.0)], 1e-12).unwrap();
        assert_eq!(r, vec![c(5.0)]);
    }

    #[test]
    fn rejects_constants_and_bad_leading_coefficient() {
        assert!(matches!(univariate_roots(&[c(3.0)], 1e-12), Err(Error::InvalidDegree(_))));
        assert!(univariate_roots(&[c(1.0), c(1.0), c(0.0)], 1e-12).is_err());
        assert!(univariate_roots(&[], 1e-12).is_err());
    }

    #[test]
    fn zero_roots_are_split_off() {
        let r = univariate_roots(&[c(0.0), c(0.0), c(-4.0), c(1.0)], 1e-12).unwrap();
        assert!(matches(&r, &[c(0.0), c(0.0), c(4.0)], 1e-12));
    }

    #[test]
    fn recovers_constructed_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let roots: Vec<Cx> = loop {
                let cand: Vec<Cx> = (0..7)
                    .map(|_| Cx::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                let sep = (0..7)
                    .flat_map(|i| (0..i).map(move |j| (i, j)))
                    .map(|(i, j)| (cand[i] - cand[j]).norm())
                    .fold(f64::INFINITY, f64::min);
                if sep >= 1e-3 {
                    break cand;
                }
            };
            let found = univariate_roots(&expand(&roots), 1e-12).unwrap();
            assert!(matches(&found, &roots, 1e-8), "{roots:?} vs {found:?}");
        }
    }

    #[test]
    fn binomial_fast_path_gives_rotated_roots() {
        let a = Cx::new(0.3, -1.2);
        let r = univariate_roots(&[-a.powu(5), c(0.0), c(0.0), c(0.0), c(0.0), c(1.0)], 1e-12)
            .unwrap();
        for k in 0..5 {
            let zeta = Cx::from_polar(1.0, TAU * k as f64 / 5.0);
            assert!(r.iter().any(|z| (z - a * zeta).norm() < 1e-12));
        }
    }
}
