use proptest::prelude::*;
use ugen::algebra::univariate_roots;
use ugen::tracker::{chordal_distance, dedup_endpoints, MultiProjPoint};
use ugen::{Cx, MPoly, Ring};

fn cx() -> impl Strategy<Value = Cx> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Cx::new(re, im))
}

fn horner(coeffs: &[Cx], x: Cx) -> Cx {
    coeffs.iter().rev().fold(Cx::new(0.0, 0.0), |acc, &c| acc * x + c)
}

proptest! {
    #[test]
    fn roots_reconstruct_the_polynomial(coeffs in proptest::collection::vec(cx(), 2..9)) {
        prop_assume!(coeffs.last().unwrap().norm() > 0.1);
        let roots = univariate_roots(&coeffs, 1e-10).unwrap();
        prop_assert_eq!(roots.len(), coeffs.len() - 1);
        for r in &roots {
            let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.norm() * r.norm().powi(k as i32)).sum();
            prop_assert!(horner(&coeffs, *r).norm() <= 1e-8 * scale);
        }
    }

    #[test]
    fn homogenize_then_dehomogenize_is_identity(
        terms in proptest::collection::vec(((0u32..4, 0u32..4), cx()), 1..7),
        x in cx(), y in cx(), h in cx(),
    ) {
        prop_assume!(h.norm() > 0.1);
        let ring = Ring::indexed("y", 2);
        let p = MPoly::from_terms(&ring, terms.into_iter().map(|((a, b), c)| (vec![a, b], c))).unwrap();
        prop_assume!(!p.is_zero());
        let hom = ring.homogenized();
        let q = p.homogenize(&hom).unwrap();
        prop_assert!(q.is_homogeneous());
        prop_assert_eq!(q.dehomogenize(&ring).unwrap(), p.clone());
        // q(x, y, h) = h^d p(x/h, y/h)
        let d = q.total_degree().unwrap() as i32;
        let lhs = q.evaluate(&[x, y, h]).unwrap();
        let rhs = h.powi(d) * p.evaluate(&[x / h, y / h]).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn chordal_distance_ignores_scaling(z in proptest::collection::vec(cx(), 3), w in proptest::collection::vec(cx(), 3), s in cx()) {
        prop_assume!(s.norm() > 0.1);
        prop_assume!(z.iter().map(|c| c.norm()).sum::<f64>() > 0.1);
        prop_assume!(w.iter().map(|c| c.norm()).sum::<f64>() > 0.1);
        let p = MultiProjPoint::new(vec![z.clone()]).normalized();
        let q = MultiProjPoint::new(vec![w]).normalized();
        let ps = MultiProjPoint::new(vec![z.iter().map(|c| c * s).collect()]).normalized();
        prop_assert!(chordal_distance(&p, &ps) < 1e-12);
        prop_assert!((chordal_distance(&p, &q) - chordal_distance(&ps, &q)).abs() < 1e-12);
    }

    #[test]
    fn dedup_is_idempotent_and_counts_inputs(zs in proptest::collection::vec(proptest::collection::vec(cx(), 2), 1..12)) {
        prop_assume!(zs.iter().all(|z| z.iter().map(|c| c.norm()).sum::<f64>() > 0.1));
        let mut pts: Vec<MultiProjPoint> = zs.into_iter().map(|z| MultiProjPoint::new(vec![z]).normalized()).collect();
        let dup = pts[0].factors[0].iter().map(|c| c * Cx::new(0.0, 3.0)).collect();
        pts.push(MultiProjPoint::new(vec![dup]).normalized());
        let d = dedup_endpoints(&pts, 1e-6);
        prop_assert_eq!(d.cluster_sizes.iter().sum::<usize>(), pts.len());
        prop_assert!(d.cluster_sizes[0] >= 2);
        let again = dedup_endpoints(&d.points, 1e-6);
        prop_assert_eq!(again.points.len(), d.points.len());
    }
}
