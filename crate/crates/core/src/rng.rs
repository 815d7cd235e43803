//! Seeded random streams. Every random draw in the crate goes through here
//! so that a run is a pure function of its seed.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Cx, MPoly, Ring};

/// An independent stream for `(seed, tag)`.
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

/// Uniform on the unit circle.
pub fn unit_circle<R: Rng>(rng: &mut R) -> Cx {
    Cx::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Standard complex Gaussian.
pub fn gaussian<R: Rng>(rng: &mut R) -> Cx {
    // Box-Muller; (0, 1] keeps the log finite.
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    Cx::from_polar((-u.ln()).sqrt(), TAU * v)
}

/// Uniform on the unit sphere of `C^n`.
pub fn unit_sphere<R: Rng>(rng: &mut R, n: usize) -> Vec<Cx> {
    let v: Vec<Cx> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

/// A random homogeneous linear form in the variables of `group`.
pub fn linear_form<R: Rng>(rng: &mut R, ring: &Arc<Ring>, group: usize) -> MPoly {
    let vars = &ring.groups()[group];
    MPoly::linear(ring, vars, &unit_sphere(rng, vars.len()))
}

/// A random homogeneous linear form in all variables of `ring`.
pub fn full_linear_form<R: Rng>(rng: &mut R, ring: &Arc<Ring>) -> MPoly {
    let vars: Vec<usize> = (0..ring.nvars()).collect();
    MPoly::linear(ring, &vars, &unit_sphere(rng, vars.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(5, 1).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream(5, 1).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(stream(5, 1).gen::<u64>(), stream(5, 2).gen::<u64>());
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = stream(1, 0);
        let v = unit_sphere(&mut rng, 9);
        let n: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
        assert!((unit_circle(&mut rng).norm() - 1.0).abs() < 1e-15);
    }
}
