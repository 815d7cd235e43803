use std::sync::Arc;

use rand::Rng;

use crate::algebra::{Cx, MPoly, PolySystem, Ring};
use crate::error::{Error, Result};
use crate::rng;

fn one(ring: &Arc<Ring>) -> MPoly {
    MPoly::constant(ring, Cx::new(1.0, 0.0))
}

fn square_check(f: &PolySystem) -> Result<()> {
    if f.len() != f.nvars() {
        return Err(Error::NotSquare {
            equations: f.len(),
            charts: 0,
            variables: f.nvars(),
        });
    }
    Ok(())
}

/// Katsura-n in `x0, …, xn`: `x0 + 2 Σ_{i≥1} x_i = 1` followed by
/// `Σ_{l=−n}^{n} x_l x_{m−l} = x_m` for `m = 0, …, n−1`, where
/// `x_{−i} = x_i` and `x_i = 0` for `|i| > n`.
pub fn gen_katsura(n: usize) -> Result<PolySystem> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("katsura needs n >= 2, got {n}")));
    }
    let ring = Ring::indexed("x", n + 1);
    let x = |i: i64| -> Option<MPoly> {
        let a = i.unsigned_abs() as usize;
        (a <= n).then(|| MPoly::var(&ring, a))
    };
    let mut polys = Vec::with_capacity(n + 1);
    let mut lin = MPoly::var(&ring, 0) - one(&ring);
    for i in 1..=n {
        lin = &lin + &MPoly::var(&ring, i).scale(Cx::new(2.0, 0.0));
    }
    polys.push(lin);
    let n = n as i64;
    for m in 0..n {
        let mut p = -&MPoly::var(&ring, m as usize);
        for l in -n..=n {
            if let (Some(a), Some(b)) = (x(l), x(m - l)) {
                p = &p + &(&a * &b);
            }
        }
        polys.push(p);
    }
    let f = PolySystem::new(&ring, polys)?;
    square_check(&f)?;
    Ok(f)
}

/// Cyclic n-roots: `Σ_i ∏_{j<m} x_{i+j} = 0` for `m = 1, …, n−1` and
/// `x0 ⋯ x_{n−1} − 1 = 0`, indices mod n.
pub fn gen_cyclic(n: usize) -> Result<PolySystem> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cyclic needs n >= 3, got {n}")));
    }
    let ring = Ring::indexed("x", n);
    let mut polys = Vec::with_capacity(n);
    for m in 1..n {
        let mut p = MPoly::zero(&ring);
        for i in 0..n {
            let mut term = one(&ring);
            for j in 0..m {
                term = &term * &MPoly::var(&ring, (i + j) % n);
            }
            p = &p + &term;
        }
        polys.push(p);
    }
    let mut prod = one(&ring);
    for i in 0..n {
        prod = &prod * &MPoly::var(&ring, i);
    }
    polys.push(&prod - &one(&ring));
    let f = PolySystem::new(&ring, polys)?;
    square_check(&f)?;
    Ok(f)
}

fn unit_box<R: Rng>(rng: &mut R) -> Cx {
    Cx::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
}

/// Banded quadrics: homogeneous, in `x0, …, xn`. `f_1` is a random linear
/// form in every variable; `f_i` (`i = 2, …, n`) is a random quadratic form
/// in the window `x_{i mod n}, …, x_{(i+k) mod n}`. Coefficients have real
/// and imaginary parts uniform on `[0, 1]`.
pub fn gen_banded_quadrics(n: usize, k: usize, seed: u64) -> Result<PolySystem> {
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "banded quadrics need 2 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let ring = Ring::indexed("x", n + 1);
    let mut rng = rng::stream(seed, 0xba4d);
    let mut polys = Vec::with_capacity(n);
    let coeffs: Vec<Cx> = (0..=n).map(|_| unit_box(&mut rng)).collect();
    polys.push(MPoly::linear(&ring, &(0..=n).collect::<Vec<_>>(), &coeffs));
    for i in 2..=n {
        let mut window: Vec<usize> = (0..=k).map(|j| (i + j) % n).collect();
        window.sort_unstable();
        window.dedup();
        let mut p = MPoly::zero(&ring);
        for (s, &a) in window.iter().enumerate() {
            for &b in &window[s..] {
                let mut e = vec![0u32; n + 1];
                e[a] += 1;
                e[b] += 1;
                p = &p + &MPoly::from_terms(&ring, [(e, unit_box(&mut rng))])?;
            }
        }
        polys.push(p);
    }
    PolySystem::new(&ring, polys)
}

/// Symmetric rank-constrained likelihood equations in local kernel form.
#[derive(Clone, Debug)]
pub struct MleSystem {
    /// Affine equations in the groups (P1, L1, Λ), empty groups omitted.
    /// The last equation is the `(1, n)` entry.
    pub system: PolySystem,
    pub n: usize,
    pub r: usize,
}

type Matrix = Vec<Vec<MPoly>>;

fn mat_mul(a: &Matrix, b: &Matrix, ring: &Arc<Ring>) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(MPoly::zero(ring), |acc, k| &acc + &(&row[k] * &b[k][j]))
                })
                .collect()
        })
        .collect()
}

fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Critical equations of the likelihood of the data `u` (symmetric,
/// positive integers) on symmetric `n × n` matrices of rank at most `r`.
///
/// With `P̃ = [I; L1] P1 [I, L1ᵀ]` (diagonal entries of `P1` doubled),
/// `K = [−L1ᵀ; I]`, `Q = K Λ Kᵀ` and `N = Σ_{i≤j} u_ij`, the equations are
/// the column sums and the above-diagonal entries of
/// `P̃ ⊙ Q + N P̃ − Ũ`, where `Ũ` is `u` with its diagonal doubled.
pub fn gen_mle_symmetric(n: usize, r: usize, u: &[Vec<u32>]) -> Result<MleSystem> {
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!("need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    if u.len() != n || u.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    for i in 0..n {
        for j in 0..n {
            if u[i][j] != u[j][i] || u[i][j] == 0 {
                return Err(Error::InvalidArgument(
                    "data must be symmetric with positive entries".into(),
                ));
            }
        }
    }
    let m = n - r;
    let mut names = Vec::new();
    let mut groups = Vec::new();
    let mut group = |names: &mut Vec<String>, mut new: Vec<String>| {
        if !new.is_empty() {
            groups.push((names.len()..names.len() + new.len()).collect::<Vec<_>>());
            names.append(&mut new);
        }
    };
    let p_names: Vec<String> = (0..r)
        .flat_map(|i| (i..r).map(move |j| format!("p{}_{}", i + 1, j + 1)))
        .collect();
    let l_names: Vec<String> = (0..m)
        .flat_map(|i| (0..r).map(move |j| format!("l{}_{}", i + 1, j + 1)))
        .collect();
    let s_names: Vec<String> = (0..m)
        .flat_map(|i| (i..m).map(move |j| format!("s{}_{}", i + 1, j + 1)))
        .collect();
    group(&mut names, p_names);
    group(&mut names, l_names);
    group(&mut names, s_names);
    let k = groups.len();
    let ring = Ring::new(names, groups, vec![None; k])?;
    let var = |name: String| MPoly::var(&ring, ring.var_index(&name).expect("declared"));
    let zero = MPoly::zero(&ring);
    let two = Cx::new(2.0, 0.0);

    let p1: Matrix = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let (a, b) = (i.min(j), i.max(j));
                    let v = var(format!("p{}_{}", a + 1, b + 1));
                    if i == j {
                        v.scale(two)
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let l1: Matrix = (0..m)
        .map(|i| (0..r).map(|j| var(format!("l{}_{}", i + 1, j + 1))).collect())
        .collect();
    let lam: Matrix = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let (a, b) = (i.min(j), i.max(j));
                    var(format!("s{}_{}", a + 1, b + 1))
                })
                .collect()
        })
        .collect();
    let ident = |d: usize| -> Matrix {
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { one(&ring) } else { zero.clone() })
                    .collect()
            })
            .collect()
    };
    // [I; L1] (n × r) and K = [−L1ᵀ; I] (n × m).
    let mut left: Matrix = ident(r);
    left.extend(l1.iter().cloned());
    let mut kern: Matrix = transpose(&l1)
        .into_iter()
        .map(|row| row.iter().map(|p| -p).collect())
        .collect();
    kern.extend(ident(m));
    let p_tilde = mat_mul(&mat_mul(&left, &p1, &ring), &transpose(&left), &ring);
    let q = if m == 0 {
        vec![vec![zero.clone(); n]; n]
    } else {
        mat_mul(&mat_mul(&kern, &lam, &ring), &transpose(&kern), &ring)
    };
    let total: u32 = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| u[i][j]).sum();
    let big_n = Cx::new(total as f64, 0.0);
    let e = |i: usize, j: usize| -> MPoly {
        let ut = if i == j { 2 * u[i][j] } else { u[i][j] };
        &(&(&p_tilde[i][j] * &q[i][j]) + &p_tilde[i][j].scale(big_n))
            - &MPoly::constant(&ring, Cx::new(ut as f64, 0.0))
    };
    let mut polys = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        polys.push((0..n).fold(zero.clone(), |acc, i| &acc + &e(i, j)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (i, j) != (0, n - 1) {
                polys.push(e(i, j));
            }
        }
    }
    if n > 1 {
        polys.push(e(0, n - 1));
    }
    let system = PolySystem::new(&ring, polys)?;
    square_check(&system)?;
    Ok(MleSystem { system, n, r })
}

/// Symmetric data matrix with entries drawn uniformly from `1..=max`.
pub fn random_data(n: usize, max: u32, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = rng::stream(seed, 0xda7a);
    let mut u = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(1..=max);
            u[i][j] = v;
            u[j][i] = v;
        }
    }
    u
}
