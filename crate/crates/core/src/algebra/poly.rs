use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::ring::Ring;
use super::Cx;
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic with the first variable largest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn evaluate(&self, x: &[Cx]) -> Cx {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .fold(Cx::new(1.0, 0.0), |acc, (&e, &xi)| acc * xi.powu(e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with complex coefficients over a [`Ring`].
///
/// Zero coefficients are never stored, and stored zeros in either component
/// of a coefficient are positive zeros.
#[derive(Clone, Debug)]
pub struct MPoly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Cx>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

fn clean(c: Cx) -> Cx {
    // adding +0.0 turns -0.0 into +0.0 and leaves everything else alone
    Cx::new(c.re + 0.0, c.im + 0.0)
}

impl MPoly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        MPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Cx) -> Self {
        let mut p = Self::zero(ring);
        p.add_term(Monomial::one(ring.nvars()), c);
        p
    }

    pub fn var(ring: &Arc<Ring>, v: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[v] = 1;
        let mut p = Self::zero(ring);
        p.add_term(Monomial(e), Cx::new(1.0, 0.0));
        p
    }

    /// `Σ coeffs[j]·x_vars[j]`, homogeneous linear.
    pub fn linear(ring: &Arc<Ring>, vars: &[usize], coeffs: &[Cx]) -> Self {
        assert_eq!(vars.len(), coeffs.len());
        let mut p = Self::zero(ring);
        for (&v, &c) in vars.iter().zip(coeffs) {
            let mut e = vec![0; ring.nvars()];
            e[v] = 1;
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn from_terms<I>(ring: &Arc<Ring>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Cx)>,
    {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            if e.len() != ring.nvars() {
                return Err(Error::DimensionMismatch {
                    expected: ring.nvars(),
                    got: e.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    /// Adds `c·m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Cx) {
        debug_assert_eq!(m.0.len(), self.ring.nvars());
        if c == Cx::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(clean(c));
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let s = *slot.get() + c;
                if s == Cx::new(0.0, 0.0) {
                    slot.remove();
                } else {
                    *slot.get_mut() = clean(s);
                }
            }
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Cx)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Cx {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .copied()
            .unwrap_or(Cx::new(0.0, 0.0))
    }

    /// Sum of coefficient magnitudes; the size of `p` on the unit ball scale.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, c: Cx) -> MPoly {
        let mut out = MPoly::zero(&self.ring);
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut acc = MPoly::constant(&self.ring, Cx::new(1.0, 0.0));
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn evaluate(&self, x: &[Cx]) -> Result<Cx> {
        if x.len() != self.ring.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.ring.nvars(),
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Cx]) -> Cx {
        // each monomial is built by repeated squaring of its factors
        self.terms
            .iter()
            .map(|(m, &c)| c * m.evaluate(x))
            .fold(Cx::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn partial(&self, v: usize) -> MPoly {
        let mut out = MPoly::zero(&self.ring);
        for (m, &c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut d = m.0.clone();
            d[v] -= 1;
            out.add_term(Monomial(d), c * e as f64);
        }
        out
    }

    /// Largest total degree of a term.
    pub fn total_degree(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Per-group maximum of the summed exponents over all terms.
    pub fn multidegree(&self) -> Result<Vec<u32>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self
            .ring
            .groups()
            .iter()
            .map(|g| {
                self.terms
                    .keys()
                    .map(|m| g.iter().map(|&v| m.0[v]).sum::<u32>())
                    .max()
                    .unwrap_or(0)
            })
            .collect())
    }

    fn group_degree_of(&self, m: &Monomial, g: usize) -> u32 {
        self.ring.groups()[g].iter().map(|&v| m.0[v]).sum()
    }

    /// True when every term has the same degree in each group.
    pub fn is_homogeneous(&self) -> bool {
        let Ok(deg) = self.multidegree() else {
            return true;
        };
        self.terms.keys().all(|m| {
            (0..self.ring.ngroups()).all(|g| self.group_degree_of(m, g) == deg[g])
        })
    }

    /// Variables that occur with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.ring.nvars()];
        for m in self.terms.keys() {
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    used[v] = true;
                }
            }
        }
        (0..used.len()).filter(|&v| used[v]).collect()
    }

    /// Substitutes constants for some variables. The result lives in the same
    /// ring and no longer involves the assigned variables.
    pub fn specialize(&self, assignments: &[(usize, Cx)]) -> Result<MPoly> {
        for &(v, _) in assignments {
            if v >= self.ring.nvars() {
                return Err(Error::InvalidArgument(format!("no variable with index {v}")));
            }
        }
        let mut out = MPoly::zero(&self.ring);
        for (m, &c) in &self.terms {
            let mut e = m.0.clone();
            let mut coeff = c;
            for &(v, val) in assignments {
                if e[v] > 0 {
                    coeff *= val.powu(e[v]);
                    e[v] = 0;
                }
            }
            out.add_term(Monomial(e), coeff);
        }
        Ok(out)
    }

    /// Rewrites `self` in `target`, sending variable `j` to `map[j]`.
    pub fn recast(&self, target: &Arc<Ring>, map: &[usize]) -> Result<MPoly> {
        if map.len() != self.ring.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.ring.nvars(),
                got: map.len(),
            });
        }
        if map.iter().any(|&v| v >= target.nvars()) {
            return Err(Error::RingMismatch("variable map points outside the target ring".into()));
        }
        let mut out = MPoly::zero(target);
        for (m, &c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (j, &k) in m.0.iter().enumerate() {
                e[map[j]] += k;
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Homogenizes group by group with each group's homogenizing variable in
    /// `target`. `target` must extend this ring: the first `nvars` variables
    /// coincide and group `g` of `target` contains group `g` of this ring.
    pub fn homogenize(&self, target: &Arc<Ring>) -> Result<MPoly> {
        let n = self.ring.nvars();
        if target.nvars() < n || target.ngroups() != self.ring.ngroups() {
            return Err(Error::RingMismatch("target ring does not extend the source ring".into()));
        }
        for (g, members) in self.ring.groups().iter().enumerate() {
            if members.iter().any(|&v| target.group_of(v) != g) {
                return Err(Error::RingMismatch(format!("group {g} differs in the target ring")));
            }
        }
        if self.is_zero() {
            return Ok(MPoly::zero(target));
        }
        let deg = self.multidegree()?;
        let mut out = MPoly::zero(target);
        for (m, &c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            e[..n].copy_from_slice(&m.0);
            for (g, &dg) in deg.iter().enumerate() {
                let have = self.group_degree_of(m, g);
                if have == dg {
                    continue;
                }
                let h = target.homogenizer(g).ok_or_else(|| {
                    Error::RingMismatch(format!("group {g} has no homogenizing variable"))
                })?;
                if h < n {
                    return Err(Error::RingMismatch(
                        "homogenizing variable already used by the source ring".into(),
                    ));
                }
                e[h] += dg - have;
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Sets every homogenizing variable of this ring to one and returns the
    /// result in `target`, whose variables are the first `target.nvars()`.
    pub fn dehomogenize(&self, target: &Arc<Ring>) -> Result<MPoly> {
        let n = target.nvars();
        let mut out = MPoly::zero(target);
        for (m, &c) in &self.terms {
            for (v, &e) in m.0.iter().enumerate().skip(n) {
                let is_h = self.ring.homogenizers().contains(&Some(v));
                if e > 0 && !is_h {
                    return Err(Error::RingMismatch(format!(
                        "variable {} is neither kept nor a homogenizer",
                        self.ring.name(v)
                    )));
                }
            }
            out.add_term(Monomial(m.0[..n].to_vec()), c);
        }
        Ok(out)
    }

    fn check_ring(&self, other: &MPoly) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "polynomials live in different rings"
        );
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_ring(rhs);
        let mut out = MPoly::zero(&self.ring);
        for (ma, &a) in &self.terms {
            for (mb, &b) in &rhs.terms {
                out.add_term(ma.product(mb), a * b);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(Cx::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Cx {
        Cx::new(re, 0.0)
    }

    fn parabola_ring() -> Arc<Ring> {
        Ring::indexed("x", 3)
    }

    #[test]
    fn parabola_vanishes_at_table_point() {
        let r = parabola_ring();
        let x = |i| MPoly::var(&r, i);
        let f = &(&x(1) * &x(1)) - &(&(&x(0) * &x(2)) + &(&x(0) * &x(0)).scale(c(2.0)));
        let v = f.evaluate(&[c(1.0), c(-1.0), c(-1.0)]).unwrap();
        assert_eq!(v, c(0.0));
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let r = parabola_ring();
        let one = MPoly::constant(&r, c(1.0));
        let v = one.evaluate(&[c(3.0), Cx::new(0.0, 2.0), c(-7.0)]).unwrap();
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let r = parabola_ring();
        let p = MPoly::var(&r, 0);
        assert!(matches!(
            p.evaluate(&[c(1.0)]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn cancellation_removes_terms() {
        let r = parabola_ring();
        let p = MPoly::var(&r, 1);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn multidegree_of_zero_is_an_error() {
        let r = parabola_ring();
        assert!(matches!(MPoly::zero(&r).multidegree(), Err(Error::ZeroPolynomial)));
        assert_eq!(MPoly::constant(&r, c(2.0)).multidegree().unwrap(), vec![0]);
    }

    #[test]
    fn multidegree_of_product_of_group_linears() {
        let r = Ring::new(
            vec!["a0".into(), "a1".into(), "b0".into(), "c0".into(), "c1".into()],
            vec![vec![0, 1], vec![2], vec![3, 4]],
            vec![None, None, None],
        )
        .unwrap();
        let la = MPoly::linear(&r, &[0, 1], &[c(1.0), c(2.0)]);
        let lb = MPoly::linear(&r, &[2], &[c(3.0)]);
        let lc = MPoly::linear(&r, &[3, 4], &[c(1.0), c(-1.0)]);
        let p = &(&(&la * &lb) * &lb) * &lc;
        assert_eq!(p.multidegree().unwrap(), vec![1, 2, 1]);
        assert!(p.is_homogeneous());
    }

    #[test]
    fn homogenize_linear_and_katsura_relation() {
        let r = Ring::indexed("x", 2);
        let h = r.homogenized();
        let p = &MPoly::var(&r, 1) + &MPoly::constant(&r, c(1.0));
        let ph = p.homogenize(&h).unwrap();
        let expected = &MPoly::var(&h, 1) + &MPoly::var(&h, 2);
        assert_eq!(ph, expected);

        let r3 = Ring::indexed("x", 3);
        let h3 = r3.homogenized();
        let sum = (0..3).fold(MPoly::constant(&r3, c(-1.0)), |acc, i| &acc + &MPoly::var(&r3, i));
        let sh = sum.homogenize(&h3).unwrap();
        let want = (0..3).fold(-&MPoly::var(&h3, 3), |acc, i| &acc + &MPoly::var(&h3, i));
        assert_eq!(sh, want);
    }

    #[test]
    fn specialize_removes_assigned_variables() {
        let r = parabola_ring();
        let p = &MPoly::var(&r, 0) * &MPoly::var(&r, 2);
        let s = p.specialize(&[(2, c(3.0))]).unwrap();
        assert_eq!(s, MPoly::var(&r, 0).scale(c(3.0)));
    }

    #[test]
    fn partial_of_square() {
        let r = Ring::indexed("x", 1);
        let p = MPoly::var(&r, 0).pow(2);
        let d = p.partial(0);
        assert_eq!(d.evaluate(&[c(3.0)]).unwrap(), c(6.0));
    }
}
