use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use super::poly::MPoly;
use super::ring::Ring;
use super::Cx;
use crate::error::{Error, Result};

/// An ordered list of polynomials over one ring.
#[derive(Clone, Debug)]
pub struct PolySystem {
    ring: Arc<Ring>,
    polys: Vec<MPoly>,
    compiled: OnceLock<Arc<CompiledSystem>>,
}

impl PartialEq for PolySystem {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.polys == other.polys
    }
}

impl PolySystem {
    pub fn new(ring: &Arc<Ring>, polys: Vec<MPoly>) -> Result<Self> {
        for (i, p) in polys.iter().enumerate() {
            if p.ring() != ring {
                return Err(Error::RingMismatch(format!("polynomial {i} lives in another ring")));
            }
        }
        Ok(PolySystem {
            ring: ring.clone(),
            polys,
            compiled: OnceLock::new(),
        })
    }

    pub fn empty(ring: &Arc<Ring>) -> Self {
        PolySystem::new(ring, Vec::new()).expect("empty system is valid")
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    /// A new system with `extra` appended.
    pub fn extended<I: IntoIterator<Item = MPoly>>(&self, extra: I) -> Result<PolySystem> {
        let mut polys = self.polys.clone();
        polys.extend(extra);
        PolySystem::new(&self.ring, polys)
    }

    /// The system without polynomial `index`, and that polynomial.
    pub fn without(&self, index: usize) -> Result<(PolySystem, MPoly)> {
        if index >= self.polys.len() {
            return Err(Error::InvalidArgument(format!(
                "equation index {index} out of range for {} equations",
                self.polys.len()
            )));
        }
        let mut polys = self.polys.clone();
        let dropped = polys.remove(index);
        Ok((PolySystem::new(&self.ring, polys)?, dropped))
    }

    pub fn recast(&self, target: &Arc<Ring>, map: &[usize]) -> Result<PolySystem> {
        let polys = self
            .polys
            .iter()
            .map(|p| p.recast(target, map))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(target, polys)
    }

    /// Homogenizes into `self.ring().homogenized()`.
    pub fn homogenize(&self) -> Result<PolySystem> {
        let target = self.ring.homogenized();
        let polys = self
            .polys
            .iter()
            .map(|p| p.homogenize(&target))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(&target, polys)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.polys.iter().all(MPoly::is_homogeneous)
    }

    pub fn multidegrees(&self) -> Result<Vec<Vec<u32>>> {
        self.polys.iter().map(MPoly::multidegree).collect()
    }

    pub fn evaluate(&self, x: &[Cx]) -> Result<Vec<Cx>> {
        self.check_len(x)?;
        Ok(self.polys.iter().map(|p| p.eval_unchecked(x)).collect())
    }

    /// Jacobian `(∂f_i/∂x_j)` at `x`, from partial derivatives that are
    /// computed once and cached on the system.
    pub fn jacobian(&self, x: &[Cx]) -> Result<DMatrix<Cx>> {
        self.check_len(x)?;
        let compiled = self.compiled();
        let mut vals = vec![Cx::new(0.0, 0.0); self.len()];
        let mut jac = DMatrix::zeros(self.len(), self.nvars());
        compiled.eval_into(x, &mut vals, Some(&mut jac), 0);
        Ok(jac)
    }

    /// Max-norm of the values at `x`.
    pub fn residual(&self, x: &[Cx]) -> Result<f64> {
        Ok(self
            .evaluate(x)?
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }

    pub fn compiled(&self) -> Arc<CompiledSystem> {
        self.compiled
            .get_or_init(|| Arc::new(CompiledSystem::new(self.nvars(), &self.polys)))
            .clone()
    }

    fn check_len(&self, x: &[Cx]) -> Result<()> {
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Flattened polynomial: coefficient plus `(variable, exponent)` factors.
#[derive(Clone, Debug, Default)]
struct FlatPoly {
    coefs: Vec<Cx>,
    offsets: Vec<u32>,
    factors: Vec<(u32, u32)>,
}

impl FlatPoly {
    fn new(p: &MPoly) -> FlatPoly {
        let mut flat = FlatPoly {
            offsets: vec![0],
            ..Default::default()
        };
        for (m, &c) in p.terms() {
            flat.coefs.push(c);
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    flat.factors.push((v as u32, e));
                }
            }
            flat.offsets.push(flat.factors.len() as u32);
        }
        flat
    }

    #[inline]
    fn eval(&self, pw: &Powers) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for (t, &c) in self.coefs.iter().enumerate() {
            let lo = self.offsets[t] as usize;
            let hi = self.offsets[t + 1] as usize;
            let mut m = c;
            for &(v, e) in &self.factors[lo..hi] {
                m *= pw.get(v as usize, e as usize);
            }
            acc += m;
        }
        acc
    }

    /// Value, with the gradient added into `grad` (indexed by variable).
    #[inline]
    fn eval_grad(&self, pw: &Powers, grad: &mut [Cx], prefix: &mut Vec<Cx>) -> Cx {
        let one = Cx::new(1.0, 0.0);
        let mut acc = Cx::new(0.0, 0.0);
        for (t, &c) in self.coefs.iter().enumerate() {
            let lo = self.offsets[t] as usize;
            let hi = self.offsets[t + 1] as usize;
            let fs = &self.factors[lo..hi];
            prefix.clear();
            prefix.push(c);
            for &(v, e) in fs {
                let last = prefix[prefix.len() - 1];
                prefix.push(last * pw.get(v as usize, e as usize));
            }
            acc += prefix[fs.len()];
            let mut suffix = one;
            for (k, &(v, e)) in fs.iter().enumerate().rev() {
                let d = pw.get(v as usize, e as usize - 1) * e as f64;
                grad[v as usize] += prefix[k] * suffix * d;
                suffix *= pw.get(v as usize, e as usize);
            }
        }
        acc
    }
}

/// Table of `x_v^e` for all exponents that occur.
pub(crate) struct Powers {
    offsets: Vec<usize>,
    table: Vec<Cx>,
}

impl Powers {
    fn new(x: &[Cx], max_exp: &[u32]) -> Powers {
        let mut offsets = Vec::with_capacity(x.len());
        let mut table = Vec::new();
        for (v, &xv) in x.iter().enumerate() {
            offsets.push(table.len());
            let mut p = Cx::new(1.0, 0.0);
            table.push(p);
            for _ in 0..max_exp[v] {
                p *= xv;
                table.push(p);
            }
        }
        Powers { offsets, table }
    }

    #[inline]
    fn get(&self, v: usize, e: usize) -> Cx {
        self.table[self.offsets[v] + e]
    }
}

/// Evaluation form of a system: values and symbolic partials, flattened.
#[derive(Debug)]
pub struct CompiledSystem {
    nvars: usize,
    max_exp: Vec<u32>,
    values: Vec<FlatPoly>,
}

impl CompiledSystem {
    pub fn new(nvars: usize, polys: &[MPoly]) -> CompiledSystem {
        let mut max_exp = vec![0u32; nvars];
        for p in polys {
            for (m, _) in p.terms() {
                for (v, &e) in m.exponents().iter().enumerate() {
                    max_exp[v] = max_exp[v].max(e);
                }
            }
        }
        let values = polys.iter().map(FlatPoly::new).collect();
        CompiledSystem {
            nvars,
            max_exp,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Writes values into `vals[..len]` and, if requested, the Jacobian into
    /// rows `row0..row0+len` of `jac` (other entries untouched).
    pub fn eval_into(
        &self,
        x: &[Cx],
        vals: &mut [Cx],
        jac: Option<&mut DMatrix<Cx>>,
        row0: usize,
    ) {
        let pw = Powers::new(x, &self.max_exp);
        match jac {
            None => {
                for (i, p) in self.values.iter().enumerate() {
                    vals[i] = p.eval(&pw);
                }
            }
            Some(jac) => {
                let mut grad = vec![Cx::new(0.0, 0.0); self.nvars];
                let mut prefix = Vec::new();
                for (i, p) in self.values.iter().enumerate() {
                    grad.iter_mut().for_each(|g| *g = Cx::new(0.0, 0.0));
                    vals[i] = p.eval_grad(&pw, &mut grad, &mut prefix);
                    for (j, g) in grad.iter().enumerate() {
                        jac[(row0 + i, j)] = *g;
                    }
                }
            }
        }
    }

    /// Values only.
    pub fn values(&self, x: &[Cx]) -> Vec<Cx> {
        let mut v = vec![Cx::new(0.0, 0.0); self.len()];
        self.eval_into(x, &mut v, None, 0);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Cx {
        Cx::new(re, 0.0)
    }

    #[test]
    fn jacobian_of_square() {
        let r = Ring::indexed("x", 1);
        let f = PolySystem::new(&r, vec![MPoly::var(&r, 0).pow(2)]).unwrap();
        let j = f.jacobian(&[c(3.0)]).unwrap();
        assert_eq!(j[(0, 0)], c(6.0));
    }

    #[test]
    fn jacobian_of_parabola_at_table_point() {
        let r = Ring::indexed("x", 3);
        let f = super::super::parse::parse_poly(&r, "x1^2 - x0*x2 - 2*x0^2").unwrap();
        let sys = PolySystem::new(&r, vec![f]).unwrap();
        let j = sys.jacobian(&[c(1.0), c(-1.0), c(-1.0)]).unwrap();
        // (-4 x0 - x2, 2 x1, -x0)
        assert_eq!(j[(0, 0)], c(-3.0));
        assert_eq!(j[(0, 1)], c(-2.0));
        assert_eq!(j[(0, 2)], c(-1.0));
    }

    #[test]
    fn without_drops_requested_equation() {
        let r = Ring::indexed("x", 2);
        let sys = PolySystem::new(&r, vec![MPoly::var(&r, 0), MPoly::var(&r, 1)]).unwrap();
        let (rest, dropped) = sys.without(1).unwrap();
        assert_eq!(rest.len(), 1);
        assert_eq!(dropped, MPoly::var(&r, 1));
        assert!(sys.without(2).is_err());
    }
}
