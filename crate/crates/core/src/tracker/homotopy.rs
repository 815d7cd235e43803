use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use super::point::MultiProjPoint;
use crate::algebra::{CompiledSystem, Cx, MPoly, PolySystem, Ring};
use crate::error::{Error, Result};
use crate::rng;

/// Scratch buffers for one path. `vals`, `jac`, `dt` and `scales` hold the
/// output of the last [`Homotopy::evaluate`] call.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub vals: Vec<Cx>,
    pub jac: DMatrix<Cx>,
    pub dt: Vec<Cx>,
    /// Size of each row at the evaluation point: for a homogeneous row of
    /// multidegree `d`, `∏_g ‖x_g‖^{d_g}`, so `vals[i] / scales[i]` is the
    /// value at the unit-norm representative.
    pub scales: Vec<f64>,
    scratch_vals: Vec<Cx>,
    scratch_jac: DMatrix<Cx>,
    inner: Option<Box<Workspace>>,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        let zero = Cx::new(0.0, 0.0);
        Workspace {
            vals: vec![zero; n],
            jac: DMatrix::zeros(n, n),
            dt: vec![zero; n],
            scales: vec![1.0; n],
            scratch_vals: vec![zero; n],
            scratch_jac: DMatrix::zeros(n, n),
            inner: None,
        }
    }
}

/// A square family `H(x, t)`, `t ∈ [0, 1]`, in `nvars` unknowns.
pub trait Homotopy: Send + Sync {
    fn nvars(&self) -> usize;

    /// Ring of the points returned by [`Homotopy::lift`].
    fn ring(&self) -> &Arc<Ring>;

    fn workspace(&self) -> Workspace {
        Workspace::new(self.nvars())
    }

    /// Fills `ws.vals = H(x,t)`, `ws.jac = ∂H/∂x`, `ws.dt = ∂H/∂t` and the
    /// row scales `ws.scales`.
    fn evaluate(&self, x: &[Cx], t: f64, ws: &mut Workspace);

    /// Full coordinates (in [`Homotopy::ring`]) of the state `x` at `t`.
    fn lift(&self, x: &[Cx], _t: f64) -> Vec<Cx> {
        x.to_vec()
    }

    /// If row `row` is `a(t) x_var + (terms free of x_var)` with
    /// `a(t) = α + β t`, returns `(α, β)`.
    fn pencil_coefficient(&self, _row: usize, _var: usize) -> Option<(Cx, Cx)> {
        None
    }
}

/// `H(x,t) = (1−t)·γ·start(x) + t·target(x)` on the rows where start and
/// target differ, the shared rows held fixed, followed by one affine chart
/// per projective factor.
#[derive(Debug)]
pub struct StraightLine {
    ring: Arc<Ring>,
    gamma: Cx,
    start: PolySystem,
    target: PolySystem,
    charts: Vec<(usize, MPoly)>,
    /// Multidegree of every row; charts count as degree one in their group.
    row_degrees: Vec<Vec<u32>>,
    moving: Vec<bool>,
    /// Target rows followed by the charts.
    f: CompiledSystem,
    /// `γ·start` on moving rows without factors, zero elsewhere.
    s: CompiledSystem,
    /// Linear factors (sparse coefficients) of the start rows given as products.
    products: Vec<Option<Vec<Vec<(usize, Cx)>>>>,
}

/// One random chart `Σ a_j z_j = 1` per group, coefficients on the unit
/// sphere.
pub fn random_charts<R: Rng>(ring: &Arc<Ring>, rng: &mut R) -> Vec<MPoly> {
    (0..ring.ngroups())
        .map(|g| &rng::linear_form(rng, ring, g) - &MPoly::constant(ring, Cx::new(1.0, 0.0)))
        .collect()
}

fn chart_group(ring: &Ring, chart: &MPoly) -> Result<usize> {
    let support = chart.support();
    let Some(&first) = support.first() else {
        return Err(Error::InvalidArgument("chart equation is constant".into()));
    };
    let g = ring.group_of(first);
    if support.iter().any(|&v| ring.group_of(v) != g) || chart.total_degree()? != 1 {
        return Err(Error::InvalidArgument(
            "a chart must be affine-linear in the variables of one group".into(),
        ));
    }
    Ok(g)
}

pub fn make_straight_line(
    start: &PolySystem,
    target: &PolySystem,
    gamma: Cx,
    charts: &[MPoly],
) -> Result<StraightLine> {
    build(start, None, target, gamma, charts)
}

/// [`make_straight_line`] for a start system whose row `i` is the product of
/// the linear forms `factors[i]`; those rows are evaluated in factored form.
pub fn make_straight_line_factored(
    start: &PolySystem,
    factors: &[Vec<MPoly>],
    target: &PolySystem,
    gamma: Cx,
    charts: &[MPoly],
) -> Result<StraightLine> {
    if factors.len() != start.len() {
        return Err(Error::DimensionMismatch {
            expected: start.len(),
            got: factors.len(),
        });
    }
    for (i, (row, p)) in factors.iter().zip(start.polys()).enumerate() {
        let prod = row
            .iter()
            .fold(MPoly::constant(start.ring(), Cx::new(1.0, 0.0)), |acc, l| &acc * l);
        if row.iter().any(|l| l.total_degree().ok() != Some(1) || !l.is_homogeneous()) || &prod != p {
            return Err(Error::InvalidArgument(format!(
                "start row {i} is not the product of its linear factors"
            )));
        }
    }
    build(start, Some(factors), target, gamma, charts)
}

fn build(
    start: &PolySystem,
    factors: Option<&[Vec<MPoly>]>,
    target: &PolySystem,
    gamma: Cx,
    charts: &[MPoly],
) -> Result<StraightLine> {
    let ring = target.ring().clone();
    if start.ring() != &ring {
        return Err(Error::RingMismatch("start and target systems use different rings".into()));
    }
    if start.len() != target.len() {
        return Err(Error::InvalidArgument(format!(
            "start has {} equations, target {}",
            start.len(),
            target.len()
        )));
    }
    if (gamma.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("|gamma| = {} is not 1", gamma.norm())));
    }
    if start.len() + charts.len() != ring.nvars() {
        return Err(Error::NotSquare {
            equations: start.len(),
            charts: charts.len(),
            variables: ring.nvars(),
        });
    }
    let mut f_rows = Vec::with_capacity(ring.nvars());
    let mut s_rows = Vec::with_capacity(start.len());
    let mut moving = Vec::with_capacity(start.len());
    let mut products = Vec::with_capacity(start.len());
    let mut row_degrees = Vec::with_capacity(ring.nvars());
    for (i, (s, f)) in start.polys().iter().zip(target.polys()).enumerate() {
        row_degrees.push(if f.is_zero() {
            vec![0; ring.ngroups()]
        } else {
            f.multidegree()?
        });
        f_rows.push(f.clone());
        if s == f {
            moving.push(false);
            s_rows.push(MPoly::zero(&ring));
            products.push(None);
            continue;
        }
        let ds = s.multidegree()?;
        let df = f.multidegree()?;
        if ds != df || !s.is_homogeneous() || !f.is_homogeneous() {
            return Err(Error::DegreeMismatch {
                row: i,
                start: ds,
                target: df,
            });
        }
        moving.push(true);
        match factors {
            Some(fs) => {
                s_rows.push(MPoly::zero(&ring));
                products.push(Some(
                    fs[i]
                        .iter()
                        .map(|l| l.terms().map(|(m, &c)| (m.exponents().iter().position(|&e| e == 1).unwrap_or(0), c)).collect())
                        .collect(),
                ));
            }
            None => {
                s_rows.push(s.scale(gamma));
                products.push(None);
            }
        }
    }
    let mut chart_list = Vec::with_capacity(charts.len());
    for c in charts {
        if c.ring() != &ring {
            return Err(Error::RingMismatch("chart lives in another ring".into()));
        }
        let g = chart_group(&ring, c)?;
        let mut d = vec![0; ring.ngroups()];
        d[g] = 1;
        row_degrees.push(d);
        chart_list.push((g, c.clone()));
        f_rows.push(c.clone());
    }
    let n = ring.nvars();
    Ok(StraightLine {
        f: CompiledSystem::new(n, &f_rows),
        s: CompiledSystem::new(n, &s_rows),
        ring,
        gamma,
        start: start.clone(),
        target: target.clone(),
        charts: chart_list,
        row_degrees,
        moving,
        products,
    })
}

impl StraightLine {
    pub fn gamma(&self) -> Cx {
        self.gamma
    }

    pub fn start(&self) -> &PolySystem {
        &self.start
    }

    pub fn target(&self) -> &PolySystem {
        &self.target
    }

    pub fn charts(&self) -> impl Iterator<Item = &MPoly> {
        self.charts.iter().map(|(_, c)| c)
    }

    /// Index of the first chart row.
    pub fn chart_row0(&self) -> usize {
        self.start.len()
    }

    /// Rescales every factor of `p` onto its chart.
    pub fn chart_point(&self, p: &MultiProjPoint) -> Result<Vec<Cx>> {
        let mut z = p.to_flat(&self.ring);
        let zero = vec![Cx::new(0.0, 0.0); z.len()];
        for (g, chart) in &self.charts {
            let c0 = chart.eval_unchecked(&zero);
            let mut only = zero.clone();
            for &v in &self.ring.groups()[*g] {
                only[v] = z[v];
            }
            let lam = chart.eval_unchecked(&only) - c0;
            if lam.norm() < 1e-300 {
                return Err(Error::InvalidArgument(format!(
                    "point lies on the hyperplane at infinity of chart {g}"
                )));
            }
            let s = -c0 / lam;
            for &v in &self.ring.groups()[*g] {
                z[v] *= s;
            }
        }
        Ok(z)
    }
}

impl Homotopy for StraightLine {
    fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    fn evaluate(&self, x: &[Cx], t: f64, ws: &mut Workspace) {
        let zero = Cx::new(0.0, 0.0);
        let m = self.moving.len();
        self.f.eval_into(x, &mut ws.vals, Some(&mut ws.jac), 0);
        self.s
            .eval_into(x, &mut ws.scratch_vals, Some(&mut ws.scratch_jac), 0);
        for (i, row) in self.products.iter().enumerate() {
            if let Some(factors) = row {
                product_row(factors, self.gamma, x, i, ws);
            }
        }
        let n = self.ring.nvars();
        for i in 0..n {
            if i >= m || !self.moving[i] {
                ws.dt[i] = zero;
                continue;
            }
            let (fv, sv) = (ws.vals[i], ws.scratch_vals[i]);
            ws.dt[i] = fv - sv;
            ws.vals[i] = sv + (fv - sv) * t;
            for j in 0..n {
                let (fj, sj) = (ws.jac[(i, j)], ws.scratch_jac[(i, j)]);
                ws.jac[(i, j)] = sj + (fj - sj) * t;
            }
        }
        let norms: Vec<f64> = self
            .ring
            .groups()
            .iter()
            .map(|g| {
                let n = g.iter().map(|&v| x[v].norm_sqr()).sum::<f64>().sqrt();
                if n.is_finite() && n > 0.0 {
                    n
                } else {
                    1.0
                }
            })
            .collect();
        for (s, d) in ws.scales.iter_mut().zip(&self.row_degrees) {
            *s = d
                .iter()
                .zip(&norms)
                .map(|(&e, n)| n.powi(e as i32))
                .product();
        }
    }

    fn pencil_coefficient(&self, row: usize, var: usize) -> Option<(Cx, Cx)> {
        let coeff = |p: &MPoly| -> Option<Cx> {
            let mut c = Cx::new(0.0, 0.0);
            for (m, &k) in p.terms() {
                let e = m.exponents()[var];
                if e > 1 || (e == 1 && m.degree() > 1) {
                    return None;
                }
                if e == 1 {
                    c += k;
                }
            }
            Some(c)
        };
        if row >= self.moving.len() {
            let c = self.charts[row - self.moving.len()].1.clone();
            return Some((coeff(&c)?, Cx::new(0.0, 0.0)));
        }
        let f = coeff(&self.target.polys()[row])?;
        if !self.moving[row] {
            return Some((f, Cx::new(0.0, 0.0)));
        }
        let s = coeff(&self.start.polys()[row])? * self.gamma;
        Some((s, f - s))
    }
}

/// Writes `γ ∏ l_k(x)` and its gradient into row `i` of the scratch buffers.
fn product_row(factors: &[Vec<(usize, Cx)>], gamma: Cx, x: &[Cx], i: usize, ws: &mut Workspace) {
    let one = Cx::new(1.0, 0.0);
    let vals: Vec<Cx> = factors
        .iter()
        .map(|l| l.iter().map(|&(v, c)| c * x[v]).sum())
        .collect();
    // prefix[k] = ∏_{j<k}, suffix[k] = ∏_{j>k}
    let mut prefix = vec![one; vals.len() + 1];
    for k in 0..vals.len() {
        prefix[k + 1] = prefix[k] * vals[k];
    }
    for j in 0..ws.scratch_jac.ncols() {
        ws.scratch_jac[(i, j)] = Cx::new(0.0, 0.0);
    }
    let mut suffix = gamma;
    for k in (0..vals.len()).rev() {
        let w = prefix[k] * suffix;
        for &(v, c) in &factors[k] {
            ws.scratch_jac[(i, v)] += w * c;
        }
        suffix *= vals[k];
    }
    ws.scratch_vals[i] = suffix;
}

#[derive(Clone, Copy, Debug)]
struct Elim {
    var: usize,
    row: usize,
    alpha: Cx,
    beta: Cx,
}

/// Removes variables from a homotopy by solving rows that are linear in
/// them: `x_e = −rest(x,t)/(α + β t)`. Valid on `[t_min, 1]`.
pub struct Eliminated<'a> {
    inner: &'a dyn Homotopy,
    elims: Vec<Elim>,
    keep_vars: Vec<usize>,
    keep_rows: Vec<usize>,
    t_min: f64,
}

impl<'a> Eliminated<'a> {
    pub fn new(inner: &'a dyn Homotopy, pairs: &[(usize, usize)], t_min: f64) -> Result<Self> {
        let n = inner.nvars();
        let mut elims = Vec::new();
        for &(var, row) in pairs {
            if var >= n || row >= n {
                return Err(Error::InvalidArgument(format!(
                    "elimination pair ({var}, {row}) out of range"
                )));
            }
            let (alpha, beta) = inner.pencil_coefficient(row, var).ok_or_else(|| {
                Error::InvalidArgument(format!("row {row} is not linear in variable {var}"))
            })?;
            for &(other, _) in pairs {
                if other != var && inner.pencil_coefficient(row, other) != Some(Default::default())
                {
                    return Err(Error::InvalidArgument(format!(
                        "row {row} involves eliminated variable {other}"
                    )));
                }
            }
            // a(t) = α + β t must stay away from zero on [t_min, 1].
            let a_min = (alpha + beta * t_min).norm().min((alpha + beta).norm());
            let crossing = if beta.norm() > 0.0 {
                let r = -alpha / beta;
                r.im.abs() < 1e-12 && r.re >= t_min && r.re <= 1.0
            } else {
                false
            };
            if crossing || a_min == 0.0 {
                return Err(Error::EliminationTooEarly {
                    t: t_min,
                    t_star: if beta.norm() > 0.0 { (-alpha / beta).re } else { 1.0 },
                });
            }
            elims.push(Elim {
                var,
                row,
                alpha,
                beta,
            });
        }
        let keep_vars = (0..n).filter(|v| !pairs.iter().any(|p| p.0 == *v)).collect();
        let keep_rows = (0..n).filter(|r| !pairs.iter().any(|p| p.1 == *r)).collect();
        Ok(Eliminated {
            inner,
            elims,
            keep_vars,
            keep_rows,
            t_min,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// The reduced state of full coordinates `z`.
    pub fn restrict(&self, z: &[Cx]) -> Vec<Cx> {
        self.keep_vars.iter().map(|&v| z[v]).collect()
    }

    fn embed(&self, x: &[Cx]) -> Vec<Cx> {
        let mut z = vec![Cx::new(0.0, 0.0); self.inner.nvars()];
        for (k, &v) in self.keep_vars.iter().enumerate() {
            z[v] = x[k];
        }
        z
    }

    /// Eliminated values, their x-gradients (over kept vars) and t-derivatives.
    fn solve_eliminated(
        &self,
        x: &[Cx],
        t: f64,
        ws: &mut Workspace,
    ) -> (Vec<Cx>, Vec<Vec<Cx>>, Vec<Cx>, Vec<Cx>) {
        let mut z = self.embed(x);
        self.inner.evaluate(&z, t, ws);
        let mut vals = Vec::with_capacity(self.elims.len());
        let mut grads = Vec::with_capacity(self.elims.len());
        let mut dts = Vec::with_capacity(self.elims.len());
        for e in &self.elims {
            let a = e.alpha + e.beta * t;
            let rest = ws.vals[e.row];
            let ze = -rest / a;
            grads.push(
                self.keep_vars
                    .iter()
                    .map(|&v| -ws.jac[(e.row, v)] / a)
                    .collect(),
            );
            dts.push(-(ws.dt[e.row] + ze * e.beta) / a);
            vals.push(ze);
        }
        for (e, &ze) in self.elims.iter().zip(&vals) {
            z[e.var] = ze;
        }
        (z, grads, dts, vals)
    }
}

impl Homotopy for Eliminated<'_> {
    fn nvars(&self) -> usize {
        self.keep_vars.len()
    }

    fn ring(&self) -> &Arc<Ring> {
        self.inner.ring()
    }

    fn workspace(&self) -> Workspace {
        let mut ws = Workspace::new(self.nvars());
        ws.inner = Some(Box::new(self.inner.workspace()));
        ws
    }

    fn evaluate(&self, x: &[Cx], t: f64, ws: &mut Workspace) {
        let inner = ws.inner.as_mut().expect("workspace built by Eliminated::workspace");
        let (z, grads, dts, _) = self.solve_eliminated(x, t, inner);
        self.inner.evaluate(&z, t, inner);
        for (k, &r) in self.keep_rows.iter().enumerate() {
            ws.vals[k] = inner.vals[r];
            ws.scales[k] = inner.scales[r];
            let mut dt = inner.dt[r];
            for (e, dte) in self.elims.iter().zip(&dts) {
                dt += inner.jac[(r, e.var)] * dte;
            }
            ws.dt[k] = dt;
            for (j, &v) in self.keep_vars.iter().enumerate() {
                let mut d = inner.jac[(r, v)];
                for (e, g) in self.elims.iter().zip(&grads) {
                    d += inner.jac[(r, e.var)] * g[j];
                }
                ws.jac[(k, j)] = d;
            }
        }
    }

    fn lift(&self, x: &[Cx], t: f64) -> Vec<Cx> {
        let mut ws = self.inner.workspace();
        self.solve_eliminated(x, t, &mut ws).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn sys(ring: &Arc<Ring>, eqs: &[&str]) -> PolySystem {
        PolySystem::new(ring, eqs.iter().map(|e| parse_poly(ring, e).unwrap()).collect()).unwrap()
    }

    #[test]
    fn midpoint_is_mean_of_gamma_start_and_target() {
        let ring = Ring::indexed("x", 3);
        let start = sys(&ring, &["x0^2 - x1^2", "x2 - x0"]);
        let target = sys(&ring, &["x0*x1 + (2+i)*x2^2", "x1 + 3*x2"]);
        let mut r = rng::stream(1, 0);
        let charts = random_charts(&ring, &mut r);
        let gamma = rng::unit_circle(&mut r);
        let h = make_straight_line(&start, &target, gamma, &charts).unwrap();
        let mut ws = h.workspace();
        for _ in 0..20 {
            let x: Vec<Cx> = (0..3).map(|_| rng::gaussian(&mut r)).collect();
            h.evaluate(&x, 0.5, &mut ws);
            let s = start.evaluate(&x).unwrap();
            let f = target.evaluate(&x).unwrap();
            for i in 0..2 {
                let mean = (gamma * s[i] + f[i]) * 0.5;
                assert!((ws.vals[i] - mean).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn factored_start_rows_match_the_expanded_homotopy() {
        let ring = Ring::new(
            vec!["x0".into(), "x1".into(), "y0".into(), "y1".into(), "y2".into()],
            vec![vec![0, 1], vec![2, 3, 4]],
            vec![None, None],
        )
        .unwrap();
        let l = |e: &str| parse_poly(&ring, e).unwrap();
        let factors = vec![
            vec![l("x0 + 2*x1"), l("y0 - i*y2")],
            vec![l("3*y1 + y2"), l("y0 + y1"), l("x1 - x0")],
            vec![l("y2 - 2*y0")],
        ];
        let polys = factors
            .iter()
            .map(|row| row.iter().fold(MPoly::constant(&ring, Cx::new(1.0, 0.0)), |a, b| &a * b))
            .collect();
        let start = PolySystem::new(&ring, polys).unwrap();
        let target = sys(&ring, &["x0*y1 + x1*y2", "x0*y0*y1 - (1+i)*x1*y2^2", "y0 + y1 + y2"]);
        let mut r = rng::stream(5, 0);
        let charts = random_charts(&ring, &mut r);
        let gamma = rng::unit_circle(&mut r);
        let plain = make_straight_line(&start, &target, gamma, &charts).unwrap();
        let fact = make_straight_line_factored(&start, &factors, &target, gamma, &charts).unwrap();
        let (mut a, mut b) = (plain.workspace(), fact.workspace());
        for k in 0..10 {
            let x: Vec<Cx> = (0..5).map(|_| rng::gaussian(&mut r)).collect();
            let t = k as f64 / 9.0;
            plain.evaluate(&x, t, &mut a);
            fact.evaluate(&x, t, &mut b);
            for i in 0..5 {
                assert!((a.vals[i] - b.vals[i]).norm() < 1e-12);
                assert!((a.dt[i] - b.dt[i]).norm() < 1e-12);
                for j in 0..5 {
                    assert!((a.jac[(i, j)] - b.jac[(i, j)]).norm() < 1e-12);
                }
            }
        }
        let wrong = vec![factors[1].clone(), factors[0].clone(), factors[2].clone()];
        assert!(make_straight_line_factored(&start, &wrong, &target, gamma, &charts).is_err());
    }

    #[test]
    fn rejects_mismatched_degrees_and_non_square_input() {
        let ring = Ring::indexed("x", 2);
        let a = sys(&ring, &["x0^2 - x1^2"]);
        let b = sys(&ring, &["x0 - x1"]);
        let charts = random_charts(&ring, &mut rng::stream(0, 0));
        assert!(matches!(
            make_straight_line(&a, &b, Cx::new(1.0, 0.0), &charts),
            Err(Error::DegreeMismatch { .. })
        ));
        assert!(matches!(
            make_straight_line(&a, &a, Cx::new(1.0, 0.0), &[]),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn elimination_matches_chain_rule_by_finite_differences() {
        // rows: u-row (1-t)γ x0 + t u, and a quadric in (u, x0, x1).
        let ring = Ring::single(&["u", "x0", "x1"]).unwrap();
        let start = sys(&ring, &["x1^2 - u^2", "x0"]);
        let target = sys(&ring, &["x0*x1 + u*x1 - 2*x0^2", "u"]);
        let mut r = rng::stream(2, 0);
        let charts = random_charts(&ring, &mut r);
        let gamma = rng::unit_circle(&mut r);
        let h = make_straight_line(&start, &target, gamma, &charts).unwrap();
        let e = Eliminated::new(&h, &[(0, 1)], 0.1).unwrap();
        assert!(Eliminated::new(&h, &[(0, 1)], 0.0).is_err());
        let mut ws = e.workspace();
        let x = vec![Cx::new(0.3, 0.1), Cx::new(-0.7, 0.4)];
        let t = 0.6;
        e.evaluate(&x, t, &mut ws);
        let (vals, jac, dt) = (ws.vals.clone(), ws.jac.clone(), ws.dt.clone());
        let step = 1e-6;
        for j in 0..2 {
            let mut xp = x.clone();
            xp[j] += step;
            let mut xm = x.clone();
            xm[j] -= step;
            e.evaluate(&xp, t, &mut ws);
            let vp = ws.vals.clone();
            e.evaluate(&xm, t, &mut ws);
            for i in 0..2 {
                let fd = (vp[i] - ws.vals[i]) / (2.0 * step);
                assert!((fd - jac[(i, j)]).norm() < 1e-6, "d{i}/dx{j}");
            }
        }
        e.evaluate(&x, t + step, &mut ws);
        let vp = ws.vals.clone();
        e.evaluate(&x, t - step, &mut ws);
        for i in 0..2 {
            let fd = (vp[i] - ws.vals[i]) / (2.0 * step);
            assert!((fd - dt[i]).norm() < 1e-6);
        }
        // the lifted point satisfies the eliminated row
        let z = e.lift(&x, t);
        let mut full = h.workspace();
        h.evaluate(&z, t, &mut full);
        assert!(full.vals[1].norm() < 1e-14);
        assert!((full.vals[0] - vals[0]).norm() < 1e-14);
    }
}
