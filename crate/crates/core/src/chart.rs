//! Truncated multivariate power series and chart metrics with their
//! holomorphic extension `g^h` and anti-Kaehler metric `g_A = 2 Re g^h`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec, RMat, C64};
use crate::space::SymmetricSpace;

/// Real power series in `n` variables, truncated at total degree `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    max_degree: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize, max_degree: usize) -> Self {
        Poly { nvars, max_degree, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, max_degree: usize, value: f64) -> Self {
        let mut p = Poly::zero(nvars, max_degree);
        if value != 0.0 {
            p.terms.insert(vec![0; nvars], value);
        }
        p
    }

    pub fn variable(nvars: usize, max_degree: usize, i: usize) -> Self {
        let mut p = Poly::zero(nvars, max_degree);
        let mut e = vec![0; nvars];
        e[i] = 1;
        if max_degree >= 1 {
            p.terms.insert(e, 1.0);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.max_degree = self.max_degree.min(other.max_degree);
        for (e, v) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += v;
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= s;
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let deg = self.max_degree.min(other.max_degree);
        let mut out = Poly::zero(self.nvars, deg);
        for (ea, va) in &self.terms {
            let da: u32 = ea.iter().sum();
            for (eb, vb) in &other.terms {
                let db: u32 = eb.iter().sum();
                if (da + db) as usize > deg {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_insert(0.0) += va * vb;
            }
        }
        out.prune();
        out
    }

    /// `Σ_k a_k q^k` by Horner's rule.
    pub fn compose_univariate(coeffs: &[f64], q: &Poly) -> Poly {
        let mut acc = Poly::zero(q.nvars, q.max_degree);
        for &a in coeffs.iter().rev() {
            acc = acc.mul(q).add(&Poly::constant(q.nvars, q.max_degree, a));
        }
        acc
    }

    fn prune(&mut self) {
        let deg = self.max_degree as u32;
        self.terms.retain(|e, v| *v != 0.0 && e.iter().sum::<u32>() <= deg);
    }

    /// Evaluate at a complex point; also returns the contribution of the top
    /// two degree shells as a truncation indicator.
    pub fn eval_with_tail(&self, z: &[C64]) -> (C64, f64) {
        let mut total = c(0.0, 0.0);
        let mut tail = 0.0;
        let top = self.max_degree.saturating_sub(1).max(1) as u32;
        for (e, v) in &self.terms {
            let mut m = c(*v, 0.0);
            for (zi, &k) in z.iter().zip(e) {
                m *= zi.powu(k);
            }
            total += m;
            if e.iter().sum::<u32>() >= top {
                tail += m.norm();
            }
        }
        (total, tail)
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.eval_with_tail(z).0
    }
}

/// A chart metric given by power-series coefficients `g_ij`, symmetric by
/// construction, with its holomorphic extension to complex chart points.
#[derive(Debug, Clone)]
pub struct ChartMetric {
    dim: usize,
    /// Upper triangle, row-major: `(i, j)` with `i <= j`.
    upper: Vec<Poly>,
    signature: (usize, usize),
}

impl ChartMetric {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(ν, m − ν)`: numbers of negative and positive directions at the origin.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.dim - a * (a + 1) / 2 + b
    }

    pub fn coefficient(&self, i: usize, j: usize) -> &Poly {
        &self.upper[self.idx(i, j)]
    }

    /// `g^h` matrix at a complex chart point; fails with a precision error
    /// when the truncation indicator exceeds `tol`.
    pub fn holomorphic_matrix(&self, z: &[C64], tol: f64) -> Result<CMat> {
        if z.len() != self.dim {
            return Err(Error::Precondition(format!("chart point must have {} coordinates", self.dim)));
        }
        let mut g = CMat::zeros(self.dim, self.dim);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let (v, tail) = self.coefficient(i, j).eval_with_tail(z);
                worst = worst.max(tail);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        if worst > tol {
            return Err(Error::Precision(format!(
                "metric series truncation indicator {worst:.3e} exceeds {tol:.1e}; raise the truncation order"
            )));
        }
        Ok(g)
    }

    /// `g^h(X, Y)` for complex component vectors `X_i = dz_i(X)`.
    pub fn holomorphic(&self, z: &[C64], x: &CVec, y: &CVec, tol: f64) -> Result<C64> {
        let g = self.holomorphic_matrix(z, tol)?;
        Ok((x.transpose() * g * y)[(0, 0)])
    }

    /// `g_A(X, Y) = 2 Re g^h(X, Y)`.
    pub fn anti_kaehler(&self, z: &[C64], x: &CVec, y: &CVec, tol: f64) -> Result<f64> {
        Ok(2.0 * self.holomorphic(z, x, y, tol)?.re)
    }

    /// Real `2n × 2n` Gram matrix of `g_A` in the real basis
    /// `(∂/∂x_1, …, ∂/∂x_n, ∂/∂y_1, …, ∂/∂y_n)`.
    pub fn anti_kaehler_gram(&self, z: &[C64], tol: f64) -> Result<RMat> {
        let n = self.dim;
        let g = self.holomorphic_matrix(z, tol)?;
        let mut out = RMat::zeros(2 * n, 2 * n);
        for a in 0..2 * n {
            for b in 0..2 * n {
                let fa = if a < n { c(1.0, 0.0) } else { c(0.0, 1.0) };
                let fb = if b < n { c(1.0, 0.0) } else { c(0.0, 1.0) };
                out[(a, b)] = 2.0 * (g[(a % n, b % n)] * fa * fb).re;
            }
        }
        Ok(out)
    }
}

/// Build the holomorphic extension from real-analytic coefficient germs.
/// `coeffs[i][j]` must equal `coeffs[j][i]`.
pub fn extend_metric(coeffs: Vec<Vec<Poly>>) -> Result<ChartMetric> {
    let n = coeffs.len();
    if n == 0 || coeffs.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("metric coefficients must form a square array".into()));
    }
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            if coeffs[i][j] != coeffs[j][i] {
                return Err(Error::Precondition(format!("coefficient ({i},{j}) is not symmetric")));
            }
            upper.push(coeffs[i][j].clone());
        }
    }
    let origin = vec![c(0.0, 0.0); n];
    let g0 = RMat::from_fn(n, n, |i, j| coeffs[i][j].eval(&origin).re);
    let eig = nalgebra::SymmetricEigen::new(g0);
    let neg = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    if eig.eigenvalues.iter().any(|l| l.abs() < 1e-12) {
        return Err(Error::Degenerate("metric is degenerate at the chart origin".into()));
    }
    Ok(ChartMetric { dim: n, upper, signature: (neg, n - neg) })
}

/// Flat metric `δ_ij` in `n` variables.
pub fn flat_metric(n: usize) -> ChartMetric {
    let coeffs = (0..n)
        .map(|i| (0..n).map(|j| Poly::constant(n, 0, if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    extend_metric(coeffs).expect("flat metric")
}

/// Metric of a space of constant curvature `kappa` in normal coordinates,
/// `g_ij = δ_ij f(|x|²) + x_i x_j h(|x|²)` with `f(s) = sin²(√(κs))/(κs)`,
/// truncated at total degree `2 * order`.
pub fn constant_curvature_normal_metric(n: usize, kappa: f64, order: usize) -> Result<ChartMetric> {
    let deg = 2 * order;
    // (2k)! and 2^(2k-1) grow fast; accumulate the ratio directly
    let mut f = Vec::with_capacity(order + 1);
    let mut h = Vec::with_capacity(order + 1);
    let mut term = 1.0; // (-1)^{k+1} 2^{2k-1} κ^{k-1} / (2k)! at k = 1
    for k in 1..=order + 1 {
        if k > 1 {
            let kk = k as f64;
            term *= -4.0 * kappa / ((2.0 * kk - 1.0) * (2.0 * kk));
        }
        f.push(term);
        if k >= 2 {
            h.push(-term);
        }
    }
    let s = (0..n).fold(Poly::zero(n, deg), |acc, i| {
        let x = Poly::variable(n, deg, i);
        acc.add(&x.mul(&x))
    });
    let fp = Poly::compose_univariate(&f, &s);
    let hp = Poly::compose_univariate(&h, &s);
    let mut coeffs = vec![vec![Poly::zero(n, deg); n]; n];
    for i in 0..n {
        for j in 0..n {
            let xi = Poly::variable(n, deg, i);
            let xj = Poly::variable(n, deg, j);
            let mut g = xi.mul(&xj).mul(&hp);
            if i == j {
                g = g.add(&fp);
            }
            coeffs[i][j] = g;
        }
    }
    // make the stored array exactly symmetric
    for i in 0..n {
        for j in 0..i {
            coeffs[i][j] = coeffs[j][i].clone();
        }
    }
    extend_metric(coeffs)
}

/// Normal chart `x -> exp_o(Σ x_i e_i)` of a catalog space with orthonormal
/// `p` basis `e_i`; on the complexification the same formula is the
/// holomorphic extension of the real chart.
#[derive(Debug, Clone)]
pub struct NormalChart<'a> {
    space: &'a SymmetricSpace,
}

impl<'a> NormalChart<'a> {
    pub fn new(space: &'a SymmetricSpace) -> Self {
        NormalChart { space }
    }

    pub fn map(&self, z: &[C64]) -> Result<crate::space::SpacePoint> {
        let o = self.space.origin();
        let v = self.space.tangent_from_p(&o, &CVec::from_column_slice(z))?;
        self.space.exp(&v)
    }

    pub fn inverse(&self, q: &crate::space::SpacePoint) -> Result<Vec<C64>> {
        let o = self.space.origin();
        let l = self.space.log_point(&o, q)?;
        Ok(self.space.p_coords(&l).iter().copied().collect())
    }

    /// Ambient metric of the images of chart directions `x`, `y` at `z`,
    /// through the exact differential of `exp`.
    pub fn pullback_metric(&self, z: &[C64], x: &CVec, y: &CVec) -> Result<f64> {
        let o = self.space.origin();
        let u = self.space.tangent_from_p(&o, &CVec::from_column_slice(z))?;
        let dx = self.space.exp_differential(&u, &self.space.tangent_from_p(&o, x)?)?;
        let dy = self.space.exp_differential(&u, &self.space.tangent_from_p(&o, y)?)?;
        self.space.metric(&dx, &dy)
    }
}

/// Constant sectional curvature of a rank-one catalog space (from the first
/// two `p` basis vectors).
pub fn catalog_curvature(space: &SymmetricSpace) -> Result<f64> {
    let real = space.real_form();
    if real.dim_p() < 2 {
        return Err(Error::Precondition("curvature needs dim p >= 2".into()));
    }
    let o = real.origin();
    let m = real.dim_p();
    let e = |i: usize| CVec::from_fn(m, |k, _| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let x = real.tangent_from_p(&o, &e(0))?;
    let y = real.tangent_from_p(&o, &e(1))?;
    real.sectional_curvature(&x, &y)
}
