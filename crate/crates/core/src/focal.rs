//! Complex focal radii of submanifolds with section.
//!
//! `F̂(z) = det(co(zv) − si(zv) ∘ z A_v)` on the (complexified) tangent space,
//! with `co`, `si` the matrix cosine/sine of `√−1 ad(zv)`. Its zeros are the
//! complex focal radii along the normal geodesic of `v`.

use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};

use crate::contour::{find_zeros, Window};
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{c, cosh_sinhc_sqrt, eig, kernel_dim, left_inverse, max_abs, max_abs_vec, to_complex, CMat, CVec, C64, I};
use crate::space::{SpacePoint, SymmetricSpace};

/// Tolerance for the tangent-space invariance required by the section hypothesis.
pub const SECTION_TOL: f64 = 1e-8;
/// Default half-width of the focal window.
pub const DEFAULT_WINDOW: f64 = 3.0;

/// How the ambient tangent space is coordinatized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientKind {
    /// `p^c` of a complexified space, complex-bilinear `g^h`.
    Holomorphic,
    /// `p` of a real form, complexified.
    Real,
    /// `G^c/K^c` as a real symmetric space: realified `p^c`, metric `g_A`.
    Realified,
}

/// Ambient symmetric space seen through a coordinate basis of its tangent
/// space at a frame: brackets, Jacobi operators and the bilinear metric.
#[derive(Debug, Clone)]
pub struct AmbientModel {
    pub kind: AmbientKind,
    algebra: LieAlgebra,
    basis: CMat,
    basis_inv: CMat,
    gram: CMat,
}

impl AmbientModel {
    pub fn holomorphic(space: &SymmetricSpace) -> Result<Self> {
        if !space.is_complexified() {
            return Err(Error::Precondition("holomorphic model needs a complexified space".into()));
        }
        let pair = space.pair();
        Self::build(AmbientKind::Holomorphic, pair.algebra().clone(), to_complex(pair.p_basis()), pair.metric_sign())
    }

    pub fn real(space: &SymmetricSpace) -> Result<Self> {
        if space.is_complexified() {
            return Err(Error::Precondition("real model needs a real space".into()));
        }
        let pair = space.pair();
        Self::build(AmbientKind::Real, pair.algebra().clone(), to_complex(pair.p_basis()), pair.metric_sign())
    }

    pub fn realified(space: &SymmetricSpace) -> Result<Self> {
        if !space.is_complexified() {
            return Err(Error::Precondition("realified model needs a complexified space".into()));
        }
        let pair = space.pair();
        let alg = pair.algebra().complexification()?;
        let pb = pair.p_basis();
        let (d, m) = (pb.nrows(), pb.ncols());
        let mut basis = CMat::zeros(2 * d, 2 * m);
        for j in 0..m {
            for i in 0..d {
                basis[(i, j)] = c(pb[(i, j)], 0.0);
                basis[(i + d, j + m)] = c(pb[(i, j)], 0.0);
            }
        }
        Self::build(AmbientKind::Realified, alg, basis, pair.metric_sign())
    }

    fn build(kind: AmbientKind, algebra: LieAlgebra, basis: CMat, sign: f64) -> Result<Self> {
        let basis_inv = left_inverse(&basis)?;
        let kg = to_complex(algebra.killing_gram());
        let gram = basis.transpose() * kg * &basis * c(sign, 0.0);
        Ok(AmbientModel { kind, algebra, basis, basis_inv, gram })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Complex-bilinear metric in tangent coordinates.
    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn inner(&self, x: &CVec, y: &CVec) -> C64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    /// Algebra coefficients of a tangent coordinate vector.
    pub fn to_algebra(&self, x: &CVec) -> CVec {
        &self.basis * x
    }

    pub fn bracket(&self, a: &CVec, b: &CVec) -> CVec {
        self.algebra.ad_matrix_c(a) * b
    }

    /// `ad(v)^2` restricted to the tangent space: `R(X, v) v = −ad(v)^2 X`.
    pub fn jacobi_operator(&self, v: &CVec) -> CMat {
        let ad = self.algebra.ad_matrix_c(&self.to_algebra(v));
        &self.basis_inv * (&ad * &ad) * &self.basis
    }

    /// `(co, si)` of `√−1 ad(zv)` on the tangent space.
    pub fn trig(&self, v: &CVec, z: C64) -> Result<(CMat, CMat)> {
        let k = self.jacobi_operator(v) * (z * z);
        let size = (max_abs(&k) * k.nrows() as f64).sqrt();
        if !size.is_finite() || size > crate::linalg::EXP_NORM_CAP {
            return Err(Error::Overflow(format!("|z|·|ad v| ≈ {size:.3e} exceeds the cap")));
        }
        Ok(cosh_sinhc_sqrt(&k))
    }

    /// Residual of `[[a, b], c] ∈ span` over the columns (Lie triple system).
    pub fn triple_residual(&self, cols: &CMat) -> Result<f64> {
        let alg: Vec<CVec> = (0..cols.ncols()).map(|j| self.to_algebra(&cols.column(j).into_owned())).collect();
        let span = &self.basis * cols;
        let span_inv = left_inverse(&span)?;
        let mut worst: f64 = 0.0;
        for a in &alg {
            for b in &alg {
                let ab = self.algebra.ad_matrix_c(a) * b;
                for cc in &alg {
                    let t = self.algebra.ad_matrix_c(&ab) * cc;
                    let back = &span * (&span_inv * &t);
                    worst = worst.max(max_abs_vec(&(t - back)));
                }
            }
        }
        Ok(worst)
    }

    /// Largest bracket `[a, b]` among the columns (abelian test).
    pub fn abelian_residual(&self, cols: &CMat) -> f64 {
        let alg: Vec<CVec> = (0..cols.ncols()).map(|j| self.to_algebra(&cols.column(j).into_owned())).collect();
        let mut worst: f64 = 0.0;
        for a in &alg {
            for b in &alg {
                worst = worst.max(max_abs_vec(&(self.algebra.ad_matrix_c(a) * b)));
            }
        }
        worst
    }
}

/// A submanifold germ at a point: tangent and normal bases (columns in the
/// ambient tangent coordinates) and one shape matrix per normal basis vector,
/// acting on tangent-basis coefficients.
#[derive(Debug, Clone)]
pub struct SubmanifoldGerm {
    pub ambient: AmbientModel,
    pub base: SpacePoint,
    pub tangent: CMat,
    pub normal: CMat,
    pub shape: Vec<CMat>,
    pub has_section: bool,
}

/// Invariant residuals of a germ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GermResiduals {
    pub orthogonality: f64,
    pub self_adjointness: f64,
    pub section: f64,
}

impl SubmanifoldGerm {
    pub fn new(ambient: AmbientModel, base: SpacePoint, tangent: CMat, normal: CMat, shape: Vec<CMat>, has_section: bool) -> Result<Self> {
        let n = tangent.ncols();
        if tangent.nrows() != ambient.dim() || normal.nrows() != ambient.dim() || n + normal.ncols() != ambient.dim() {
            return Err(Error::Precondition("tangent and normal bases must split the ambient tangent space".into()));
        }
        if shape.len() != normal.ncols() || shape.iter().any(|a| a.nrows() != n || a.ncols() != n) {
            return Err(Error::Precondition("one n × n shape matrix per normal basis vector".into()));
        }
        let germ = SubmanifoldGerm { ambient, base, tangent, normal, shape, has_section };
        let r = germ.residuals()?;
        let scale = max_abs(&germ.tangent).max(max_abs(&germ.normal)).max(1.0);
        if r.orthogonality > 1e-10 * scale * scale {
            return Err(Error::Precondition(format!("tangent and normal spaces not orthogonal (residual {:.3e})", r.orthogonality)));
        }
        if r.self_adjointness > 1e-8 {
            return Err(Error::Precondition(format!("shape operator not self-adjoint (residual {:.3e})", r.self_adjointness)));
        }
        if has_section && r.section > SECTION_TOL {
            return Err(Error::SectionViolated(r.section));
        }
        Ok(germ)
    }

    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn codim(&self) -> usize {
        self.normal.ncols()
    }

    pub fn residuals(&self) -> Result<GermResiduals> {
        let g = self.ambient.gram();
        let orth = max_abs(&(self.tangent.transpose() * g * &self.normal));
        let induced = self.tangent.transpose() * g * &self.tangent;
        let mut sa: f64 = 0.0;
        for a in &self.shape {
            let ga = &induced * a;
            sa = sa.max(max_abs(&(&ga - ga.transpose())) / max_abs(&ga).max(1.0));
        }
        let section = if self.codim() > 0 { self.ambient.triple_residual(&self.normal)? } else { 0.0 };
        Ok(GermResiduals { orthogonality: orth, self_adjointness: sa, section })
    }

    /// Normal vector with coefficients `v` in the normal basis.
    pub fn normal_vector(&self, v: &CVec) -> CVec {
        &self.normal * v
    }

    /// `A_v` on tangent-basis coefficients.
    pub fn shape_along(&self, v: &CVec) -> CMat {
        let n = self.dim();
        self.shape.iter().zip(v.iter()).fold(CMat::zeros(n, n), |acc, (a, x)| acc + a * *x)
    }

    /// `T⁺ M T` and the residual `|M T − T (T⁺ M T)|` of the invariance of T.
    fn restrict(&self, m: &CMat) -> Result<(CMat, f64)> {
        let tinv = left_inverse(&self.tangent)?;
        let mt = m * &self.tangent;
        let r = &tinv * &mt;
        let res = max_abs(&(&mt - &self.tangent * &r)) / max_abs(m).max(1.0);
        Ok((r, res))
    }

    /// Jacobi operator `ad(v)^2` restricted to the tangent space.
    pub fn jacobi_on_tangent(&self, v: &CVec) -> Result<(CMat, f64)> {
        self.restrict(&self.ambient.jacobi_operator(&self.normal_vector(v)))
    }

    /// `co − si ∘ z A_v` on tangent-basis coefficients.
    pub fn endpoint_operator(&self, v: &CVec, z: C64) -> Result<CMat> {
        let (co, si) = self.ambient.trig(&self.normal_vector(v), z)?;
        let (co_t, r1) = self.restrict(&co)?;
        let (si_t, r2) = self.restrict(&si)?;
        let r = r1.max(r2);
        if r > SECTION_TOL {
            return Err(Error::SectionViolated(r));
        }
        Ok(co_t - si_t * self.shape_along(v) * z)
    }
}

/// `F̂(z)` for the normal vector with normal-basis coefficients `v`.
pub fn focal_determinant(germ: &SubmanifoldGerm, v: &CVec, z: C64) -> Result<C64> {
    Ok(germ.endpoint_operator(v, z)?.determinant())
}

/// Common eigenpairs `(β_i, λ_i)` with `R(e_i, v) v = −β_i^2 e_i`,
/// `A_v e_i = λ_i e_i`, sign-normalized and sorted.
pub fn simultaneous_eigen(germ: &SubmanifoldGerm, v: &CVec) -> Result<Vec<(C64, C64)>> {
    let (k, inv) = germ.jacobi_on_tangent(v)?;
    if inv > SECTION_TOL {
        return Err(Error::SectionViolated(inv));
    }
    let a = germ.shape_along(v);
    let comm = max_abs(&(&a * &k - &k * &a));
    let scale = (max_abs(&a) * max_abs(&k)).max(1.0);
    if comm > 1e-8 * scale {
        return Err(Error::NotDiagonalizable(format!(
            "shape and Jacobi operators do not commute (residual {comm:.3e}); use the argument-principle finder"
        )));
    }
    let n = germ.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    // generic combination separates joint eigenspaces
    let mix = 0.754_877_666_246_692_8 * (max_abs(&k) + 1.0) / (max_abs(&a) + 1.0);
    let (_, p) = eig(&(&k + &a * c(mix, 0.0)))?;
    let cond = crate::linalg::condition(&p);
    if !(cond <= 1e8) {
        return Err(Error::NotDiagonalizable(format!("eigenvector condition {cond:.3e}; use the argument-principle finder")));
    }
    let pinv = p.clone().try_inverse().ok_or_else(|| Error::NotDiagonalizable("singular eigenvector matrix".into()))?;
    let kd = &pinv * &k * &p;
    let ad = &pinv * &a * &p;
    let off = |m: &CMat| {
        let mut w: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w = w.max(m[(i, j)].norm());
                }
            }
        }
        w
    };
    let r = off(&kd).max(off(&ad));
    if r > 1e-8 * scale * cond.max(1.0).sqrt() {
        return Err(Error::NotDiagonalizable(format!("joint diagonalization residual {r:.3e}")));
    }
    let mut pairs: Vec<(C64, C64)> = (0..n).map(|i| (normalize_beta(kd[(i, i)].sqrt()), ad[(i, i)])).collect();
    pairs.sort_by(|x, y| {
        x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)).then(x.1.re.total_cmp(&y.1.re)).then(x.1.im.total_cmp(&y.1.im))
    });
    Ok(pairs)
}

/// `Re β >= 0`, and `Im β >= 0` when `Re β = 0`.
pub fn normalize_beta(b: C64) -> C64 {
    if b.re < 0.0 || (b.re == 0.0 && b.im < 0.0) {
        -b
    } else {
        b
    }
}

/// One factor `cos(√−1 zβ) − λ sin(√−1 zβ)/(√−1 β)` of the product formula.
pub fn focal_factor(beta: C64, lambda: C64, z: C64) -> C64 {
    let x = z * beta;
    // sinh(x)/x by series near 0
    let sinhc = if x.norm() < 1e-4 { c(1.0, 0.0) + x * x / 6.0 + x * x * x * x / 120.0 } else { x.sinh() / x };
    x.cosh() - lambda * z * sinhc
}

pub fn focal_product(pairs: &[(C64, C64)], z: C64) -> C64 {
    pairs.iter().fold(c(1.0, 0.0), |acc, &(b, l)| acc * focal_factor(b, l, z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FocalMethod {
    ClosedForm,
    ArgumentPrinciple,
}

impl FocalMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FocalMethod::ClosedForm => "closed_form",
            FocalMethod::ArgumentPrinciple => "argument_principle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalRadius {
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
    /// `|F̂(z)|` (argument principle) or the largest vanishing factor (closed form).
    pub residual: f64,
    /// Dimension of the kernel of the endpoint operator, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_dim: Option<usize>,
}

impl FocalRadius {
    pub fn z(&self) -> C64 {
        c(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalReport {
    pub radii: Vec<FocalRadius>,
    pub window: Window,
    pub method: FocalMethod,
    pub winding_count: Option<i64>,
    /// Scale of `|F̂|` on the window boundary (argument principle).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl FocalReport {
    pub fn total_multiplicity(&self) -> u32 {
        self.radii.iter().map(|r| r.multiplicity).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_sorted_json(self)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,multiplicity,method,residual\n");
        for r in &self.radii {
            s.push_str(&format!("{:.15e},{:.15e},{},{},{:.6e}\n", r.re, r.im, r.multiplicity, self.method.as_str(), r.residual));
        }
        s
    }

    /// Multiset with `z` replaced by `z / s`.
    pub fn expanded(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for r in &self.radii {
            for _ in 0..r.multiplicity {
                out.push(r.z());
            }
        }
        out
    }
}

fn sort_radii(r: &mut [FocalRadius]) {
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Radii from the product formula, enumerating every family inside `window`.
pub fn focal_radii_closed_form(pairs: &[(C64, C64)], window: Window) -> FocalReport {
    let mut raw: Vec<(C64, f64)> = Vec::new();
    let slack = 1e-12 * window.diameter().max(1.0);
    for &(beta, lambda) in pairs {
        if beta == c(0.0, 0.0) {
            if lambda != c(0.0, 0.0) {
                let z = lambda.inv();
                if window.contains(z, slack) {
                    raw.push((z, focal_factor(beta, lambda, z).norm()));
                }
            }
            continue;
        }
        let w = lambda / (I * beta);
        let acot = if w == c(0.0, 0.0) { c(std::f64::consts::FRAC_PI_2, 0.0) } else { w.inv().atan() };
        if !acot.is_finite() {
            continue;
        }
        let z0 = -I / beta * acot;
        let step = -I / beta * std::f64::consts::PI;
        let center = window.center();
        let kc = ((center - z0) * step.conj()).re / step.norm_sqr();
        let span = (window.diameter() / step.norm()).ceil() + 1.0;
        let (k0, k1) = ((kc - span).floor() as i64, (kc + span).ceil() as i64);
        for k in k0..=k1 {
            let z = z0 + step * k as f64;
            if window.contains(z, slack) {
                raw.push((z, focal_factor(beta, lambda, z).norm()));
            }
        }
    }
    let tol = 1e-9 * window.diameter().max(1.0);
    let mut radii: Vec<FocalRadius> = Vec::new();
    for (z, res) in raw {
        if let Some(r) = radii.iter_mut().find(|r| (r.z() - z).norm() <= tol) {
            r.multiplicity += 1;
            r.residual = r.residual.max(res);
        } else {
            radii.push(FocalRadius { re: z.re, im: z.im, multiplicity: 1, residual: res, kernel_dim: None });
        }
    }
    sort_radii(&mut radii);
    let max_residual = radii.iter().map(|r| r.residual).fold(0.0, f64::max);
    FocalReport { radii, window, method: FocalMethod::ClosedForm, winding_count: None, scale: None, max_residual, notes: Vec::new() }
}

/// Radii as zeros of an entire determinant oracle (argument principle).
pub fn focal_radii_generic<F>(det: F, window: Window, grid: usize) -> Result<FocalReport>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let search = find_zeros(&det, window, grid)?;
    let mut radii = Vec::new();
    for zero in &search.zeros {
        let res = det(zero.z)?.norm();
        radii.push(FocalRadius { re: zero.z.re, im: zero.z.im, multiplicity: zero.multiplicity, residual: res, kernel_dim: None });
    }
    sort_radii(&mut radii);
    let max_residual = radii.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(FocalReport {
        radii,
        window: search.window,
        method: FocalMethod::ArgumentPrinciple,
        winding_count: Some(search.winding),
        scale: Some(search.boundary_scale),
        max_residual,
        notes: search.notes,
    })
}

/// Argument-principle radii of a germ along `v`, with kernel dimensions of
/// the endpoint operator; flags radii where the zero order and kernel
/// dimension differ.
pub fn germ_focal_radii(germ: &SubmanifoldGerm, v: &CVec, window: Window, grid: usize) -> Result<FocalReport> {
    // surface a section violation before the contour search
    germ.endpoint_operator(v, c(0.0, 0.0))?;
    let mut report = focal_radii_generic(|z| focal_determinant(germ, v, z), window, grid)?;
    for r in report.radii.iter_mut() {
        let op = germ.endpoint_operator(v, r.z())?;
        let k = kernel_dim(&op, 1e-6 * max_abs(&op).max(1.0));
        r.kernel_dim = Some(k);
        if k as u32 != r.multiplicity {
            report.notes.push(format!(
                "radius {:.6e}{:+.6e}i: zero order {} differs from kernel dimension {k}",
                r.re, r.im, r.multiplicity
            ));
        }
    }
    Ok(report)
}

/// Largest distance between two radius multisets after matching, or `None`
/// when the total multiplicities differ.
pub fn multiset_distance(a: &FocalReport, b: &FocalReport) -> Option<f64> {
    let xa = a.expanded();
    let mut xb = b.expanded();
    if xa.len() != xb.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for z in xa {
        let (idx, d) = xb.iter().enumerate().map(|(i, w)| (i, (w - z).norm())).min_by(|x, y| x.1.total_cmp(&y.1))?;
        worst = worst.max(d);
        xb.swap_remove(idx);
    }
    Some(worst)
}

/// Germ of a real submanifold of a real catalog space.
#[derive(Debug, Clone)]
pub struct RealGerm {
    pub base: SpacePoint,
    pub tangent: crate::linalg::RMat,
    pub normal: crate::linalg::RMat,
    pub shape: Vec<crate::linalg::RMat>,
}

impl RealGerm {
    /// Complexified germ: tangent space `(T_xM)^c`, complexified shape operator.
    pub fn complexify(&self, space: &SymmetricSpace) -> Result<SubmanifoldGerm> {
        let ambient = AmbientModel::real(space)?;
        SubmanifoldGerm::new(
            ambient,
            self.base.clone(),
            to_complex(&self.tangent),
            to_complex(&self.normal),
            self.shape.iter().map(to_complex).collect(),
            true,
        )
    }
}

/// Complex focal radii of a real germ along the real normal vector `v`.
pub fn real_submanifold_focal(space: &SymmetricSpace, germ: &RealGerm, v: &crate::linalg::RVec, window: Window, grid: usize) -> Result<FocalReport> {
    let g = germ.complexify(space)?;
    germ_focal_radii(&g, &crate::linalg::to_complex_vec(v), window, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{RMat, RVec};

    fn e(m: usize, i: usize) -> CVec {
        CVec::from_fn(m, |k, _| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    /// Complex hypersurface germ of so(3,1)^c at the origin with normal e0.
    fn so31_germ(shape: CMat) -> SubmanifoldGerm {
        let s = catalog::space("so31c").unwrap();
        let amb = AmbientModel::holomorphic(&s).unwrap();
        let t = CMat::from_columns(&[e(3, 1), e(3, 2)]);
        let n = CMat::from_columns(&[e(3, 0)]);
        SubmanifoldGerm::new(amb, s.origin(), t, n, vec![shape], true).unwrap()
    }

    fn sym_shape() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.4, 0.2), c(0.3, -0.1), c(0.3, -0.1), c(-0.7, 0.5)])
    }

    #[test]
    fn determinant_is_one_at_zero_and_matches_product() {
        let g = so31_germ(sym_shape());
        let v = CVec::from_vec(vec![c(0.9, 0.3)]);
        assert!((focal_determinant(&g, &v, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let pairs = simultaneous_eigen(&g, &v).unwrap();
        for z in [c(0.3, 0.2), c(-1.7, 2.5), c(2.9, -0.4)] {
            let d = focal_determinant(&g, &v, z).unwrap();
            let p = focal_product(&pairs, z);
            assert!((d - p).norm() <= 1e-9 * d.norm().max(1.0), "{d} vs {p}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let w = Window::square(3.0);
        let r = focal_radii_closed_form(&[(c(0.0, 0.0), c(0.5, 0.0))], w);
        assert_eq!(r.radii.len(), 1);
        assert!((r.radii[0].z() - c(2.0, 0.0)).norm() < 1e-15);
        assert!(focal_radii_closed_form(&[(c(0.0, 0.0), c(0.0, 0.0))], w).radii.is_empty());
        let r = focal_radii_closed_form(&[(c(1.0, 0.0), c(0.0, 0.0))], w);
        let mut ims: Vec<f64> = r.radii.iter().map(|x| x.im).collect();
        ims.sort_by(f64::total_cmp);
        let h = std::f64::consts::FRAC_PI_2;
        assert_eq!(ims.len(), 2);
        assert!((ims[0] + h).abs() < 1e-14 && (ims[1] - h).abs() < 1e-14);
        // oracle: cos(√−1 z) vanishes there
        for x in &r.radii {
            assert!((I * x.z()).cos().norm() < 1e-12);
            assert!(x.residual <= 1e-10);
        }
    }

    #[test]
    fn methods_agree_and_winding_is_conserved() {
        let g = so31_germ(sym_shape());
        let v = CVec::from_vec(vec![c(1.0, 0.0)]);
        let w = Window::square(3.0);
        let cf = focal_radii_closed_form(&simultaneous_eigen(&g, &v).unwrap(), w);
        let ap = germ_focal_radii(&g, &v, w, 2).unwrap();
        assert_eq!(ap.winding_count, Some(ap.total_multiplicity() as i64));
        assert!(!cf.radii.is_empty());
        let d = multiset_distance(&cf, &ap).unwrap();
        assert!(d < 1e-8, "{d}");
        for r in &ap.radii {
            assert!(r.residual <= 1e-8 * ap.scale.unwrap());
        }
    }

    #[test]
    fn coinciding_pairs_have_multiplicity() {
        let g = so31_germ(CMat::identity(2, 2) * c(0.8, 0.0));
        let v = CVec::from_vec(vec![c(1.0, 0.0)]);
        let w = Window::square(3.0);
        let cf = focal_radii_closed_form(&simultaneous_eigen(&g, &v).unwrap(), w);
        assert!(cf.radii.iter().all(|r| r.multiplicity == 2));
        let ap = germ_focal_radii(&g, &v, w, 1).unwrap();
        assert!(multiset_distance(&cf, &ap).unwrap() < 1e-8);
        assert!(ap.radii.iter().all(|r| r.kernel_dim == Some(2)));
    }

    #[test]
    fn totally_geodesic_radii_are_conjugate_radii() {
        let g = so31_germ(CMat::zeros(2, 2));
        let v = CVec::from_vec(vec![c(0.6, 0.8)]);
        let pairs = simultaneous_eigen(&g, &v).unwrap();
        assert!(pairs.iter().all(|p| p.1 == c(0.0, 0.0)));
        let w = Window::square(6.0);
        let ap = germ_focal_radii(&g, &v, w, 1).unwrap();
        let s = catalog::space("so31c").unwrap();
        let tangent = CMat::from_columns(&[e(3, 1), e(3, 2)]);
        let scan = crate::jacobi::jacobi_zero_scan(&s, &(e(3, 0) * c(0.6, 0.8)), crate::jacobi::JacobiKind::Position, Some(&tangent), 6.0, 61).unwrap();
        let mut expanded: Vec<C64> = Vec::new();
        for z in &scan {
            expanded.push(*z);
        }
        assert!(!expanded.is_empty());
        for r in &ap.radii {
            assert!(expanded.iter().any(|z| (z - r.z()).norm() < 1e-7), "{:?} vs {scan:?}", r.z());
        }
        assert_eq!(ap.radii.len(), scan.len());
    }

    #[test]
    fn scaling_covariance() {
        let g = so31_germ(sym_shape());
        let v = CVec::from_vec(vec![c(1.0, 0.0)]);
        let w = Window::square(3.0);
        let a = focal_radii_closed_form(&simultaneous_eigen(&g, &v).unwrap(), w);
        let s = 1.7;
        let b = focal_radii_closed_form(&simultaneous_eigen(&g, &(&v * c(s, 0.0))).unwrap(), w.scaled(s));
        let scaled: Vec<C64> = a.expanded().iter().map(|z| z / s).collect();
        let mut bz = b.expanded();
        assert_eq!(scaled.len(), bz.len());
        for z in scaled {
            let (i, d) = bz.iter().enumerate().map(|(i, w)| (i, (w - z).norm())).min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
            assert!(d < 1e-12);
            bz.swap_remove(i);
        }
        let ga = germ_focal_radii(&g, &(&v * c(s, 0.0)), w.scaled(s), 1).unwrap();
        assert!(multiset_distance(&ga, &b).unwrap() < 1e-8);
    }

    #[test]
    fn section_violation_is_reported() {
        // tangent space not invariant under ad(v)^2: tilt it in sl(2)^c realified
        let s = catalog::space("sl2c").unwrap();
        let amb = AmbientModel::holomorphic(&s).unwrap();
        let t = CMat::from_columns(&[CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])]);
        let n = CMat::from_columns(&[CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])]);
        let g = SubmanifoldGerm::new(amb, s.origin(), t, n, vec![CMat::zeros(1, 1)], true).unwrap();
        // v along the normal keeps T invariant in rank one
        assert!(focal_determinant(&g, &CVec::from_vec(vec![c(1.0, 0.0)]), c(0.5, 0.5)).is_ok());
        // realified coordinates (Re ξ1, Re ξ2, Im ξ1, Im ξ2); normals e1, i e1 + 2 e2
        let amb = AmbientModel::realified(&s).unwrap();
        let col = |x: [f64; 4]| CVec::from_iterator(4, x.iter().map(|&t| c(t, 0.0)));
        let t = CMat::from_columns(&[col([0.0, 1.0, 2.0, 0.0]), col([0.0, 0.0, 0.0, 1.0])]);
        let n = CMat::from_columns(&[col([1.0, 0.0, 0.0, 0.0]), col([0.0, 2.0, 1.0, 0.0])]);
        let bad = SubmanifoldGerm::new(amb, s.origin(), t, n, vec![CMat::zeros(2, 2); 2], false).unwrap();
        let r = focal_determinant(&bad, &CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]), c(0.5, 0.0));
        assert!(matches!(r, Err(Error::SectionViolated(_))), "{r:?}");
    }

    /// Real Jacobi field `y'' = κ y` (curvature −κ), `y(0) = 0`, `y'(0) = 1`.
    fn hyperbolic_jacobi(kappa: f64, rho: f64) -> (f64, f64) {
        let op = |_: f64| RMat::from_element(1, 1, kappa * rho * rho);
        let (y, p) = crate::jacobi::integrate_jacobi(op, &RVec::from_element(1, 0.0), &RVec::from_element(1, rho), 8192);
        (y[0], p[0] / rho)
    }

    #[test]
    fn hyperbolic_circle_focal_radius_is_its_radius() {
        let s = catalog::space("sl2").unwrap();
        let amb = AmbientModel::real(&s).unwrap();
        let kappa = amb.jacobi_operator(&e(2, 0))[(1, 1)].re;
        assert!(kappa > 0.0);
        let rho = 1.3;
        let (y, yp) = hyperbolic_jacobi(kappa, rho);
        // circle of radius rho about the center; at its point, inward normal e0
        let germ = RealGerm {
            base: s.origin(),
            tangent: RMat::from_column_slice(2, 1, &[0.0, 1.0]),
            normal: RMat::from_column_slice(2, 1, &[1.0, 0.0]),
            shape: vec![RMat::from_element(1, 1, yp / y)],
        };
        let v = RVec::from_element(1, 1.0);
        let rep = real_submanifold_focal(&s, &germ, &v, Window::square(3.0), 1).unwrap();
        assert!(rep.radii.iter().any(|r| (r.z() - c(rho, 0.0)).norm() < 1e-8), "{:?}", rep.radii);
        for r in &rep.radii {
            assert!(rep.radii.iter().any(|q| (q.z() - r.z().conj()).norm() < 1e-8));
        }
        // totally geodesic germ along a flat direction: F̂ ≡ 1
        let s3 = catalog::space("so31").unwrap();
        let _ = s3;
    }
}
