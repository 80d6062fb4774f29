//! Matrix Lie algebras, their complexifications and symmetric pairs.
//!
//! An algebra is given by a list of square matrices (real or complex
//! entries) that is closed under the commutator over the reals. Elements are
//! real coefficient vectors in that basis. Complex-linear extensions
//! (`*_c` methods) act on complex coefficient vectors with the same
//! structure constants, which is the complexification `g^c` of a real form.
//!
//! The complexification regarded as a real algebra of twice the dimension is
//! available through [`LieAlgebra::complexification`]; its Killing form is
//! `2 Re B^c`.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{
    c, left_inverse, left_inverse_real, max_abs, null_space_real, rank_real, CMat, CVec, RMat, RVec,
    C64, ZERO,
};

/// Default residual tolerance for structural checks.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    basis: Vec<CMat>,
    /// `structure[(i * d + j) * d + k]` is the `k`-th coefficient of `[b_i, b_j]`.
    structure: Vec<f64>,
    killing_gram: RMat,
    complexified: bool,
    conjugation: Option<RMat>,
    complex_structure: Option<RMat>,
    expand_real: RMat,
    expand_complex: Option<CMat>,
    tol: f64,
}

fn vectorize_real(m: &CMat) -> RVec {
    let n = m.len();
    RVec::from_fn(2 * n, |i, _| if i < n { m[i].re } else { m[i - n].im })
}

impl LieAlgebra {
    pub fn new(basis: Vec<CMat>) -> Result<Self> {
        Self::with_tolerance(basis, DEFAULT_TOL)
    }

    pub fn with_tolerance(basis: Vec<CMat>, tol: f64) -> Result<Self> {
        let d = basis.len();
        if d == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        let n = basis[0].nrows();
        if basis.iter().any(|b| b.nrows() != n || b.ncols() != n) {
            return Err(Error::InvalidAlgebra("basis matrices must be square of equal size".into()));
        }
        let vec_real = RMat::from_columns(&basis.iter().map(vectorize_real).collect::<Vec<_>>());
        if rank_real(&vec_real, 1e-12) < d {
            return Err(Error::InvalidAlgebra("basis is linearly dependent over R".into()));
        }
        let expand_real = left_inverse_real(&vec_real)?;
        let vec_complex = CMat::from_columns(
            &basis
                .iter()
                .map(|b| CVec::from_iterator(b.len(), b.iter().cloned()))
                .collect::<Vec<_>>(),
        );
        let sv = vec_complex.clone().singular_values();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let expand_complex = if smin > 1e-12 * smax {
            Some(left_inverse(&vec_complex)?)
        } else {
            None
        };

        let mut structure = vec![0.0; d * d * d];
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let v = vectorize_real(&comm);
                let coeff = &expand_real * &v;
                let back = &vec_real * &coeff;
                worst = worst.max((back - v).amax());
                for k in 0..d {
                    structure[(i * d + j) * d + k] = coeff[k];
                }
            }
        }
        if worst > tol.max(1e-8) {
            return Err(Error::InvalidAlgebra(format!(
                "basis not closed under the bracket (expansion residual {worst:.3e})"
            )));
        }
        // store exactly antisymmetric constants
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    let a = structure[(i * d + j) * d + k];
                    let b = structure[(j * d + i) * d + k];
                    let s = 0.5 * (a - b);
                    structure[(i * d + j) * d + k] = s;
                    structure[(j * d + i) * d + k] = -s;
                }
            }
        }
        let mut alg = LieAlgebra {
            basis,
            structure,
            killing_gram: RMat::zeros(d, d),
            complexified: false,
            conjugation: None,
            complex_structure: None,
            expand_real,
            expand_complex,
            tol,
        };
        let jac = alg.jacobi_residual();
        if jac > tol {
            return Err(Error::InvalidAlgebra(format!("Jacobi identity residual {jac:.3e}")));
        }
        // kappa_ab = sum_{i,j} c_{a i}^j c_{b j}^i
        let mut gram = RMat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        s += alg.c(a, i, j) * alg.c(b, j, i);
                    }
                }
                gram[(a, b)] = s;
            }
        }
        alg.killing_gram = gram;
        Ok(alg)
    }

    #[inline]
    fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.basis.len();
        self.structure[(i * d + j) * d + k]
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.basis[0].nrows()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn is_complexified(&self) -> bool {
        self.complexified
    }

    /// Coefficient involution `x + iy -> x - iy` (complexified algebras only).
    pub fn conjugation(&self) -> Option<&RMat> {
        self.conjugation.as_ref()
    }

    /// Multiplication by `i` on coefficients (complexified algebras only).
    pub fn complex_structure(&self) -> Option<&RMat> {
        self.complex_structure.as_ref()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c(i, j, k)
    }

    pub fn element_matrix(&self, x: &RVec) -> CMat {
        let n = self.matrix_size();
        let mut m = CMat::zeros(n, n);
        for (xi, b) in x.iter().zip(&self.basis) {
            if *xi != 0.0 {
                m += b * c(*xi, 0.0);
            }
        }
        m
    }

    /// Matrix of a complex combination of basis elements.
    pub fn element_matrix_c(&self, x: &CVec) -> CMat {
        let n = self.matrix_size();
        let mut m = CMat::zeros(n, n);
        for (xi, b) in x.iter().zip(&self.basis) {
            if *xi != ZERO {
                m += b * *xi;
            }
        }
        m
    }

    /// Real coefficients of a matrix in the basis, with expansion residual.
    pub fn expand(&self, m: &CMat) -> (RVec, f64) {
        let v = vectorize_real(m);
        let coeff = &self.expand_real * &v;
        let back = vectorize_real(&self.element_matrix(&coeff));
        let res = (back - v).amax();
        (coeff, res)
    }

    /// Complex coefficients of a matrix of `g^c` in the basis of a real form.
    pub fn expand_c(&self, m: &CMat) -> Result<(CVec, f64)> {
        let inv = self.expand_complex.as_ref().ok_or_else(|| {
            Error::Precondition("basis is not a real form (dependent over C); use expand".into())
        })?;
        let v = CVec::from_iterator(m.len(), m.iter().cloned());
        let coeff = inv * &v;
        let back = self.element_matrix_c(&coeff);
        let res = max_abs(&(back - m));
        Ok((coeff, res))
    }

    /// `[x, y]` from the structure constants.
    pub fn bracket(&self, x: &RVec, y: &RVec) -> RVec {
        let d = self.dim();
        let mut out = RVec::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..d {
                    out[k] += w * self.c(i, j, k);
                }
            }
        }
        out
    }

    /// Complex-bilinear extension of the bracket.
    pub fn bracket_c(&self, x: &CVec, y: &CVec) -> CVec {
        let d = self.dim();
        let mut out = CVec::zeros(d);
        for i in 0..d {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == ZERO {
                    continue;
                }
                for k in 0..d {
                    out[k] += w * self.c(i, j, k);
                }
            }
        }
        out
    }

    /// `XY - YX` computed on matrices and re-expanded, with residual.
    pub fn bracket_via_matrices(&self, x: &RVec, y: &RVec) -> (RVec, f64) {
        let mx = self.element_matrix(x);
        let my = self.element_matrix(y);
        self.expand(&(&mx * &my - &my * &mx))
    }

    /// Matrix of `y -> [x, y]` in the stored basis.
    pub fn ad_matrix(&self, x: &RVec) -> RMat {
        let d = self.dim();
        let mut m = RMat::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    m[(k, j)] += x[i] * self.c(i, j, k);
                }
            }
        }
        m
    }

    pub fn ad_matrix_c(&self, x: &CVec) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for i in 0..d {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    m[(k, j)] += x[i] * self.c(i, j, k);
                }
            }
        }
        m
    }

    /// Gram matrix of the Killing form in the stored basis.
    pub fn killing_gram(&self) -> &RMat {
        &self.killing_gram
    }

    /// `B(x, y) = trace(ad x ad y)`.
    pub fn killing_form(&self, x: &RVec, y: &RVec) -> f64 {
        (x.transpose() * &self.killing_gram * y)[(0, 0)]
    }

    /// Complex-bilinear extension `B^c`.
    pub fn killing_form_c(&self, x: &CVec, y: &CVec) -> C64 {
        let d = self.dim();
        let mut s = ZERO;
        for a in 0..d {
            if x[a] == ZERO {
                continue;
            }
            for b in 0..d {
                s += x[a] * y[b] * self.killing_gram[(a, b)];
            }
        }
        s
    }

    /// Killing form through explicit `trace(ad x ∘ ad y)`.
    pub fn killing_form_trace(&self, x: &RVec, y: &RVec) -> f64 {
        (self.ad_matrix(x) * self.ad_matrix(y)).trace()
    }

    /// Max over basis triples of the Jacobi-identity residual.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim();
        let e = |i: usize| RVec::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let (a, b, cc) = (e(i), e(j), e(k));
                    let r = self.bracket(&a, &self.bracket(&b, &cc))
                        + self.bracket(&b, &self.bracket(&cc, &a))
                        + self.bracket(&cc, &self.bracket(&a, &b));
                    worst = worst.max(r.amax());
                }
            }
        }
        worst
    }

    /// `g^c` as a real algebra with basis `{b_i} ∪ {i b_i}`.
    pub fn complexification(&self) -> Result<LieAlgebra> {
        if self.complexified {
            return Err(Error::Precondition("algebra is already a complexification".into()));
        }
        let d = self.dim();
        let mut basis = self.basis.clone();
        basis.extend(self.basis.iter().map(|b| b * c(0.0, 1.0)));
        let mut alg = LieAlgebra::with_tolerance(basis, self.tol)?;
        let mut conj = RMat::identity(2 * d, 2 * d);
        for i in d..2 * d {
            conj[(i, i)] = -1.0;
        }
        alg.complexified = true;
        alg.conjugation = Some(conj);
        alg.complex_structure = Some(crate::linalg::real_complex_structure(d));
        Ok(alg)
    }

    /// Ratio `B(X, Y) / tr(XY)` when the Killing form is a multiple of the
    /// trace form of the matrix representation (simple algebras).
    pub fn trace_form_ratio(&self) -> Option<f64> {
        let d = self.dim();
        let mut num = 0.0;
        let mut den = 0.0;
        let mut trace_gram = RMat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let t = (&self.basis[a] * &self.basis[b]).trace();
                trace_gram[(a, b)] = t.re;
                num += t.re * self.killing_gram[(a, b)];
                den += t.re * t.re;
            }
        }
        if den == 0.0 {
            return None;
        }
        let ratio = num / den;
        let resid = (&self.killing_gram - &trace_gram * ratio).amax();
        if resid <= 1e-9 * self.killing_gram.amax().max(1.0) {
            Some(ratio)
        } else {
            None
        }
    }
}

/// Result of [`subspace_predicates`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceReport {
    pub is_lie_triple: bool,
    pub is_abelian: bool,
    pub triple_residual: f64,
    pub abelian_residual: f64,
}

/// Lie-triple-system and abelian-subspace tests for the real span of the
/// given coefficient vectors.
pub fn subspace_predicates(alg: &LieAlgebra, span: &[RVec]) -> Result<SubspaceReport> {
    subspace_predicates_tol(alg, span, alg.tolerance())
}

pub fn subspace_predicates_tol(alg: &LieAlgebra, span: &[RVec], tol: f64) -> Result<SubspaceReport> {
    if span.is_empty() {
        return Err(Error::Precondition("empty spanning list".into()));
    }
    let vecs: Vec<RVec> = span.iter().map(|v| v / v.norm().max(1e-300)).collect();
    let m = RMat::from_columns(&vecs);
    if rank_real(&m, 1e-10) < vecs.len() {
        return Err(Error::Precondition("spanning list is linearly dependent".into()));
    }
    let proj_inv = left_inverse_real(&m)?;
    let mut triple = 0.0f64;
    let mut abelian = 0.0f64;
    for (i, a) in vecs.iter().enumerate() {
        for (j, b) in vecs.iter().enumerate() {
            let ab = alg.bracket(a, b);
            if j > i {
                abelian = abelian.max(ab.amax());
            }
            for cc in &vecs {
                let t = alg.bracket(&ab, cc);
                let back = &m * (&proj_inv * &t);
                triple = triple.max((t - back).amax());
            }
        }
    }
    Ok(SubspaceReport {
        is_lie_triple: triple <= tol,
        is_abelian: abelian <= tol,
        triple_residual: triple,
        abelian_residual: abelian,
    })
}

/// Eigenspace split of an involution: `k = ker(θ - 1)`, `p = ker(θ + 1)`.
///
/// Returned bases are columns of coefficient vectors, orthogonalized with
/// respect to the Killing form and normalized so that `|B(e_i, e_i)| = 1`
/// wherever `B` is nondegenerate on the block.
pub fn canonical_decomposition(alg: &LieAlgebra, theta: &RMat) -> Result<(RMat, RMat)> {
    let d = alg.dim();
    if theta.shape() != (d, d) {
        return Err(Error::InvalidInvolution {
            reason: format!("theta has shape {:?}, expected ({d}, {d})", theta.shape()),
            residual: f64::INFINITY,
        });
    }
    let id = RMat::identity(d, d);
    let inv_res = (theta * theta - &id).amax();
    if inv_res > 1e-12 {
        return Err(Error::InvalidInvolution {
            reason: "theta∘theta != id".into(),
            residual: inv_res,
        });
    }
    let mut aut_res = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let ei = RVec::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
            let ej = RVec::from_fn(d, |k, _| if k == j { 1.0 } else { 0.0 });
            let lhs = theta * alg.bracket(&ei, &ej);
            let rhs = alg.bracket(&(theta * &ei), &(theta * &ej));
            aut_res = aut_res.max((lhs - rhs).amax());
        }
    }
    if aut_res > alg.tolerance() {
        return Err(Error::InvalidInvolution {
            reason: "theta is not an algebra automorphism".into(),
            residual: aut_res,
        });
    }
    let k = killing_orthogonalize(alg, &null_space_real(&(theta - &id), 1e-10));
    let p = killing_orthogonalize(alg, &null_space_real(&(theta + &id), 1e-10));
    if p.ncols() == 0 {
        return Err(Error::InvalidInvolution {
            reason: "p = ker(theta + id) is zero; no symmetric space".into(),
            residual: 0.0,
        });
    }
    Ok((k, p))
}

fn killing_orthogonalize(alg: &LieAlgebra, basis: &RMat) -> RMat {
    if basis.ncols() == 0 {
        return basis.clone();
    }
    let gram = basis.transpose() * alg.killing_gram() * basis;
    let eig = SymmetricEigen::new(gram);
    let mut out = basis * &eig.eigenvectors;
    for j in 0..out.ncols() {
        let lam = eig.eigenvalues[j].abs();
        if lam > 1e-10 {
            out.column_mut(j).unscale_mut(lam.sqrt());
        }
        // deterministic orientation: first significant entry positive
        let col = out.column(j).clone_owned();
        if let Some(x) = col.iter().find(|x| x.abs() > 1e-12) {
            if *x < 0.0 {
                out.column_mut(j).neg_mut();
            }
        }
    }
    out
}

/// A semisimple symmetric pair `(G, K)` given by matrix data.
///
/// `conjugator` is the matrix `S` with `θ(X) = S X S^-1`; it extends the
/// involution holomorphically to the group and gives the Cartan embedding
/// `a K^c -> a S a^-1`.
#[derive(Debug, Clone)]
pub struct SymmetricPair {
    name: String,
    algebra: LieAlgebra,
    theta: RMat,
    conjugator: CMat,
    conjugator_inv: CMat,
    metric_sign: f64,
    k_basis: RMat,
    p_basis: RMat,
    p_coords: RMat,
}

impl SymmetricPair {
    pub fn new(
        name: impl Into<String>,
        algebra: LieAlgebra,
        theta: RMat,
        conjugator: CMat,
        metric_sign: i8,
    ) -> Result<Self> {
        if metric_sign != 1 && metric_sign != -1 {
            return Err(Error::InvalidAlgebra(format!("metric sign must be ±1, got {metric_sign}")));
        }
        let (k_basis, p_basis) = canonical_decomposition(&algebra, &theta)?;
        let conjugator_inv = conjugator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidAlgebra("conjugator is singular".into()))?;
        let d = algebra.dim();
        let mut conj_res = 0.0f64;
        for i in 0..d {
            let lhs = &conjugator * &algebra.basis()[i] * &conjugator_inv;
            let ei = RVec::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
            let rhs = algebra.element_matrix(&(&theta * ei));
            conj_res = conj_res.max(max_abs(&(lhs - rhs)));
        }
        if conj_res > 1e-10 {
            return Err(Error::InvalidInvolution {
                reason: "conjugator does not implement theta on matrices".into(),
                residual: conj_res,
            });
        }
        let p_coords = left_inverse_real(&p_basis)?;
        let pair = SymmetricPair {
            name: name.into(),
            algebra,
            theta,
            conjugator,
            conjugator_inv,
            metric_sign: metric_sign as f64,
            k_basis,
            p_basis,
            p_coords,
        };
        let res = pair.bracket_inclusion_residual();
        if res > pair.algebra.tolerance() {
            return Err(Error::InvalidInvolution {
                reason: "bracket relations [k,k]⊂k, [k,p]⊂p, [p,p]⊂k fail".into(),
                residual: res,
            });
        }
        let gram = pair.p_basis.transpose() * pair.algebra.killing_gram() * &pair.p_basis;
        let smin = gram.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        if smin <= 1e-8 {
            return Err(Error::InvalidAlgebra(format!(
                "Killing form degenerate on p (smallest singular value {smin:.3e})"
            )));
        }
        Ok(pair)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn theta(&self) -> &RMat {
        &self.theta
    }

    pub fn conjugator(&self) -> &CMat {
        &self.conjugator
    }

    pub fn conjugator_inv(&self) -> &CMat {
        &self.conjugator_inv
    }

    pub fn metric_sign(&self) -> f64 {
        self.metric_sign
    }

    /// Basis of `k` as columns of coefficient vectors.
    pub fn k_basis(&self) -> &RMat {
        &self.k_basis
    }

    /// Basis of `p` as columns of coefficient vectors.
    pub fn p_basis(&self) -> &RMat {
        &self.p_basis
    }

    pub fn dim_p(&self) -> usize {
        self.p_basis.ncols()
    }

    /// Projection onto `p` along `k`: `(1 - θ)/2`.
    pub fn project_p(&self, x: &CVec) -> CVec {
        let tx = crate::linalg::to_complex(&self.theta) * x;
        (x - tx) * c(0.5, 0.0)
    }

    pub fn project_k(&self, x: &CVec) -> CVec {
        let tx = crate::linalg::to_complex(&self.theta) * x;
        (x + tx) * c(0.5, 0.0)
    }

    /// Coordinates of an element of `p^c` in the `p` basis.
    pub fn p_coords(&self, x: &CVec) -> CVec {
        crate::linalg::to_complex(&self.p_coords) * x
    }

    /// Element of `g^c` from `p`-basis coordinates.
    pub fn from_p_coords(&self, y: &CVec) -> CVec {
        crate::linalg::to_complex(&self.p_basis) * y
    }

    /// Matrix (in `p` coordinates) of `ad(x)^2` restricted to `p^c`, for `x ∈ p^c`.
    pub fn ad_squared_on_p(&self, x: &CVec) -> CMat {
        let ad = self.algebra.ad_matrix_c(x);
        let pb = crate::linalg::to_complex(&self.p_basis);
        let pc = crate::linalg::to_complex(&self.p_coords);
        pc * (&ad * &ad) * pb
    }

    /// Max projection residual of the bracket relations of the canonical
    /// decomposition over basis pairs.
    pub fn bracket_inclusion_residual(&self) -> f64 {
        let d = self.algebra.dim();
        let id = RMat::identity(d, d);
        let pk = (&id + &self.theta) * 0.5;
        let pp = (&id - &self.theta) * 0.5;
        let cols = |m: &RMat| (0..m.ncols()).map(|j| m.column(j).clone_owned()).collect::<Vec<_>>();
        let ks = cols(&self.k_basis);
        let ps = cols(&self.p_basis);
        let mut worst = 0.0f64;
        for a in &ks {
            for b in &ks {
                worst = worst.max((&pp * self.algebra.bracket(a, b)).amax());
            }
            for b in &ps {
                worst = worst.max((&pk * self.algebra.bracket(a, b)).amax());
            }
        }
        for a in &ps {
            for b in &ps {
                worst = worst.max((&pp * self.algebra.bracket(a, b)).amax());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn e(d: usize, i: usize) -> RVec {
        RVec::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn sl2_brackets_match_direct_matrix_arithmetic() {
        let pair = catalog::sl2();
        let alg = pair.algebra();
        // basis order (E, F, H)
        let h = e(3, 2);
        let ee = e(3, 0);
        let br = alg.bracket(&h, &ee);
        assert!((br - &ee * 2.0).amax() < 1e-14);
        let (bm, res) = alg.bracket_via_matrices(&h, &ee);
        assert!(res < 1e-14);
        assert!((bm - ee * 2.0).amax() < 1e-14);
        assert!(alg.bracket(&h, &h).amax() == 0.0);
    }

    #[test]
    fn so3_bracket_l1_l2_is_l3() {
        let pair = catalog::so3();
        let alg = pair.algebra();
        let br = alg.bracket(&e(3, 0), &e(3, 1));
        assert!((br - e(3, 2)).amax() < 1e-14);
    }

    #[test]
    fn sl2_killing_and_ad() {
        let pair = catalog::sl2();
        let alg = pair.algebra();
        let h = e(3, 2);
        assert!((alg.killing_form(&h, &h) - 8.0).abs() < 1e-12);
        let ad = alg.ad_matrix(&h);
        let expect = RMat::from_diagonal(&RVec::from_vec(vec![2.0, -2.0, 0.0]));
        assert!((ad - expect).amax() < 1e-14);
        assert!(alg.ad_matrix(&RVec::zeros(3)).amax() == 0.0);
    }

    #[test]
    fn killing_two_paths_agree_on_catalog() {
        for pair in catalog::all_pairs() {
            let alg = pair.algebra();
            let d = alg.dim();
            for i in 0..d {
                for j in 0..d {
                    let a = alg.killing_form(&e(d, i), &e(d, j));
                    let b = alg.killing_form_trace(&e(d, i), &e(d, j));
                    assert!((a - b).abs() < 1e-12, "{}: {a} vs {b}", pair.name());
                }
                assert!(alg.ad_matrix(&e(d, i)).trace().abs() < 1e-12);
            }
            assert!(alg.jacobi_residual() <= 1e-10);
        }
    }

    #[test]
    fn k_and_p_are_killing_orthogonal_and_theta_is_isometry() {
        for pair in catalog::all_pairs() {
            let alg = pair.algebra();
            let cross = pair.k_basis().transpose() * alg.killing_gram() * pair.p_basis();
            assert!(cross.amax() < 1e-10, "{}", pair.name());
            let t = pair.theta();
            let iso = t.transpose() * alg.killing_gram() * t - alg.killing_gram();
            assert!(iso.amax() < 1e-10);
            assert_eq!(pair.k_basis().ncols() + pair.p_basis().ncols(), alg.dim());
        }
    }

    #[test]
    fn sl2_decomposition_spans() {
        let pair = catalog::sl2();
        // k = span{E - F}, p = span{H, E + F}
        let k = pair.k_basis();
        assert_eq!(k.ncols(), 1);
        let kv = k.column(0);
        assert!((kv[0] + kv[1]).abs() < 1e-12 && kv[2].abs() < 1e-12);
        let p = pair.p_basis();
        assert_eq!(p.ncols(), 2);
        for j in 0..2 {
            let v = p.column(j);
            assert!((v[0] - v[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_involution_rejected() {
        let pair = catalog::sl2();
        let err = canonical_decomposition(pair.algebra(), &RMat::identity(3, 3));
        assert!(matches!(err, Err(Error::InvalidInvolution { .. })));
        let mut bad = RMat::identity(3, 3);
        bad[(0, 0)] = 2.0;
        assert!(matches!(
            canonical_decomposition(pair.algebra(), &bad),
            Err(Error::InvalidInvolution { .. })
        ));
    }

    #[test]
    fn subspace_predicates_on_catalog() {
        for pair in catalog::all_pairs() {
            let p: Vec<RVec> = (0..pair.dim_p()).map(|j| pair.p_basis().column(j).into()).collect();
            let rep = subspace_predicates(pair.algebra(), &p).unwrap();
            assert!(rep.is_lie_triple, "{} residual {}", pair.name(), rep.triple_residual);
            // sqrt(-1) p inside the realified complexification
            let gc = pair.algebra().complexification().unwrap();
            let d = pair.algebra().dim();
            let ip: Vec<RVec> = p
                .iter()
                .map(|v| RVec::from_fn(2 * d, |k, _| if k >= d { v[k - d] } else { 0.0 }))
                .collect();
            assert!(subspace_predicates(&gc, &ip).unwrap().is_lie_triple);
            let one = subspace_predicates(pair.algebra(), &p[..1]).unwrap();
            assert!(one.is_abelian);
        }
        let pair = catalog::sl2();
        let dup = vec![e(3, 0), e(3, 0)];
        assert!(subspace_predicates(pair.algebra(), &dup).is_err());
    }

    #[test]
    fn complexification_killing_is_twice_real_part() {
        let pair = catalog::so21();
        let alg = pair.algebra();
        let gc = alg.complexification().unwrap();
        let d = alg.dim();
        let x = CVec::from_fn(d, |i, _| c(0.3 * i as f64 - 0.2, 0.1 + 0.4 * i as f64));
        let y = CVec::from_fn(d, |i, _| c(0.5 - 0.2 * i as f64, -0.3 * i as f64));
        let bc = alg.killing_form_c(&x, &y);
        let real = gc.killing_form(&crate::linalg::realify_vec(&x), &crate::linalg::realify_vec(&y));
        assert!((real - 2.0 * bc.re).abs() < 1e-12);
        assert!(gc.is_complexified());
        let j = gc.complex_structure().unwrap();
        assert!((j * j + RMat::identity(2 * d, 2 * d)).amax() == 0.0);
    }

    #[test]
    fn non_closed_basis_rejected() {
        let e12 = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        let e21 = e12.transpose();
        assert!(LieAlgebra::new(vec![e12, e21]).is_err());
    }
}
