//! Pseudo-Riemannian symmetric spaces `G/K` and their anti-Kaehler
//! complexifications `G^c/K^c`.
//!
//! A point is a coset `b K^c` stored through a representative `b` and its
//! Cartan image `b S b^-1`, where `S` implements the involution. A tangent
//! vector at `b K^c` is an element `ξ` of `p^c` (complex coefficients in the
//! algebra basis) and stands for `d/dt b exp(tξ) K^c`. Changing the
//! representative to `b k` changes the coordinates to `Ad(k^-1) ξ`.
//!
//! Curvature follows `R(X, Y)Z = −[[X, Y], Z]`, so that the Jacobi operator
//! is `R(·, v)v = −ad(v)^2`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::SymmetricPair;
use crate::linalg::{
    c, cosh_sinhc_sqrt, expm, logm, max_abs, max_abs_vec, realify, to_complex, to_complex_vec, CMat, CVec, RMat, C64, I,
};

/// Tolerance for "same point" comparisons of Cartan images.
pub const POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SymmetricSpace {
    pair: SymmetricPair,
    complexified: bool,
    trace_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SpacePoint {
    rep: CMat,
    cartan: CMat,
}

impl SpacePoint {
    pub fn rep(&self) -> &CMat {
        &self.rep
    }

    /// Cartan image `rep · S · rep^-1`.
    pub fn cartan_image(&self) -> &CMat {
        &self.cartan
    }

    /// Max-abs distance between Cartan images, relative to their size.
    pub fn distance(&self, other: &SpacePoint) -> f64 {
        max_abs(&(&self.cartan - &other.cartan)) / max_abs(&self.cartan).max(1.0)
    }

    pub fn approx_eq(&self, other: &SpacePoint, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

#[derive(Debug, Clone)]
pub struct TangentVector {
    base: SpacePoint,
    xi: CVec,
}

impl TangentVector {
    pub fn base(&self) -> &SpacePoint {
        &self.base
    }

    /// Coordinates in `p^c` relative to the base representative.
    pub fn xi(&self) -> &CVec {
        &self.xi
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        TangentVector { base: self.base.clone(), xi: &self.xi * c(s, 0.0) }
    }

    pub fn scale_c(&self, s: C64) -> TangentVector {
        TangentVector { base: self.base.clone(), xi: &self.xi * s }
    }

    pub fn add(&self, other: &TangentVector) -> TangentVector {
        TangentVector { base: self.base.clone(), xi: &self.xi + &other.xi }
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().all(|z| *z == c(0.0, 0.0))
    }
}

/// The complex geodesic `z -> exp_p((Re z) v + (Im z) J v)`.
#[derive(Debug, Clone)]
pub struct ComplexGeodesic {
    base: SpacePoint,
    v: TangentVector,
    /// Matrix of `v` in the base frame, cached for evaluation.
    v_matrix: CMat,
}

impl ComplexGeodesic {
    pub fn base(&self) -> &SpacePoint {
        &self.base
    }

    pub fn direction(&self) -> &TangentVector {
        &self.v
    }

    /// Representative of `γ(z)` in the frame used by transvection transport.
    pub fn rep_at(&self, z: C64) -> Result<CMat> {
        Ok(self.base.rep() * expm(&(&self.v_matrix * z))?)
    }
}

/// Linear map between tangent spaces produced by parallel transport, in the
/// frames of `from.rep()` and `to.rep()`.
#[derive(Debug, Clone)]
pub struct Transport {
    pub from: SpacePoint,
    pub to: SpacePoint,
    /// Complex `m × m` matrix in `p`-basis coordinates (complex-linear).
    pub matrix: CMat,
}

impl Transport {
    /// Real-linear matrix on realified `p^c` coordinates.
    pub fn real_matrix(&self) -> RMat {
        realify(&self.matrix)
    }
}

impl SymmetricSpace {
    pub fn real(pair: SymmetricPair) -> Self {
        let trace_ratio = pair.algebra().trace_form_ratio();
        SymmetricSpace { pair, complexified: false, trace_ratio }
    }

    pub fn complexified(pair: SymmetricPair) -> Self {
        let trace_ratio = pair.algebra().trace_form_ratio();
        SymmetricSpace { pair, complexified: true, trace_ratio }
    }

    pub fn name(&self) -> String {
        if self.complexified {
            format!("{}c", self.pair.name())
        } else {
            self.pair.name().to_string()
        }
    }

    pub fn pair(&self) -> &SymmetricPair {
        &self.pair
    }

    pub fn is_complexified(&self) -> bool {
        self.complexified
    }

    /// The same pair viewed as the complexification (or its real form).
    pub fn complexification(&self) -> SymmetricSpace {
        SymmetricSpace::complexified(self.pair.clone())
    }

    pub fn real_form(&self) -> SymmetricSpace {
        SymmetricSpace::real(self.pair.clone())
    }

    /// Complex dimension of `p^c` (= real dimension of `G/K`).
    pub fn dim_p(&self) -> usize {
        self.pair.dim_p()
    }

    /// Real dimension of the manifold.
    pub fn real_dim(&self) -> usize {
        if self.complexified {
            2 * self.dim_p()
        } else {
            self.dim_p()
        }
    }

    pub fn point(&self, rep: CMat) -> Result<SpacePoint> {
        let inv = rep
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Precondition("point representative is singular".into()))?;
        let cartan = &rep * self.pair.conjugator() * inv;
        Ok(SpacePoint { rep, cartan })
    }

    /// The base point `e K^c`.
    pub fn origin(&self) -> SpacePoint {
        let n = self.pair.algebra().matrix_size();
        self.point(CMat::identity(n, n)).expect("identity is invertible")
    }

    pub fn same_point(&self, p: &SpacePoint, q: &SpacePoint) -> bool {
        p.approx_eq(q, POINT_TOL)
    }

    /// Tangent vector with coordinates `xi` (algebra coefficients in `p^c`).
    pub fn tangent(&self, base: &SpacePoint, xi: CVec) -> Result<TangentVector> {
        let d = self.pair.algebra().dim();
        if xi.len() != d {
            return Err(Error::Precondition(format!("tangent coordinates must have length {d}")));
        }
        let kpart = max_abs_vec(&self.pair.project_k(&xi));
        if kpart > 1e-10 * max_abs_vec(&xi).max(1.0) {
            return Err(Error::Precondition(format!("tangent vector has k-component {kpart:.3e}")));
        }
        if !self.complexified && xi.iter().any(|z| z.im.abs() > 1e-14 * z.norm().max(1.0)) {
            return Err(Error::Precondition("complex tangent vector on a real space".into()));
        }
        Ok(TangentVector { base: base.clone(), xi })
    }

    /// Tangent vector from coordinates in the `p` basis.
    pub fn tangent_from_p(&self, base: &SpacePoint, coords: &CVec) -> Result<TangentVector> {
        self.tangent(base, self.pair.from_p_coords(coords))
    }

    pub fn p_coords(&self, v: &TangentVector) -> CVec {
        self.pair.p_coords(&v.xi)
    }

    fn check_same_base(&self, x: &TangentVector, y: &TangentVector) -> Result<()> {
        if x.base.rep != y.base.rep && !self.same_point(&x.base, &y.base) {
            return Err(Error::Precondition("tangent vectors at different base points".into()));
        }
        if x.base.rep != y.base.rep {
            return Err(Error::Precondition(
                "tangent vectors in different frames; re-express with `in_frame` first".into(),
            ));
        }
        Ok(())
    }

    /// Complex-bilinear holomorphic metric `sign · B^c`.
    pub fn holomorphic_metric(&self, x: &TangentVector, y: &TangentVector) -> Result<C64> {
        self.check_same_base(x, y)?;
        Ok(self.pair.algebra().killing_form_c(&x.xi, &y.xi) * self.pair.metric_sign())
    }

    /// `sign · B` on `G/K`, `sign · 2 Re B^c` on `G^c/K^c`.
    pub fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        let h = self.holomorphic_metric(x, y)?;
        Ok(if self.complexified { 2.0 * h.re } else { h.re })
    }

    pub fn complex_structure(&self, x: &TangentVector) -> Result<TangentVector> {
        if !self.complexified {
            return Err(Error::Precondition("complex structure requires a complexified space".into()));
        }
        Ok(TangentVector { base: x.base.clone(), xi: &x.xi * I })
    }

    pub fn curvature(&self, x: &TangentVector, y: &TangentVector, z: &TangentVector) -> Result<TangentVector> {
        self.check_same_base(x, y)?;
        self.check_same_base(x, z)?;
        let alg = self.pair.algebra();
        let xy = alg.bracket_c(&x.xi, &y.xi);
        let r = -alg.bracket_c(&xy, &z.xi);
        Ok(TangentVector { base: x.base.clone(), xi: r })
    }

    pub fn sectional_curvature(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        let r = self.curvature(x, y, y)?;
        let num = self.metric(&r, x)?;
        let den = self.metric(x, x)? * self.metric(y, y)? - self.metric(x, y)?.powi(2);
        if den.abs() < 1e-14 {
            return Err(Error::Degenerate("degenerate 2-plane".into()));
        }
        Ok(num / den)
    }

    /// `exp_p(v) = b exp(ξ) K^c` with `v = b_* ξ`.
    pub fn exp_point(&self, p: &SpacePoint, v: &TangentVector) -> Result<SpacePoint> {
        if !self.same_point(p, &v.base) {
            return Err(Error::Precondition("tangent vector is not based at p".into()));
        }
        let m = self.pair.algebra().element_matrix_c(&v.xi);
        self.point(v.base.rep() * expm(&m)?)
    }

    pub fn exp(&self, v: &TangentVector) -> Result<SpacePoint> {
        self.exp_point(&v.base, v)
    }

    /// Geodesic `t -> exp_p(t v)`.
    pub fn geodesic_point(&self, v: &TangentVector, t: f64) -> Result<SpacePoint> {
        self.exp(&v.scale(t))
    }

    pub fn complex_geodesic(&self, p: &SpacePoint, v: &TangentVector) -> Result<ComplexGeodesic> {
        if !self.complexified {
            return Err(Error::Precondition("complex geodesics live in a complexified space".into()));
        }
        if !self.same_point(p, &v.base) {
            return Err(Error::Precondition("tangent vector is not based at p".into()));
        }
        Ok(ComplexGeodesic {
            base: v.base.clone(),
            v: v.clone(),
            v_matrix: self.pair.algebra().element_matrix_c(&v.xi),
        })
    }

    /// `γ^c(z) = exp_p((Re z) v + (Im z) J v)`.
    pub fn complex_geodesic_eval(&self, geo: &ComplexGeodesic, z: C64) -> Result<SpacePoint> {
        let jv = self.complex_structure(&geo.v)?;
        let w = geo.v.scale(z.re).add(&jv.scale(z.im));
        self.exp_point(&geo.base, &w)
    }

    /// Left action of a group element on points.
    pub fn act(&self, g: &CMat, p: &SpacePoint) -> Result<SpacePoint> {
        self.point(g * p.rep())
    }

    /// Differential of the left action: same coordinates in the moved frame.
    pub fn act_tangent(&self, g: &CMat, v: &TangentVector) -> Result<TangentVector> {
        Ok(TangentVector { base: self.act(g, &v.base)?, xi: v.xi.clone() })
    }

    /// Isotropy element `k = new_rep^-1 · old_rep` relating two representatives.
    fn isotropy_between(&self, old: &CMat, new: &CMat) -> Result<CMat> {
        let inv = new
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Precondition("singular representative".into()))?;
        let k = inv * old;
        let s = self.pair.conjugator();
        let res = max_abs(&(&k * s - s * &k)) / max_abs(&k).max(1.0);
        if res > 1e-8 {
            return Err(Error::Precondition(format!(
                "representatives do not define the same point (isotropy residual {res:.3e})"
            )));
        }
        Ok(k)
    }

    /// `Ad(k)` restricted to `p^c`, as a complex matrix in `p` coordinates.
    pub fn isotropy_action(&self, k: &CMat) -> Result<CMat> {
        let m = self.dim_p();
        let kinv = k
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular isotropy element".into()))?;
        let alg = self.pair.algebra();
        let mut out = CMat::zeros(m, m);
        for j in 0..m {
            let e = CVec::from_fn(m, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
            let x = alg.element_matrix_c(&self.pair.from_p_coords(&e));
            let (coeff, _) = alg.expand_c(&(k * x * &kinv))?;
            out.set_column(j, &self.pair.p_coords(&coeff));
        }
        Ok(out)
    }

    /// Re-express a tangent vector in the frame of another representative
    /// of the same point.
    pub fn in_frame(&self, v: &TangentVector, new_rep: &CMat) -> Result<TangentVector> {
        // b_* ξ = (b k^-1)_* ... with b' = b k  =>  ξ' = Ad(k^-1) ξ
        let k_old_to_new = self.isotropy_between(new_rep, v.base.rep())?; // = b^-1 b'
        let kinv = k_old_to_new
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular isotropy element".into()))?;
        let ad = self.isotropy_action(&kinv)?;
        let coords = ad * self.pair.p_coords(&v.xi);
        let base = self.point(new_rep.clone())?;
        Ok(TangentVector { base, xi: self.pair.from_p_coords(&coords) })
    }

    /// Parallel transport along `t -> exp_p(t v)` from `t0` to `t1`, as the
    /// differential of the transvection `a exp((t1 − t0)ξ) a^-1`.
    pub fn parallel_transport(&self, v: &TangentVector, t0: f64, t1: f64) -> Result<Transport> {
        let a = v.base.rep();
        let xm = self.pair.algebra().element_matrix_c(&v.xi);
        let r0 = a * expm(&(&xm * c(t0, 0.0)))?;
        let r1 = a * expm(&(&xm * c(t1, 0.0)))?;
        let a_inv = a.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
        let tau = a * expm(&(&xm * c(t1 - t0, 0.0)))? * a_inv;
        let k = self.isotropy_between(&(&tau * &r0), &r1)?; // r1^-1 τ r0
        let matrix = self.isotropy_action(&k)?;
        Ok(Transport { from: self.point(r0)?, to: self.point(r1)?, matrix })
    }

    /// Parallel transport along an arbitrary curve given by a lift `a(u)`,
    /// `u ∈ [0, 1]`, with derivative `a'(u)`. Solves `y' + [κ, y] = 0`
    /// where `κ` is the `k^c`-part of `a^-1 a'`, by classical RK4.
    ///
    /// `frame` holds `p`-coordinates (columns) at `a(0)`; the result is in the
    /// frame of `a(1)`.
    pub fn parallel_transport_along_lift<F>(&self, lift: F, frame: &CMat, steps: usize) -> Result<CMat>
    where
        F: Fn(f64) -> Result<(CMat, CMat)>,
    {
        let steps = steps.max(1);
        let h = 1.0 / steps as f64;
        let pk = |u: f64| -> Result<CMat> {
            let (a, da) = lift(u)?;
            let ainv = a.try_inverse().ok_or_else(|| Error::Numerical("singular lift".into()))?;
            let (omega, _) = self.pair.algebra().expand_c(&(ainv * da))?;
            let kappa = self.pair.project_k(&omega);
            // -ad(κ) restricted to p, in p coordinates
            let ad = self.pair.algebra().ad_matrix_c(&kappa);
            let pb = to_complex(self.pair.p_basis());
            Ok(-(self.pair_p_coords_matrix() * ad * pb))
        };
        let mut y = frame.clone();
        for s in 0..steps {
            let u = s as f64 * h;
            let m0 = pk(u)?;
            let mh = pk(u + 0.5 * h)?;
            let m1 = pk(u + h)?;
            let k1 = &m0 * &y;
            let k2 = &mh * (&y + &k1 * c(0.5 * h, 0.0));
            let k3 = &mh * (&y + &k2 * c(0.5 * h, 0.0));
            let k4 = &m1 * (&y + &k3 * c(h, 0.0));
            y += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        }
        Ok(y)
    }

    fn pair_p_coords_matrix(&self) -> CMat {
        let m = self.dim_p();
        let d = self.pair.algebra().dim();
        let mut out = CMat::zeros(m, d);
        for j in 0..d {
            let e = CVec::from_fn(d, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
            out.set_column(j, &self.pair.p_coords(&e));
        }
        out
    }

    /// `ad(u)^2|_p` in `p` coordinates.
    pub fn jacobi_operator_matrix(&self, u: &CVec) -> CMat {
        self.pair.ad_squared_on_p(u)
    }

    /// `(d exp_p)_u (x)`, as a tangent vector at `exp_p(u)` in the frame of
    /// `rep(p) · exp(u)`: the `p`-part of the left-trivialized derivative of
    /// `exp`, which is `sinh(ad u)/ad u` on `p`.
    pub fn exp_differential(&self, u: &TangentVector, x: &TangentVector) -> Result<TangentVector> {
        self.check_same_base(u, x)?;
        let a2 = self.jacobi_operator_matrix(&u.xi);
        let (_, sinhc) = cosh_sinhc_sqrt(&a2);
        let coords = sinhc * self.pair.p_coords(&x.xi);
        let q = self.exp(u)?;
        Ok(TangentVector { base: q, xi: self.pair.from_p_coords(&coords) })
    }

    /// Tangent vector of the Cartan embedding: `d/dt C(b exp(tξ)) = b[ξ, S]b^-1`.
    pub fn embed_tangent(&self, v: &TangentVector) -> Result<CMat> {
        let b = v.base.rep();
        let binv = b.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
        let x = self.pair.algebra().element_matrix_c(&v.xi);
        let s = self.pair.conjugator();
        Ok(b * (&x * s - s * &x) * binv)
    }

    /// Inverse of [`embed_tangent`](Self::embed_tangent): recovers `ξ` from a
    /// tangent matrix `dC` at `p`.
    pub fn tangent_from_embedded(&self, p: &SpacePoint, dc: &CMat) -> Result<TangentVector> {
        let b = p.rep();
        let binv = b.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
        let m = binv * dc * b * self.pair.conjugator_inv();
        let (coeff, _) = self.pair.algebra().expand_c(&m)?;
        let xi = self.pair.project_p(&coeff) * c(0.5, 0.0);
        Ok(TangentVector { base: p.clone(), xi })
    }

    /// Metric evaluated on Cartan-embedding tangent matrices at the point
    /// with Cartan image `cartan`, through the trace form.
    pub fn embedded_metric(&self, cartan: &CMat, dc1: &CMat, dc2: &CMat) -> Result<f64> {
        let ratio = self
            .trace_ratio
            .ok_or_else(|| Error::Precondition("Killing form is not a multiple of the trace form".into()))?;
        let cinv = cartan.clone().try_inverse().ok_or_else(|| Error::Numerical("singular image".into()))?;
        let t = (dc1 * &cinv * dc2 * &cinv).trace();
        let h = t * (ratio / 4.0) * self.pair.metric_sign();
        Ok(if self.complexified { 2.0 * h.re } else { h.re })
    }

    /// Logarithm at `p`: the `ξ ∈ p^c` of smallest size with `exp_p(ξ) = q`,
    /// valid near `p`.
    pub fn log_point(&self, p: &SpacePoint, q: &SpacePoint) -> Result<TangentVector> {
        let b = p.rep();
        let binv = b.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
        let m = binv * q.cartan_image() * b * self.pair.conjugator_inv();
        let l = logm(&m)?;
        let (coeff, res) = self.pair.algebra().expand_c(&l)?;
        if res > 1e-8 * max_abs(&l).max(1.0) {
            return Err(Error::Numerical(format!("log does not lie in the algebra (residual {res:.3e})")));
        }
        let xi = self.pair.project_p(&coeff) * c(0.5, 0.0);
        Ok(TangentVector { base: p.clone(), xi })
    }

    /// Random element of `p^c` (or `p` on a real space) with coordinates
    /// uniform in `[-scale, scale]`.
    pub fn random_tangent<R: Rng + ?Sized>(&self, rng: &mut R, base: &SpacePoint, scale: f64) -> TangentVector {
        let m = self.dim_p();
        let coords = CVec::from_fn(m, |_, _| {
            let re = rng.random_range(-scale..=scale);
            let im = if self.complexified { rng.random_range(-scale..=scale) } else { 0.0 };
            c(re, im)
        });
        TangentVector { base: base.clone(), xi: self.pair.from_p_coords(&coords) }
    }

    /// Random point `exp_origin(u)` with `u` from [`random_tangent`](Self::random_tangent).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Result<SpacePoint> {
        let o = self.origin();
        let u = self.random_tangent(rng, &o, scale);
        self.exp(&u)
    }

    /// Random element of the real group `G` (exponential of a random real
    /// algebra element).
    pub fn random_group_element<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Result<CMat> {
        let d = self.pair.algebra().dim();
        let x = CVec::from_fn(d, |_, _| c(rng.random_range(-scale..=scale), 0.0));
        expm(&self.pair.algebra().element_matrix_c(&x))
    }

    /// Random element of `K^c` (or `K`), exponential of a random `k` element.
    pub fn random_isotropy<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Result<CMat> {
        let kb = self.pair.k_basis();
        let mut x = CVec::zeros(self.pair.algebra().dim());
        for j in 0..kb.ncols() {
            let re = rng.random_range(-scale..=scale);
            let im = if self.complexified { rng.random_range(-scale..=scale) } else { 0.0 };
            x += to_complex_vec(&kb.column(j).into_owned()) * c(re, im);
        }
        expm(&self.pair.algebra().element_matrix_c(&x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::to_complex_vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn metric_of_h_in_sl2_is_eight() {
        let s = catalog::space("sl2").unwrap();
        let o = s.origin();
        let h = s.tangent(&o, to_complex_vec(&crate::linalg::RVec::from_vec(vec![0.0, 0.0, 1.0]))).unwrap();
        assert!((s.metric(&h, &h).unwrap() - 8.0).abs() < 1e-12);
        // complexified metric is 2 Re B^c
        let sc = s.complexification();
        let hc = sc.tangent(&o, h.xi().clone()).unwrap();
        assert!((sc.metric(&hc, &hc).unwrap() - 16.0).abs() < 1e-12);
        let jh = sc.complex_structure(&hc).unwrap();
        assert!(sc.metric(&hc, &jh).unwrap().abs() < 1e-15);
    }

    #[test]
    fn j_squares_to_minus_one_and_is_anti_isometric() {
        let s = catalog::space("so3c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.5).unwrap();
        let x = s.random_tangent(&mut r, &p, 1.0);
        let y = s.random_tangent(&mut r, &p, 1.0);
        let jjx = s.complex_structure(&s.complex_structure(&x).unwrap()).unwrap();
        assert!(max_abs_vec(&(jjx.xi() + x.xi())) == 0.0);
        let jx = s.complex_structure(&x).unwrap();
        let jy = s.complex_structure(&y).unwrap();
        let lhs = s.metric(&jx, &jy).unwrap() + s.metric(&x, &y).unwrap();
        assert!(lhs.abs() < 1e-12);
        assert!(s.real_form().complex_structure(&x).is_err());
    }

    #[test]
    fn j_commutes_with_isotropy() {
        let s = catalog::space("sl2c").unwrap();
        let mut r = rng();
        for _ in 0..10 {
            let k = s.random_isotropy(&mut r, 0.7).unwrap();
            let ad = s.isotropy_action(&k).unwrap();
            let m = s.dim_p();
            let j = CMat::identity(m, m) * I;
            let rj = realify(&(&ad * &j)) - realify(&(&j * &ad));
            assert!(rj.amax() < 1e-10);
        }
    }

    #[test]
    fn sphere_sectional_curvature_is_constant_positive() {
        let s = catalog::space("so3").unwrap();
        let mut r = rng();
        let o = s.origin();
        let mut values = Vec::new();
        for _ in 0..20 {
            let x = s.random_tangent(&mut r, &o, 1.0);
            let y = s.random_tangent(&mut r, &o, 1.0);
            values.push(s.sectional_curvature(&x, &y).unwrap());
        }
        // oracle: orthonormal p-basis L1/√2, L2/√2 for g = −B gives
        // g(R(e1,e2)e2, e1) = −B([e1,e2],[e1,e2]) ... evaluated by brute force
        let alg = s.pair().algebra();
        let e1 = crate::linalg::RVec::from_vec(vec![1.0, 0.0, 0.0]) / 2f64.sqrt();
        let e2 = crate::linalg::RVec::from_vec(vec![0.0, 1.0, 0.0]) / 2f64.sqrt();
        let br = alg.bracket(&e1, &e2);
        let oracle = -alg.killing_form(&br, &br);
        assert!(oracle > 0.0);
        for v in values {
            assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
        }
    }

    #[test]
    fn curvature_identities() {
        let s = catalog::space("so21c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.4).unwrap();
        let x = s.random_tangent(&mut r, &p, 1.0);
        let y = s.random_tangent(&mut r, &p, 1.0);
        let z = s.random_tangent(&mut r, &p, 1.0);
        let rxy = s.curvature(&x, &y, &z).unwrap();
        let ryx = s.curvature(&y, &x, &z).unwrap();
        assert!(max_abs_vec(&(rxy.xi() + ryx.xi())) < 1e-12);
        let bianchi = s.curvature(&x, &y, &z).unwrap().xi()
            + s.curvature(&y, &z, &x).unwrap().xi()
            + s.curvature(&z, &x, &y).unwrap().xi();
        assert!(max_abs_vec(&bianchi) < 1e-12);
        let jx = s.complex_structure(&x).unwrap();
        let lhs = s.curvature(&jx, &y, &z).unwrap();
        let rhs = s.complex_structure(&rxy).unwrap();
        assert!(max_abs_vec(&(lhs.xi() - rhs.xi())) < 1e-12);
        // abelian subspace: span of one vector
        let zero = s.curvature(&x, &x.scale(2.0), &x).unwrap();
        assert!(max_abs_vec(zero.xi()) < 1e-14);
    }

    #[test]
    fn exp_basics() {
        let s = catalog::space("sl2c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.5).unwrap();
        let zero = s.tangent(&p, CVec::zeros(3)).unwrap();
        assert!(s.exp_point(&p, &zero).unwrap().approx_eq(&p, 1e-14));
        let v = s.random_tangent(&mut r, &p, 0.8);
        let g = s.random_group_element(&mut r, 0.5).unwrap();
        let lhs = s.exp(&s.act_tangent(&g, &v).unwrap()).unwrap();
        let rhs = s.act(&g, &s.exp(&v).unwrap()).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn so3_geodesic_period_from_matrix_exponential() {
        // unit-speed geodesic on the sphere with metric −B returns at 2π·sqrt(2)
        let s = catalog::space("so3").unwrap();
        let o = s.origin();
        let e1 = s.tangent(&o, CVec::from_vec(vec![c(1.0 / 2f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!((s.metric(&e1, &e1).unwrap() - 1.0).abs() < 1e-14);
        // oracle: exp(t L1) has period 2π; the point exp(tξ)·S·exp(−tξ) = exp(2tξ)S
        // so the point-period in t for ξ = L1/√2 is π·√2; the geodesic closes there
        let period = std::f64::consts::PI * 2f64.sqrt();
        let back = s.geodesic_point(&e1, period).unwrap();
        assert!(back.approx_eq(&o, 1e-12));
        let half = s.geodesic_point(&e1, period / 2.0).unwrap();
        assert!(!half.approx_eq(&o, 1e-3));
    }

    #[test]
    fn isotropy_right_multiplication_keeps_point() {
        let s = catalog::space("so31c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.5).unwrap();
        let k = s.random_isotropy(&mut r, 0.5).unwrap();
        let q = s.point(p.rep() * &k).unwrap();
        assert!(p.approx_eq(&q, 1e-11));
        // frame change preserves the metric
        let v = s.random_tangent(&mut r, &p, 1.0);
        let v2 = s.in_frame(&v, q.rep()).unwrap();
        let a = s.metric(&v, &v).unwrap();
        let b = s.metric(&v2, &v2).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        // both describe the same embedded tangent
        let d = max_abs(&(s.embed_tangent(&v).unwrap() - s.embed_tangent(&v2).unwrap()));
        assert!(d < 1e-10);
    }

    #[test]
    fn transport_properties() {
        let s = catalog::space("sl2c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.5).unwrap();
        let v = s.random_tangent(&mut r, &p, 0.8);
        let t = s.parallel_transport(&v, 0.3, 0.3).unwrap();
        let m = s.dim_p();
        assert!(max_abs(&(&t.matrix - CMat::identity(m, m))) < 1e-12);
        let t = s.parallel_transport(&v, 0.0, 1.3).unwrap();
        // geodesic property: velocity is carried to velocity
        let vel = s.p_coords(&v);
        assert!(max_abs_vec(&(&t.matrix * &vel - &vel)) < 1e-9);
    }

    #[test]
    fn transport_ode_matches_transvection_on_twisted_lift() {
        let s = catalog::space("so3c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.4).unwrap();
        let v = s.random_tangent(&mut r, &p, 0.7);
        let kx = {
            let kb = s.pair().k_basis();
            to_complex_vec(&kb.column(0).into_owned()) * c(0.4, -0.3)
        };
        let km = s.pair().algebra().element_matrix_c(&kx);
        let vm = s.pair().algebra().element_matrix_c(v.xi());
        let a0 = p.rep().clone();
        let lift = |u: f64| -> Result<(CMat, CMat)> {
            let phi = (2.0 * u).sin();
            let dphi = 2.0 * (2.0 * u).cos();
            let g = expm(&(&vm * c(u, 0.0)))?;
            let k = expm(&(&km * c(phi, 0.0)))?;
            let a = &a0 * &g * &k;
            let da = &a0 * &g * (&vm * &k + &km * &k * c(dphi, 0.0));
            Ok((a, da))
        };
        let m = s.dim_p();
        let ode = s.parallel_transport_along_lift(lift, &CMat::identity(m, m), 400).unwrap();
        // express in the transvection frame a0 exp(ξ): coordinates there are Ad(k(1)) y
        let k1 = expm(&(&km * c(2f64.sin(), 0.0))).unwrap();
        let ad = s.isotropy_action(&k1).unwrap();
        let moved = ad * ode;
        let tv = s.parallel_transport(&v, 0.0, 1.0).unwrap();
        assert!(max_abs(&(moved - tv.matrix)) < 1e-9);
    }

    #[test]
    fn exp_differential_matches_finite_differences() {
        let s = catalog::space("sl2c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.4).unwrap();
        let u = s.random_tangent(&mut r, &p, 0.8);
        let x = s.random_tangent(&mut r, &p, 1.0);
        let h = 1e-5;
        let f = |t: f64| s.exp(&u.add(&x.scale(t))).unwrap().cartan_image().clone();
        let dc = (f(h) - f(-h)) / c(2.0 * h, 0.0);
        let d = s.exp_differential(&u, &x).unwrap();
        let dc_exact = s.embed_tangent(&d).unwrap();
        assert!(max_abs(&(dc - dc_exact)) < 1e-8);
        let back = s.tangent_from_embedded(d.base(), &s.embed_tangent(&d).unwrap()).unwrap();
        assert!(max_abs_vec(&(back.xi() - d.xi())) < 1e-11);
    }

    #[test]
    fn log_inverts_exp() {
        let s = catalog::space("so31c").unwrap();
        let mut r = rng();
        let p = s.random_point(&mut r, 0.4).unwrap();
        let v = s.random_tangent(&mut r, &p, 0.3);
        let q = s.exp(&v).unwrap();
        let l = s.log_point(&p, &q).unwrap();
        assert!(max_abs_vec(&(l.xi() - v.xi())) < 1e-10);
    }

    #[test]
    fn embedded_metric_matches_killing_metric() {
        for name in ["sl2c", "so3c", "so21", "so31c"] {
            let s = catalog::space(name).unwrap();
            let mut r = rng();
            let p = s.random_point(&mut r, 0.4).unwrap();
            let x = s.random_tangent(&mut r, &p, 1.0);
            let y = s.random_tangent(&mut r, &p, 1.0);
            let lhs = s
                .embedded_metric(p.cartan_image(), &s.embed_tangent(&x).unwrap(), &s.embed_tangent(&y).unwrap())
                .unwrap();
            let rhs = s.metric(&x, &y).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "{name}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn hyperbolic_complex_geodesic_leaves_real_form() {
        let s = catalog::space("sl2c").unwrap();
        let o = s.origin();
        let v = s.tangent(&o, CVec::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)])).unwrap();
        let geo = s.complex_geodesic(&o, &v).unwrap();
        for &t in &[0.3, -0.7, 1.1] {
            let q = s.complex_geodesic_eval(&geo, c(0.0, t)).unwrap();
            // a real-form point has a real Cartan image (rep in G)
            let imag = q.cartan_image().iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
            assert!(imag > 1e-3);
        }
        let q = s.complex_geodesic_eval(&geo, c(0.8, 0.0)).unwrap();
        assert!(q.approx_eq(&s.geodesic_point(&v, 0.8).unwrap(), 1e-14));
    }

    #[test]
    fn rejects_k_component_and_complex_on_real() {
        let s = catalog::space("sl2").unwrap();
        let o = s.origin();
        // E - F spans k
        assert!(s.tangent(&o, CVec::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])).is_err());
        assert!(s.tangent(&o, CVec::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])).is_err());
    }
}
