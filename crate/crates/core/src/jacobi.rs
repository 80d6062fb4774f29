//! Complex Jacobi fields along complex geodesics of `G^c/K^c`.
//!
//! Vectors of type (1,0) are stored by their `p^c` coordinates: the real
//! vector `X` with coordinates `ξ` corresponds to `X − √−1 JX`. In the frame
//! `b exp(zξ_v)` along `γ(z)`, a complex Jacobi field satisfies
//! `Ŷ'' = ad(v)^2 Ŷ`, hence `Ŷ(z) = co(zv) Y_0 + z si(zv) Y_0'` with
//! `co = cosh(ad)`, `si = sinh(ad)/ad` on `p^c`.

use crate::error::{Error, Result};
use crate::linalg::{
    c, complexify_vec, cosh_sinhc_sqrt, expm, max_abs, max_abs_real, max_abs_vec, realify, realify_vec, CMat, CVec,
    RMat, RVec, C64, I,
};
use crate::space::{ComplexGeodesic, SymmetricSpace, TangentVector};

/// Steps per unit `|z|` for the fixed-step integrators.
pub const STEPS_PER_UNIT: usize = 4096;

/// `co = cos(√−1 ad v)` and `si = sin(√−1 ad v)/(√−1 ad v)` on `p^c`, in `p`
/// coordinates.
#[derive(Debug, Clone)]
pub struct MatrixTrigOps {
    pub v: CVec,
    pub co: CMat,
    pub si: CMat,
}

impl MatrixTrigOps {
    pub fn commutator_residual(&self) -> f64 {
        max_abs(&(&self.co * &self.si - &self.si * &self.co))
    }
}

fn overflow_guard(space: &SymmetricSpace, v: &CVec) -> Result<CMat> {
    let k = space.pair().ad_squared_on_p(&space.pair().from_p_coords(v));
    let size = max_abs(&k).sqrt() * (k.nrows() as f64).sqrt();
    if !size.is_finite() || size > crate::linalg::EXP_NORM_CAP {
        return Err(Error::Overflow(format!("|z|·|ad v| ≈ {size:.3e} exceeds the cap")));
    }
    Ok(k)
}

/// `D̂^co_v`, `D̂^si_v` for `v` given by `p` coordinates.
pub fn d_hat_operators(space: &SymmetricSpace, v: &CVec) -> Result<MatrixTrigOps> {
    let k = overflow_guard(space, v)?;
    let (co, si) = cosh_sinhc_sqrt(&k);
    Ok(MatrixTrigOps { v: v.clone(), co, si })
}

/// Real operators `D^co_{zv}`, `D^si_{zv}` on realified `p^c` together with
/// the largest residual of the bridge identities
/// `D̂_{z v_(1,0)}(X − √−1JX) = D_{zv}(X) − √−1 J D_{zv}(X)`.
#[derive(Debug, Clone)]
pub struct BridgeOps {
    pub co: RMat,
    pub si: RMat,
    pub residual: f64,
}

pub const BRIDGE_TOL: f64 = 1e-10;

/// Builds `D^co_{zv}`, `D^si_{zv}` from the real adjoint action of
/// `w = s v + t Jv` (`z = s + t√−1`) on the realified complexification, and
/// checks them against [`d_hat_operators`] through the complexified
/// `ad^c(z v_(1,0))` acting on `(T_pM)^c ≅ C^{2m}`.
pub fn bridge_real_operators(space: &SymmetricSpace, v: &CVec, z: C64) -> Result<BridgeOps> {
    if !space.is_complexified() {
        return Err(Error::Precondition("bridge operators need a complexified space".into()));
    }
    let pair = space.pair();
    let m = space.dim_p();
    let realified = pair.algebra().complexification()?;
    let p_real = realified_p_basis(space);
    let p_real_inv = crate::linalg::left_inverse_real(&p_real)?;
    let ad_full = |x: &CVec| -> RMat { realified.ad_matrix(&realify_vec(&pair.from_p_coords(x))) };
    // w = s v + t Jv has coordinates z v
    let w = v * z;
    let adw = ad_full(&w);
    let k = &p_real_inv * (&adw * &adw) * &p_real;
    let (co_c, si_c) = cosh_sinhc_sqrt(&crate::linalg::to_complex(&k));
    let co = co_c.map(|x| x.re);
    let si = si_c.map(|x| x.re);

    // route through C^{2m}: ad^c(z v_(1,0)) = z/2 (ad v − √−1 ad(Jv))
    let adv = crate::linalg::to_complex(&ad_full(v));
    let adjv = crate::linalg::to_complex(&ad_full(&(v * I)));
    let a = (adv - adjv * I) * (z * 0.5);
    let pc = crate::linalg::to_complex(&p_real);
    let pc_inv = crate::linalg::to_complex(&p_real_inv);
    let a2 = &pc_inv * (&a * &a) * &pc;
    let (co_10, si_10) = cosh_sinhc_sqrt(&a2);
    // route through the m × m operators
    let hat = d_hat_operators(space, &w)?;

    let jr = crate::linalg::to_complex(&crate::linalg::real_complex_structure(m));
    let scale = max_abs(&hat.co).max(max_abs(&hat.si)).max(1.0);
    let mut residual: f64 = 0.0;
    for j in 0..2 * m {
        let x = RVec::from_fn(2 * m, |i, _| if i == j { 1.0 } else { 0.0 });
        let xc = x.map(|t| c(t, 0.0));
        let z10 = &xc - (&jr * &xc) * I;
        let xi = complexify_vec(&x);
        for (real_op, op_10, op_hat) in [(&co, &co_10, &hat.co), (&si, &si_10, &hat.si)] {
            let dx = (real_op * &x).map(|t| c(t, 0.0));
            let rhs = &dx - (&jr * &dx) * I;
            let lhs = op_10 * &z10;
            let hat_y = op_hat * &xi;
            let hat_10 = to_c2m(&hat_y);
            residual = residual.max(max_abs_vec(&(&lhs - &rhs)) / scale);
            residual = residual.max(max_abs_vec(&(&hat_10 - &rhs)) / scale);
        }
    }
    Ok(BridgeOps { co, si, residual })
}

/// `(1,0)` vector with coordinates `ξ` as an element of `C^{2m}`: `(ξ, −√−1 ξ)`.
pub fn to_c2m(xi: &CVec) -> CVec {
    let m = xi.len();
    CVec::from_fn(2 * m, |i, _| if i < m { xi[i] } else { -I * xi[i - m] })
}

/// Projection `W -> ½(W − √−1 J W)` of `C^{2m}` onto type (1,0), returned in
/// `p` coordinates, with the distance of `W` from the (1,0) subspace.
pub fn project_10(w: &CVec) -> (CVec, f64) {
    let m = w.len() / 2;
    let jr = crate::linalg::to_complex(&crate::linalg::real_complex_structure(m));
    let proj = (w - (&jr * w) * I) * c(0.5, 0.0);
    let xi = CVec::from_fn(m, |i, _| proj[i]);
    (xi, max_abs_vec(&(w - proj)))
}

fn realified_p_basis(space: &SymmetricSpace) -> RMat {
    let m = space.dim_p();
    let pb = crate::linalg::to_complex(space.pair().p_basis());
    let d = pb.nrows();
    let mut out = RMat::zeros(2 * d, 2 * m);
    for j in 0..2 * m {
        let col: CVec = if j < m { pb.column(j).into_owned() } else { pb.column(j - m) * I };
        out.set_column(j, &realify_vec(&col));
    }
    out
}

/// Initial data of a complex Jacobi field: `Y_0` and `∇_{d/dz} Y` at `z = 0`,
/// both of type (1,0), in `p` coordinates of the geodesic's base frame.
#[derive(Debug, Clone)]
pub struct JacobiData {
    pub geodesic: ComplexGeodesic,
    pub y0: CVec,
    pub y0_prime: CVec,
}

impl JacobiData {
    pub fn new(geodesic: ComplexGeodesic, y0: CVec, y0_prime: CVec) -> Result<Self> {
        let m = y0.len();
        if y0_prime.len() != m || geodesic.direction().xi().len() < m {
            return Err(Error::Precondition("Jacobi data dimensions mismatch".into()));
        }
        Ok(JacobiData { geodesic, y0, y0_prime })
    }

    /// From vectors of `(T_pM)^c ≅ C^{2m}`; they must be of type (1,0).
    pub fn from_complexified(geodesic: ComplexGeodesic, w0: &CVec, w0_prime: &CVec) -> Result<Self> {
        let (y0, r0) = project_10(w0);
        let (y1, r1) = project_10(w0_prime);
        let scale = max_abs_vec(w0).max(max_abs_vec(w0_prime)).max(1.0);
        if r0.max(r1) > 1e-12 * scale {
            return Err(Error::Precondition(format!("initial data not of type (1,0) (residual {:.3e})", r0.max(r1))));
        }
        JacobiData::new(geodesic, y0, y1)
    }
}

fn direction_coords(space: &SymmetricSpace, geo: &ComplexGeodesic) -> CVec {
    space.p_coords(geo.direction())
}

/// `Ŷ(z) = co(zv) Y_0 + z si(zv) Y_0'` as a tangent vector at `γ(z)` in the
/// transvection frame `b exp(zξ_v)` (which is the parallel frame along `γ`).
pub fn jacobi_closed_form(space: &SymmetricSpace, data: &JacobiData, z: C64) -> Result<TangentVector> {
    let v = direction_coords(space, &data.geodesic);
    let ops = d_hat_operators(space, &(v * z))?;
    let y = &ops.co * &data.y0 + (&ops.si * &data.y0_prime) * z;
    let base = space.point(data.geodesic.rep_at(z)?)?;
    space.tangent_from_p(&base, &y)
}

/// Result of integrating the real Jacobi equation along a ray.
#[derive(Debug, Clone)]
pub struct JacobiOdeResult {
    /// `(Y_R)_{z0}` in `p` coordinates of the transvection frame at `γ(z0)`.
    pub value: CVec,
    /// Richardson estimate from a half-step-count run.
    pub error_estimate: f64,
    pub steps: usize,
}

/// RK4 for `y'' = K(u) y` on `[0, 1]`.
pub fn integrate_jacobi<F>(op: F, y0: &RVec, y0p: &RVec, steps: usize) -> (RVec, RVec)
where
    F: Fn(f64) -> RMat,
{
    let n = y0.len();
    let steps = steps.max(1);
    let h = 1.0 / steps as f64;
    let mut y = y0.clone();
    let mut p = y0p.clone();
    let _ = n;
    for s in 0..steps {
        let u = s as f64 * h;
        let k0 = op(u);
        let kh = op(u + 0.5 * h);
        let k1m = op(u + h);
        let a1 = p.clone();
        let b1 = &k0 * &y;
        let a2 = &p + &b1 * (0.5 * h);
        let b2 = &kh * (&y + &a1 * (0.5 * h));
        let a3 = &p + &b2 * (0.5 * h);
        let b3 = &kh * (&y + &a2 * (0.5 * h));
        let a4 = &p + &b3 * h;
        let b4 = &k1m * (&y + &a3 * h);
        y += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        p += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (h / 6.0);
    }
    (y, p)
}

/// `(Y_R)_{z0}` from the real Jacobi equation along `u -> γ(u z0)`, whose
/// Jacobi operator in the parallel frame is `realify(ad(z0 ξ_v))^2` built
/// from the real structure constants of the realified algebra.
pub fn jacobi_ode(space: &SymmetricSpace, data: &JacobiData, z0: C64, steps: Option<usize>) -> Result<JacobiOdeResult> {
    let pair = space.pair();
    let realified = pair.algebra().complexification()?;
    let p_real = realified_p_basis(space);
    let p_real_inv = crate::linalg::left_inverse_real(&p_real)?;
    let v = direction_coords(space, &data.geodesic);
    let w = realify_vec(&pair.from_p_coords(&(v * z0)));
    let ad = realified.ad_matrix(&w);
    let k = &p_real_inv * (&ad * &ad) * &p_real;
    let steps = steps.unwrap_or_else(|| ((z0.norm() * STEPS_PER_UNIT as f64).ceil() as usize).max(64));
    let y0 = realify_vec(&data.y0);
    let y0p = realify_vec(&(&data.y0_prime * z0));
    let (y, _) = integrate_jacobi(|_| k.clone(), &y0, &y0p, steps);
    let (y_half, _) = integrate_jacobi(|_| k.clone(), &y0, &y0p, (steps / 2).max(1));
    let err = (&y - &y_half).amax() / 15.0;
    Ok(JacobiOdeResult { value: complexify_vec(&y), error_estimate: err, steps })
}

/// A holomorphic curve in `G^c/K^c` given by a holomorphic lift `a(z)` and
/// its complex derivative `a'(z)`.
pub trait HolomorphicCurve {
    fn lift(&self, z: C64) -> Result<(CMat, CMat)>;
}

/// Complex geodesic with the lift `b exp(zξ) exp(φ(z) κ)`, `φ(z) = amp · sin z`,
/// `κ ∈ k^c`; with `amp = 0` the lift is the transvection frame.
#[derive(Debug, Clone)]
pub struct TwistedGeodesic {
    pub base: CMat,
    pub xi: CMat,
    pub kappa: CMat,
    pub amp: f64,
}

impl HolomorphicCurve for TwistedGeodesic {
    fn lift(&self, z: C64) -> Result<(CMat, CMat)> {
        let g = expm(&(&self.xi * z))?;
        let phi = z.sin() * self.amp;
        let dphi = z.cos() * self.amp;
        let k = expm(&(&self.kappa * phi))?;
        let a = &self.base * &g * &k;
        let da = &self.base * &g * (&self.xi * &k + &self.kappa * &k * dphi);
        Ok((a, da))
    }
}

/// Parallel translation of a (1,0) vector along the real segment from `z0`
/// to `z1` of a holomorphic curve; coordinates in the frames `a(z0)` and
/// `a(z1)`.
pub fn parallel_translate_holo<C: HolomorphicCurve>(
    space: &SymmetricSpace,
    curve: &C,
    z0: C64,
    z1: C64,
    v: &CVec,
    steps: Option<usize>,
) -> Result<CVec> {
    if z0 == z1 {
        return Ok(v.clone());
    }
    let dz = z1 - z0;
    let steps = steps.unwrap_or_else(|| ((dz.norm() * 1024.0).ceil() as usize).max(64));
    let lift = |u: f64| -> Result<(CMat, CMat)> {
        let (a, da) = curve.lift(z0 + dz * u)?;
        Ok((a, da * dz))
    };
    let frame = CMat::from_column_slice(v.len(), 1, v.as_slice());
    let out = space.parallel_transport_along_lift(lift, &frame, steps)?;
    Ok(out.column(0).into_owned())
}

/// Which initial datum of the Jacobi field is free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiKind {
    /// `Y_0 = 0`, `Y_0'` free: zeros are complex conjugate radii.
    Conjugate,
    /// `Y_0` free, `Y_0' = 0`.
    Position,
}

/// Endpoint matrix `Y_0' -> Ŷ(z)` (or `Y_0 -> Ŷ(z)`) restricted to the
/// columns of `sub` (all of `p^c` when `None`).
pub fn endpoint_matrix(space: &SymmetricSpace, v: &CVec, kind: JacobiKind, sub: Option<&CMat>, z: C64) -> Result<CMat> {
    let ops = d_hat_operators(space, &(v * z))?;
    let full = match kind {
        JacobiKind::Conjugate => &ops.si * z,
        JacobiKind::Position => ops.co,
    };
    Ok(match sub {
        None => full,
        Some(t) => {
            let tp = crate::linalg::left_inverse(t)?;
            tp * full * t
        }
    })
}

/// Grid scan for zeros of `det` of the endpoint matrix on the window
/// `|Re z|, |Im z| <= half_width`: local minima of `|det|` on a `grid × grid`
/// lattice, refined by Newton's method on `f/f'` (robust at multiple zeros).
/// Returns distinct zeros sorted by `(Re, Im)`; `z = 0` is excluded for
/// [`JacobiKind::Conjugate`], where the endpoint map vanishes trivially.
pub fn jacobi_zero_scan(
    space: &SymmetricSpace,
    v: &CVec,
    kind: JacobiKind,
    sub: Option<&CMat>,
    half_width: f64,
    grid: usize,
) -> Result<Vec<C64>> {
    let f = |z: C64| -> Result<C64> {
        let m = endpoint_matrix(space, v, kind, sub, z)?;
        let mut d = m.determinant();
        if kind == JacobiKind::Conjugate {
            // divide out the trivial zero at the origin
            d /= z.powu(m.nrows() as u32);
        }
        Ok(d)
    };
    let n = grid.max(8);
    let hstep = 2.0 * half_width / (n - 1) as f64;
    let at = |i: usize, j: usize| c(-half_width + i as f64 * hstep, -half_width + j as f64 * hstep);
    let mut vals = vec![vec![0.0f64; n]; n];
    for (i, row) in vals.iter_mut().enumerate() {
        for (j, val) in row.iter_mut().enumerate() {
            let z = at(i, j);
            *val = if kind == JacobiKind::Conjugate && z.norm() < 1e-12 { f64::INFINITY } else { f(z)?.norm() };
        }
    }
    let mut found: Vec<C64> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v0 = vals[i][j];
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) != (0, 0) && a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n && vals[a as usize][b as usize] < v0 {
                        is_min = false;
                    }
                }
            }
            if !is_min {
                continue;
            }
            let mut z = at(i, j);
            let dh = 1e-6 * half_width.max(1.0);
            let mut converged = false;
            for _ in 0..100 {
                let fz = f(z)?;
                if fz.norm() == 0.0 {
                    converged = true;
                    break;
                }
                let fp = (f(z + dh)? - f(z - dh)?) / (2.0 * dh);
                let fpp = (f(z + dh)? - fz * 2.0 + f(z - dh)?) / (dh * dh);
                // Newton on g = f/f': step = f f' / (f'^2 − f f'')
                let den = fp * fp - fz * fpp;
                if den.norm() == 0.0 {
                    break;
                }
                let step = fz * fp / den;
                z -= step;
                if step.norm() < 1e-14 * z.norm().max(1.0) {
                    converged = true;
                    break;
                }
            }
            let inside = z.re.abs() <= half_width * (1.0 + 1e-12) && z.im.abs() <= half_width * (1.0 + 1e-12);
            let small = f(z)?.norm() <= 1e-8 * f(at(0, 0))?.norm().max(1.0);
            if converged && inside && small && !found.iter().any(|w| (w - z).norm() < 1e-6) {
                found.push(z);
            }
        }
    }
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(found)
}

/// Real operator check: `realify(D̂)` commutes with `J`.
pub fn j_commutator(op: &CMat) -> f64 {
    let m = op.nrows();
    let r = realify(op);
    let j = crate::linalg::real_complex_structure(m);
    max_abs_real(&(&j * &r - &r * &j))
}
