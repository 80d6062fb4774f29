//! Holomorphic extension of real-analytic curves and maps by Taylor
//! continuation.
//!
//! A map `f` enters only through the Taylor coefficients of `t -> f(γ_v(t))`
//! at `t = 0` (see [`AnalyticMap`]); `f^c(v)` is the continuation of that
//! series to `t = i`.

use serde::{Deserialize, Serialize};

use crate::chart::flat_metric;
use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, max_abs_vec, CMat, CVec, RVec, C64, I};
use crate::report::{ordered_max, Report};
use crate::space::{SpacePoint, SymmetricSpace, TangentVector};
use crate::verify::sample_map;

pub const DEFAULT_ORDER: usize = 24;
pub const MAX_ORDER: usize = 384;
pub const RADIUS_SAFETY: f64 = 0.8;

/// Truncated vector-valued Taylor series `Σ a_k (z − center)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticGerm {
    center: f64,
    coeffs: Vec<CVec>,
    radius_estimate: f64,
}

/// Value of a continuation together with its error estimate.
#[derive(Debug, Clone)]
pub struct Extension {
    pub value: CVec,
    pub error: f64,
    pub order: usize,
    pub radius: f64,
}

impl AnalyticGerm {
    pub fn new(center: f64, coeffs: Vec<CVec>) -> Result<Self> {
        let dim = coeffs.first().map_or(0, |a| a.len());
        if coeffs.is_empty() || coeffs.iter().any(|a| a.len() != dim) {
            return Err(Error::Precondition("germ needs coefficients of one common length".into()));
        }
        let radius_estimate = cauchy_hadamard(&coeffs);
        Ok(AnalyticGerm { center, coeffs, radius_estimate })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn coeffs(&self) -> &[CVec] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn radius_estimate(&self) -> f64 {
        self.radius_estimate
    }

    /// Evaluate inside the estimated disc, returning the value and an error
    /// estimate (geometric tail bound plus summation roundoff).
    pub fn eval(&self, z: C64) -> Result<(CVec, f64)> {
        let w = z - c(self.center, 0.0);
        let r = w.norm();
        if r >= self.radius_estimate {
            return Err(Error::Domain { distance: r, radius: self.radius_estimate });
        }
        let dim = self.coeffs[0].len();
        let mut value = CVec::zeros(dim);
        let mut pow = c(1.0, 0.0);
        let mut sizes = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            value += a * pow;
            sizes.push(max_abs_vec(a) * pow.norm());
            pow *= w;
        }
        let tail = geometric_tail(&sizes);
        let total: f64 = sizes.iter().sum();
        let roundoff = 4.0 * self.coeffs.len() as f64 * f64::EPSILON * total;
        Ok((value, tail + roundoff))
    }
}

/// Cauchy–Hadamard estimate over the last half of the nonzero coefficients,
/// scaled by the safety factor; infinite for polynomials.
fn cauchy_hadamard(coeffs: &[CVec]) -> f64 {
    let n = coeffs.len();
    let start = n / 2;
    let mut limsup: f64 = 0.0;
    for (k, a) in coeffs.iter().enumerate().skip(start.max(1)) {
        let s = max_abs_vec(a);
        if s > 0.0 {
            limsup = limsup.max(s.powf(1.0 / k as f64));
        }
    }
    if limsup == 0.0 {
        // all high coefficients vanish: a polynomial (or constant) germ
        f64::INFINITY
    } else {
        RADIUS_SAFETY / limsup
    }
}

/// Tail of `Σ t_k` beyond the last term, assuming the terms keep decaying
/// at the worst ratio seen among the last half of the nonzero terms.
fn geometric_tail(terms: &[f64]) -> f64 {
    let n = terms.len();
    let nz: Vec<(usize, f64)> = terms.iter().copied().enumerate().skip((n / 2).max(1)).filter(|(_, t)| *t > 0.0).collect();
    if nz.is_empty() {
        return 0.0;
    }
    if nz.len() == 1 {
        return if nz[0].0 + 1 < n { 0.0 } else { f64::INFINITY };
    }
    let mut rho: f64 = 0.0;
    for w in nz.windows(2) {
        let (i, ti) = w[0];
        let (j, tj) = w[1];
        rho = rho.max((tj / ti).powf(1.0 / (j - i) as f64));
    }
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    let (last_idx, last) = *nz.last().unwrap();
    // next term sits at least one index after the last nonzero one
    let skip = (n - last_idx) as i32;
    2.0 * last * rho.powi(skip) / (1.0 - rho)
}

/// Continue a germ supplied by a coefficient oracle to `z`, doubling the
/// order from [`DEFAULT_ORDER`] until the error estimate is below `tol`.
pub fn continue_curve<F>(center: f64, oracle: F, z: C64, tol: f64) -> Result<Extension>
where
    F: Fn(usize) -> Result<Vec<CVec>>,
{
    let mut order = DEFAULT_ORDER;
    let mut last_err: Option<Error> = None;
    while order <= MAX_ORDER {
        let germ = AnalyticGerm::new(center, oracle(order)?)?;
        match germ.eval(z) {
            Ok((value, error)) if error <= tol => {
                return Ok(Extension { value, error, order, radius: germ.radius_estimate() });
            }
            Ok((_, error)) => {
                last_err = Some(Error::Precision(format!("tail estimate {error:.3e} above {tol:.1e} at order {order}")))
            }
            Err(e @ Error::Domain { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        order *= 2;
    }
    Err(last_err.unwrap_or_else(|| Error::Precision("continuation failed".into())))
}

/// Evaluate a fixed germ at `z` (domain-checked).
pub fn extend_curve(germ: &AnalyticGerm, z: C64) -> Result<(CVec, f64)> {
    germ.eval(z)
}

/// A real-analytic map given through Taylor coefficients of `f ∘ γ_v`.
pub trait AnalyticMap {
    type Point;
    type Tangent;
    /// First `order` Taylor coefficients at `t = 0` of `t -> f(γ_v(t))`.
    fn curve_coefficients(&self, p: &Self::Point, v: &Self::Tangent, order: usize) -> Result<Vec<CVec>>;
}

/// `f^c(v) = (f ∘ γ_v)^h(√−1)`.
pub fn complexify_map<M: AnalyticMap>(f: &M, p: &M::Point, v: &M::Tangent, tol: f64) -> Result<Extension> {
    continue_curve(0.0, |n| f.curve_coefficients(p, v, n), I, tol)
}

/// Taylor coefficients of `cos(ωt)` and `sin(ωt)`.
fn trig_coefficients(omega: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cs = vec![0.0; order];
    let mut sn = vec![0.0; order];
    let mut term = 1.0; // ω^k / k!
    for k in 0..order {
        if k > 0 {
            term *= omega / k as f64;
        }
        match k % 4 {
            0 => cs[k] = term,
            1 => sn[k] = term,
            2 => cs[k] = -term,
            _ => sn[k] = -term,
        }
    }
    (cs, sn)
}

/// Inclusion of the round sphere `S^n(r) ⊂ R^{n+1}`.
#[derive(Debug, Clone, Copy)]
pub struct SphereInclusion {
    pub radius: f64,
}

impl AnalyticMap for SphereInclusion {
    type Point = RVec;
    type Tangent = RVec;

    fn curve_coefficients(&self, p: &RVec, v: &RVec, order: usize) -> Result<Vec<CVec>> {
        check_sphere_data(self.radius, p, v)?;
        let speed = v.norm();
        let pc = p.map(|x| c(x, 0.0));
        if speed == 0.0 {
            let mut out = vec![CVec::zeros(p.len()); order.max(1)];
            out[0] = pc;
            return Ok(out);
        }
        let dir = v.map(|x| c(self.radius * x / speed, 0.0));
        let (cs, sn) = trig_coefficients(speed / self.radius, order);
        Ok((0..order).map(|k| &pc * c(cs[k], 0.0) + &dir * c(sn[k], 0.0)).collect())
    }
}

fn check_sphere_data(r: f64, p: &RVec, v: &RVec) -> Result<()> {
    if p.len() != v.len() {
        return Err(Error::Precondition("point and tangent dimensions differ".into()));
    }
    let scale = r * r;
    if (p.dot(p) - scale).abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::Precondition("point is not on the sphere".into()));
    }
    if p.dot(v).abs() > 1e-10 * (r * v.norm()).max(1.0) {
        return Err(Error::Precondition("vector is not tangent to the sphere".into()));
    }
    Ok(())
}

/// Closed form `cosh(|v|/r) p + √−1 r sinh(|v|/r) v/|v|` of the complexified
/// sphere inclusion; lands on the quadric `Σ z_i² = r²`.
pub fn sphere_inclusion_complexification(r: f64, p: &RVec, v: &RVec) -> Result<CVec> {
    check_sphere_data(r, p, v)?;
    let s = v.norm();
    let pc = p.map(|x| c(x, 0.0));
    if s == 0.0 {
        return Ok(pc);
    }
    let t = s / r;
    Ok(pc * c(t.cosh(), 0.0) + v.map(|x| c(0.0, r * t.sinh() * x / s)))
}

/// The identity of a catalog space `G/K`, observed through its Cartan image
/// (entries of `b S b^-1`, column-major).
#[derive(Debug, Clone)]
pub struct SymmetricIdentity<'a> {
    pub space: &'a SymmetricSpace,
}

impl AnalyticMap for SymmetricIdentity<'_> {
    type Point = SpacePoint;
    type Tangent = TangentVector;

    fn curve_coefficients(&self, p: &SpacePoint, v: &TangentVector, order: usize) -> Result<Vec<CVec>> {
        if !p.approx_eq(v.base(), crate::space::POINT_TOL) {
            return Err(Error::Precondition("tangent vector is not based at p".into()));
        }
        // C(b exp(tξ)) = b exp(2tξ) S b^-1
        let b = v.base().rep();
        let binv = b.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
        let two_xi = self.space.pair().algebra().element_matrix_c(v.xi()) * c(2.0, 0.0);
        let right = self.space.pair().conjugator() * binv;
        let mut m = b.clone();
        let mut out = Vec::with_capacity(order);
        for k in 0..order {
            if k > 0 {
                m = m * &two_xi / c(k as f64, 0.0);
            }
            out.push(flatten(&(&m * &right)));
        }
        Ok(out)
    }
}

/// Column-major flattening of a matrix.
pub fn flatten(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unflatten(v: &CVec, n: usize) -> CMat {
    CMat::from_column_slice(n, n, v.as_slice())
}

/// A real-analytic function whose composition with a curve germ can be
/// expanded (the caller-supplied germ oracle for `F`).
pub trait LevelFunction {
    fn eval_real(&self, x: &RVec) -> f64;
    /// Taylor coefficients of `F ∘ curve` from those of the curve.
    fn compose(&self, curve: &[CVec]) -> Vec<C64>;
}

/// `F(x) = xᵀ Q x` with symmetric `Q`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub q: crate::linalg::RMat,
}

impl LevelFunction for QuadraticForm {
    fn eval_real(&self, x: &RVec) -> f64 {
        x.dot(&(&self.q * x))
    }

    fn compose(&self, curve: &[CVec]) -> Vec<C64> {
        let qc = crate::linalg::to_complex(&self.q);
        let qa: Vec<CVec> = curve.iter().map(|a| &qc * a).collect();
        (0..curve.len())
            .map(|k| (0..=k).map(|i| curve[i].transpose() * &qa[k - i]).map(|m| m[(0, 0)]).sum())
            .collect()
    }
}

/// `F(x) = w·x + b`.
#[derive(Debug, Clone)]
pub struct AffineFunction {
    pub w: RVec,
    pub b: f64,
}

impl LevelFunction for AffineFunction {
    fn eval_real(&self, x: &RVec) -> f64 {
        self.w.dot(x) + self.b
    }

    fn compose(&self, curve: &[CVec]) -> Vec<C64> {
        let wc = self.w.map(|x| c(x, 0.0));
        curve
            .iter()
            .enumerate()
            .map(|(k, a)| (wc.transpose() * a)[(0, 0)] + if k == 0 { c(self.b, 0.0) } else { c(0.0, 0.0) })
            .collect()
    }
}

/// Evaluates `F^h` at `ι^c(v)` for each sample `(p, v)` by continuing
/// `F ∘ ι ∘ γ_v` to `√−1`, and reports `max |F^h − a|`.
pub fn level_set_check<M, F>(
    f: &F,
    a: f64,
    map: &M,
    samples: &[(M::Point, M::Tangent)],
    tol: f64,
) -> Result<Report>
where
    M: AnalyticMap + Sync,
    F: LevelFunction + Sync,
    M::Point: Sync,
    M::Tangent: Sync,
{
    let vals = sample_map(samples.len(), 0, |i, _| -> Result<f64> {
        let (p, v) = &samples[i];
        let ext = continue_curve(
            0.0,
            |n| {
                let curve = map.curve_coefficients(p, v, n)?;
                Ok(f.compose(&curve).into_iter().map(|z| CVec::from_element(1, z)).collect())
            },
            I,
            1e-11,
        )?;
        Ok((ext.value[0] - c(a, 0.0)).norm())
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("level-set", "", 0, samples.len(), tol);
    report.record("level_residual", ordered_max(&vals));
    Ok(report.finish())
}

/// Totally geodesic circle `s -> exp(s e) o` in a catalog space with unit
/// `e ∈ p`, complexified: `f^c` at `(s, τ)` is the continuation of
/// `t -> f(s + tτ)` to `t = √−1`.
#[derive(Debug, Clone)]
pub struct GeodesicCircle<'a> {
    pub space: &'a SymmetricSpace,
    /// Unit direction in `p` coordinates.
    pub direction: CVec,
}

impl GeodesicCircle<'_> {
    /// `f^c(s + iτ)` as a Cartan image, through the Taylor engine.
    pub fn complexified(&self, s: f64, tau: f64) -> Result<CMat> {
        let real = self.space.real_form();
        let xi = real.pair().from_p_coords(&self.direction);
        let b = real.point(crate::linalg::expm(&(real.pair().algebra().element_matrix_c(&xi) * c(s, 0.0)))?)?;
        let v = real.tangent(&b, &xi * c(tau, 0.0))?;
        let id = SymmetricIdentity { space: &real };
        // the entries of a noncompact line grow exponentially; tolerance is relative
        let scale = max_abs(b.cartan_image()).max(1.0) * (1.0 + tau.abs()).exp().powi(2);
        let ext = complexify_map(&id, &b, &v, 1e-13 * scale)?;
        Ok(unflatten(&ext.value, real.pair().algebra().matrix_size()))
    }
}

/// Isometry check for the complexification of a totally geodesic circle: the
/// pullback of the ambient `g_A` by `f^c` (differentiated numerically)
/// against the intrinsic `g_A` of the complexified line, `2 Re(dz²)`.
pub fn geodesic_circle_isometry_check(space: &SymmetricSpace, samples: usize, seed: u64, tol: f64) -> Result<Report> {
    let ambient = space.complexification();
    let m = ambient.dim_p();
    let dir = CVec::from_fn(m, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let circle = GeodesicCircle { space: &ambient, direction: dir };
    let intrinsic = flat_metric(1);
    let h = 1e-3;
    // a full period on closed circles, a bounded arc on lines
    let real = ambient.real_form();
    let o = real.origin();
    let e = |j: usize| CVec::from_fn(m, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let closed = m >= 2 && real.sectional_curvature(&real.tangent_from_p(&o, &e(0))?, &real.tangent_from_p(&o, &e(1))?)? > 0.0;
    let s_range = if closed { 0.0..std::f64::consts::TAU } else { -1.0..1.0 };
    let vals = sample_map(samples, seed, |_, rng| -> Result<f64> {
        use rand::Rng;
        let s = rng.random_range(s_range.clone());
        let tau = rng.random_range(-1.0..1.0);
        let cart = circle.complexified(s, tau)?;
        // Richardson-extrapolated central differences in s and τ
        let d = |ds: f64, dt: f64| -> Result<CMat> {
            let fd = |k: f64| -> Result<CMat> {
                let a = circle.complexified(s + k * ds, tau + k * dt)?;
                let b = circle.complexified(s - k * ds, tau - k * dt)?;
                Ok((a - b) / c(2.0 * k, 0.0))
            };
            Ok((fd(h / 2.0)? * c(4.0, 0.0) - fd(h)?) / c(3.0, 0.0))
        };
        let ds = d(1.0, 0.0)?;
        let dt = d(0.0, 1.0)?;
        let z = [c(s, tau)];
        let e = CVec::from_element(1, c(1.0, 0.0));
        let ie = CVec::from_element(1, I);
        let mut worst: f64 = 0.0;
        for (a, xa) in [(&ds, &e), (&dt, &ie)] {
            for (b, xb) in [(&ds, &e), (&dt, &ie)] {
                let amb = ambient.embedded_metric(&cart, a, b)?;
                let intr = intrinsic.anti_kaehler(&z, xa, xb, 1e-12)?;
                worst = worst.max((amb - intr).abs());
            }
        }
        Ok(worst)
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("isometric-extension", &ambient.name(), seed, samples, tol);
    report.record("pullback_metric_mismatch", ordered_max(&vals));
    Ok(report.finish())
}

/// JSON exchange format for germs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GermJson {
    pub center: f64,
    /// `coeffs[k][i] = [re, im]` of component `i` of the `k`-th coefficient.
    pub coeffs: Vec<Vec<[f64; 2]>>,
    pub radius_estimate: f64,
}

impl GermJson {
    pub fn from_germ(g: &AnalyticGerm) -> Self {
        GermJson {
            center: g.center,
            coeffs: g.coeffs.iter().map(|a| a.iter().map(|z| [z.re, z.im]).collect()).collect(),
            radius_estimate: if g.radius_estimate.is_finite() { g.radius_estimate } else { f64::MAX },
        }
    }

    /// Rebuilds the germ; the radius is re-estimated and the stored value
    /// may only lower it.
    pub fn to_germ(&self) -> Result<AnalyticGerm> {
        let coeffs = self.coeffs.iter().map(|a| CVec::from_iterator(a.len(), a.iter().map(|p| c(p[0], p[1])))).collect();
        let mut g = AnalyticGerm::new(self.center, coeffs)?;
        g.radius_estimate = g.radius_estimate.min(self.radius_estimate);
        Ok(g)
    }
}

/// Rank of the real differential of `f^c` for the circle at `(s, τ)`,
/// detecting pointwise immersion failure.
pub fn circle_differential_rank(circle: &GeodesicCircle, s: f64, tau: f64, h: f64) -> Result<usize> {
    let ds = (circle.complexified(s + h, tau)? - circle.complexified(s - h, tau)?) / c(2.0 * h, 0.0);
    let dt = (circle.complexified(s, tau + h)? - circle.complexified(s, tau - h)?) / c(2.0 * h, 0.0);
    let cols = [ds, dt];
    let n = cols[0].len();
    let m = crate::linalg::RMat::from_fn(2 * n, 2, |i, j| {
        let z = cols[j].as_slice()[i % n];
        if i < n { z.re } else { z.im }
    });
    let scale = max_abs(&cols[0]).max(max_abs(&cols[1])).max(1e-300);
    Ok(crate::linalg::rank_real(&(m / scale), 1e-6))
}
