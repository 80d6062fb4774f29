//! The polar map `v -> exp_p(Jv)`, duals `exp_p(J T_pM)`, and `G`-orbits on
//! `G^c/K^c` with their shape operators and focal structure.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::contour::Window;
use crate::error::{Error, Result};
use crate::focal::{
    focal_determinant, focal_radii_closed_form, germ_focal_radii, multiset_distance, simultaneous_eigen, AmbientModel,
    FocalReport, SubmanifoldGerm,
};
use crate::linalg::{
    c, column_span, complexify_vec, condition, eig, expm, logm, max_abs, max_abs_real, max_abs_vec, null_space_real,
    realify_vec, to_complex, CMat, CVec, RMat, RVec, C64, I,
};
use crate::report::{ordered_max, Report};
use crate::space::{SpacePoint, SymmetricSpace, TangentVector};
use crate::verify::{sample_map, sample_rng};

/// Tolerance of the orbit classification flags.
pub const ORBIT_TOL: f64 = 1e-6;
/// Eigenvector condition bound for regularity of `ad(w)`.
pub const REGULARITY_COND: f64 = 1e8;

/// `Φ(v) = exp_p(J̃ v)` for `v` tangent to the real form; the result lies in
/// the complexification.
pub fn polar_map(real: &SymmetricSpace, v: &TangentVector) -> Result<SpacePoint> {
    if real.is_complexified() {
        return Err(Error::Precondition("polar map takes tangent vectors of the real form".into()));
    }
    let cx = real.complexification();
    let p = cx.point(v.base().rep().clone())?;
    let jv = cx.tangent(&p, v.xi() * I)?;
    cx.exp_point(&p, &jv)
}

/// `Φ(γ_*(s + t√−1))` against `γ^c(s + t√−1)` for the geodesic `γ` with
/// `γ'(0) = v`, and `Φ(g_* v)` against `g Φ(v)`.
pub fn polar_residuals(real: &SymmetricSpace, v: &TangentVector, s: f64, t: f64, g: &CMat) -> Result<(f64, f64)> {
    let cx = real.complexification();
    // γ_*(s + t√−1) = t γ'(s), with γ'(s) the parallel transport of v
    let tr = real.parallel_transport(v, 0.0, s)?;
    let vel = real.tangent_from_p(&tr.to, &(&tr.matrix * real.p_coords(v)))?;
    let lhs = polar_map(real, &vel.scale(t))?;
    let cp = cx.point(v.base().rep().clone())?;
    let cv = cx.tangent(&cp, v.xi().clone())?;
    let geo = cx.complex_geodesic(&cp, &cv)?;
    let rhs = cx.complex_geodesic_eval(&geo, c(s, t))?;
    let geo_res = lhs.distance(&rhs);
    let gv = real.act_tangent(g, v)?;
    let a = polar_map(real, &gv)?;
    let b = cx.act(g, &polar_map(real, v)?)?;
    Ok((geo_res, a.distance(&b)))
}

/// Suite "polar": both polar-map residuals over seeded samples.
pub fn verify_polar(space: &SymmetricSpace, samples: usize, seed: u64, tol: f64) -> Result<Report> {
    let real = space.real_form();
    let mut report = Report::new("polar", &space.complexification().name(), seed, samples, tol);
    let vals = sample_map(samples, seed, |_, rng| -> Result<(f64, f64)> {
        let p = real.random_point(rng, 0.5)?;
        let v = real.random_tangent(rng, &p, 0.8);
        let s = rng.random_range(-1.0..1.0);
        let t = rng.random_range(-1.0..1.0);
        let g = real.random_group_element(rng, 0.5)?;
        polar_residuals(&real, &v, s, t, &g)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    report.record("polar_geodesic_mismatch", ordered_max(&vals.iter().map(|x| x.0).collect::<Vec<_>>()));
    report.record("polar_equivariance", ordered_max(&vals.iter().map(|x| x.1).collect::<Vec<_>>()));
    Ok(report.finish())
}

/// Realified `p^c` coordinates (length `2m`) of a tangent vector.
pub fn real_coords(space: &SymmetricSpace, v: &TangentVector) -> RVec {
    realify_vec(&space.p_coords(v))
}

fn complex_coords(x: &RVec) -> CVec {
    complexify_vec(x)
}

/// Smallest singular value ratio of `dΦ` at `t v` along a ray, sampled on
/// `[0, t_max]`; parameters where the ratio has a local minimum below
/// `threshold` are reported as candidate critical parameters.
pub fn polar_critical_parameters(real: &SymmetricSpace, v: &TangentVector, t_max: f64, steps: usize, threshold: f64) -> Result<Vec<f64>> {
    let cx = real.complexification();
    let m = real.dim_p();
    let ratio = |t: f64| -> Result<f64> {
        let h = 1e-5;
        let base = polar_map(real, &v.scale(t))?;
        let mut jac = RMat::zeros(2 * m, 2 * m);
        for j in 0..2 * m {
            let e = CVec::from_fn(m, |i, _| if i == j % m { c(1.0, 0.0) } else { c(0.0, 0.0) });
            let img = |eps: f64| -> Result<CMat> {
                if j < m {
                    // move the base point, transporting v by the group action
                    let g = expm(&real.pair().algebra().element_matrix_c(&real.pair().from_p_coords(&(&e * c(eps, 0.0)))))?;
                    let moved = real.act_tangent(&g, &v.scale(t))?;
                    Ok(polar_map(real, &moved)?.cartan_image().clone())
                } else {
                    let w = real.tangent(v.base(), v.xi() * c(t, 0.0) + real.pair().from_p_coords(&(&e * c(eps, 0.0))))?;
                    Ok(polar_map(real, &w)?.cartan_image().clone())
                }
            };
            let dc = (img(h)? - img(-h)?) / c(2.0 * h, 0.0);
            let tv = cx.tangent_from_embedded(&base, &dc)?;
            jac.set_column(j, &real_coords(&cx, &tv));
        }
        let sv = jac.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(if max > 0.0 { min / max } else { 0.0 })
    };
    let n = steps.max(3);
    let ts: Vec<f64> = (1..=n).map(|k| t_max * k as f64 / n as f64).collect();
    let rs: Vec<f64> = ts.iter().map(|&t| ratio(t)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for k in 1..n - 1 {
        if rs[k] <= rs[k - 1] && rs[k] <= rs[k + 1] && rs[k] < threshold {
            out.push(ts[k]);
        }
    }
    Ok(out)
}

/// Samples of the dual `exp_p(J T_pM)` with their total-geodesy data.
#[derive(Debug, Clone, Serialize)]
pub struct DualReport {
    pub space: String,
    pub samples: usize,
    /// Largest normal component of the normal-chart Hessian.
    pub second_fundamental_form: f64,
    /// Largest distance of a sample from `p · exp(√−1 p)`.
    pub membership: f64,
    /// Sectional curvatures of the dual under the induced `g_A`.
    pub induced_curvature: Vec<f64>,
    /// The same under the positive normalization `−g_A / 2` of the dual metric
    /// (the classical dual; metric sign flips with the square of `√−1`).
    pub normalized_curvature: Vec<f64>,
}

fn log_coords(space: &SymmetricSpace, p: &SpacePoint, q: &SpacePoint) -> Result<CVec> {
    Ok(space.p_coords(&space.log_point(p, q)?))
}

/// Samples the dual at the real point `p` over seeded real directions.
pub fn dual_at_point(space: &SymmetricSpace, p: &SpacePoint, samples: usize, seed: u64) -> Result<DualReport> {
    if !space.is_complexified() {
        return Err(Error::Precondition("dual lives in a complexified space".into()));
    }
    let real = space.real_form();
    let m = space.dim_p();
    let model = AmbientModel::realified(space)?;
    let gram = model.gram().map(|x| x.re);
    let rows = sample_map(samples, seed, |_, rng| -> Result<(f64, f64, f64)> {
        let u = real.random_tangent(rng, &real.point(p.rep().clone())?, 0.6);
        let u_c = real.p_coords(&u).map(|x| c(x.re, 0.0));
        let at = |y: &CVec| -> Result<SpacePoint> {
            let w = space.tangent_from_p(p, &((&u_c + y) * I))?;
            space.exp_point(p, &w)
        };
        let q = at(&CVec::zeros(m))?;
        // membership: log_p(q) ∈ √−1 p
        let lp = log_coords(space, p, &q)?;
        let member = lp.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        // normal-chart coordinates around q
        let psi = |y: &CVec| -> Result<RVec> { Ok(realify_vec(&log_coords(space, &q, &at(y)?)?)) };
        let h = 1e-2;
        let e = |j: usize, s: f64| CVec::from_fn(m, |i, _| if i == j { c(s, 0.0) } else { c(0.0, 0.0) });
        let mut tang = RMat::zeros(2 * m, m);
        for j in 0..m {
            let d = (psi(&e(j, h))? - psi(&e(j, -h))?) / (2.0 * h);
            tang.set_column(j, &d);
        }
        let normal = null_space_real(&(tang.transpose() * &gram), 1e-9);
        let proj_n = {
            let gn = normal.transpose() * &gram * &normal;
            let inv = gn.try_inverse().ok_or_else(|| Error::Degenerate("degenerate normal space of the dual".into()))?;
            &normal * inv * normal.transpose() * &gram
        };
        let mut second: f64 = 0.0;
        for i in 0..m {
            for j in i..m {
                let f = |a: f64, b: f64| psi(&(e(i, a) + e(j, b)));
                let hess = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
                second = second.max((&proj_n * hess).amax());
            }
        }
        // sectional curvature on the dual's tangent plane (first two directions)
        let curv = if m >= 2 {
            let x = space.tangent_from_p(&q, &complex_coords(&tang.column(0).into_owned()))?;
            let y = space.tangent_from_p(&q, &complex_coords(&tang.column(1).into_owned()))?;
            space.sectional_curvature(&x, &y)?
        } else {
            f64::NAN
        };
        Ok((second, member, curv))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let induced: Vec<f64> = rows.iter().map(|r| r.2).collect();
    Ok(DualReport {
        space: space.name(),
        samples,
        second_fundamental_form: ordered_max(&rows.iter().map(|r| r.0).collect::<Vec<_>>()),
        membership: ordered_max(&rows.iter().map(|r| r.1).collect::<Vec<_>>()),
        normalized_curvature: induced.iter().map(|k| -2.0 * k).collect(),
        induced_curvature: induced,
    })
}

/// Sectional curvature of the real form on `p` from matrix commutators and
/// the trace form (an oracle independent of the structure constants).
pub fn brute_force_curvature(real: &SymmetricSpace, x: &CVec, y: &CVec) -> Result<f64> {
    let alg = real.pair().algebra();
    let ratio = alg.trace_form_ratio().ok_or_else(|| Error::Precondition("no trace-form ratio".into()))?;
    let sign = real.pair().metric_sign();
    let xm = alg.element_matrix_c(&real.pair().from_p_coords(x));
    let ym = alg.element_matrix_c(&real.pair().from_p_coords(y));
    let g = |a: &CMat, b: &CMat| (a * b).trace().re * ratio * sign;
    let br = |a: &CMat, b: &CMat| a * b - b * a;
    let r = -br(&br(&xm, &ym), &ym);
    let den = g(&xm, &xm) * g(&ym, &ym) - g(&xm, &ym).powi(2);
    Ok(g(&r, &xm) / den)
}

/// Suite "dual": total geodesy and curvature of the dual at the origin and
/// at a random real point, plus the totally geodesic line's complexified
/// dual lying in the ambient dual.
pub fn verify_dual(space: &SymmetricSpace, samples: usize, seed: u64, tol: f64) -> Result<Report> {
    let cx = space.complexification();
    let real = cx.real_form();
    let mut report = Report::new("dual", &cx.name(), seed, samples, tol);
    let o = cx.origin();
    let mut rng = sample_rng(seed, usize::MAX - 2);
    let p = cx.point(real.random_point(&mut rng, 0.5)?.rep().clone())?;
    let mut curv = Vec::new();
    for (k, base) in [o, p].iter().enumerate() {
        let r = dual_at_point(&cx, base, samples, seed.wrapping_add(k as u64))?;
        report.record("second_fundamental_form", r.second_fundamental_form);
        report.record("dual_membership", r.membership);
        curv.extend(r.normalized_curvature);
    }
    if cx.dim_p() >= 2 {
        let m = cx.dim_p();
        let e = |j: usize| CVec::from_fn(m, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let sphere = brute_force_curvature(&real, &e(0), &e(1))?;
        let expected = -sphere;
        let worst = ordered_max(&curv.iter().map(|k| (k - expected).abs()).collect::<Vec<_>>());
        report.record("dual_curvature_mismatch", worst);
        report.notes.push(format!("real-form curvature {sphere:.12}; dual curvature (normalized metric) {expected:.12}"));
    }
    report.record("line_dual_membership", line_dual_membership(&cx, samples)?);
    Ok(report.finish())
}

/// The complexification `f^c` of the geodesic line `s -> exp(s e_1) o` maps
/// its dual `τ -> f^c(√−1 τ)` into the ambient dual `exp_o(√−1 p)`.
pub fn line_dual_membership(space: &SymmetricSpace, samples: usize) -> Result<f64> {
    let m = space.dim_p();
    let dir = CVec::from_fn(m, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let circle = crate::holo::GeodesicCircle { space, direction: dir };
    let pair = space.pair();
    let n = samples.clamp(2, 50);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let tau = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
        let cart = circle.complexified(0.0, tau)?;
        let l = logm(&(cart * pair.conjugator_inv()))? * c(0.5, 0.0);
        let (coeff, _) = pair.algebra().expand_c(&l)?;
        let kpart = max_abs_vec(&pair.project_k(&coeff));
        let re = pair.p_coords(&coeff).iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        worst = worst.max(kpart).max(re);
    }
    Ok(worst)
}

/// Tangent and normal spaces of the `G`-orbit through `q`, in realified
/// `p^c` coordinates of the frame `q.rep()`.
#[derive(Debug, Clone)]
pub struct OrbitFrame {
    pub point: SpacePoint,
    /// Induced vectors of the real algebra basis (columns).
    pub induced: RMat,
    /// `k^c`-parts of `Ad(b^-1) X` for the same basis (algebra coordinates).
    pub kappa: Vec<CVec>,
    pub tangent: RMat,
    pub normal: RMat,
    /// Coefficients of the induced vectors in the tangent basis.
    pub coeffs: RMat,
    pub gram: RMat,
}

impl OrbitFrame {
    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    /// `g_A`-orthogonal projection onto the tangent space.
    fn tangent_projector(&self) -> Result<RMat> {
        let gt = self.tangent.transpose() * &self.gram * &self.tangent;
        let inv = gt.try_inverse().ok_or_else(|| Error::Degenerate("degenerate induced metric".into()))?;
        Ok(inv * self.tangent.transpose() * &self.gram)
    }

    /// Tangent-basis coefficients of the tangential parts of the columns.
    pub fn tangential(&self, cols: &RMat) -> Result<RMat> {
        Ok(self.tangent_projector()? * cols)
    }
}

/// Frame of the `G`-orbit through `q`.
pub fn orbit_frame(space: &SymmetricSpace, q: &SpacePoint) -> Result<OrbitFrame> {
    let pair = space.pair();
    let alg = pair.algebra();
    let d = alg.dim();
    let m = space.dim_p();
    let b = q.rep();
    let binv = b.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
    let mut induced = RMat::zeros(2 * m, d);
    let mut kappa = Vec::with_capacity(d);
    for j in 0..d {
        let x = CVec::from_fn(d, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let (coeff, _) = alg.expand_c(&(&binv * alg.element_matrix_c(&x) * b))?;
        induced.set_column(j, &realify_vec(&pair.p_coords(&coeff)));
        kappa.push(pair.project_k(&coeff));
    }
    let tangent = column_span(&induced, 1e-9);
    let model = AmbientModel::realified(space)?;
    let gram = model.gram().map(|x| x.re);
    let normal = null_space_real(&(tangent.transpose() * &gram), 1e-9);
    let gt = tangent.transpose() * &gram * &tangent;
    let gn = normal.transpose() * &gram * &normal;
    let ct = if gt.nrows() > 0 { condition(&to_complex(&gt)) } else { 1.0 };
    let cn = if gn.nrows() > 0 { condition(&to_complex(&gn)) } else { 1.0 };
    if !(ct <= 1e8 && cn <= 1e8) {
        return Err(Error::Degenerate(format!(
            "induced metric degenerate at the sample (condition {:.3e}); resample the orbit point",
            ct.max(cn)
        )));
    }
    let coeffs = tangent.transpose() * &induced;
    Ok(OrbitFrame { point: q.clone(), induced, kappa, tangent, normal, coeffs, gram })
}

/// Shape operator with its health residuals.
#[derive(Debug, Clone)]
pub struct ShapeOperator {
    /// `A_v` on tangent-basis coefficients, symmetrized.
    pub matrix: RMat,
    /// `|⟨A X, Y⟩ − ⟨X, A Y⟩|` before symmetrization.
    pub asymmetry: f64,
    /// Tangential derivative along isotropy directions (should vanish).
    pub consistency: f64,
}

fn assemble_shape(frame: &OrbitFrame, nabla: &RMat) -> Result<ShapeOperator> {
    let tang = frame.tangential(nabla)?; // n × d
    let cpinv = frame
        .coeffs
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Numerical(format!("pseudo-inverse failed: {e}")))?;
    let a = -(&tang * &cpinv);
    let consistency = max_abs_real(&(&a * &frame.coeffs + &tang));
    let gt = frame.tangent.transpose() * &frame.gram * &frame.tangent;
    let ga = &gt * &a;
    let asymmetry = max_abs_real(&(&ga - ga.transpose()));
    let sym = (&ga + ga.transpose()) * 0.5;
    let gt_inv = gt.try_inverse().ok_or_else(|| Error::Degenerate("degenerate induced metric".into()))?;
    Ok(ShapeOperator { matrix: gt_inv * sym, asymmetry, consistency })
}

/// `A_v` from the moving-frame formula: the equivariant extension of `v` has
/// constant coordinates in the frames `exp(tX) b`, so `∇_X V = [κ_X, v]`.
pub fn shape_operator_exact(space: &SymmetricSpace, frame: &OrbitFrame, v: &RVec) -> Result<ShapeOperator> {
    let pair = space.pair();
    let xi = pair.from_p_coords(&complexify_vec(v));
    let mut nabla = RMat::zeros(v.len(), frame.kappa.len());
    for (j, k) in frame.kappa.iter().enumerate() {
        let br = pair.algebra().bracket_c(k, &xi);
        nabla.set_column(j, &realify_vec(&pair.p_coords(&br)));
    }
    assemble_shape(frame, &nabla)
}

/// `A_v` by central differences (Richardson-extrapolated) of the components
/// of the equivariant normal extension in normal coordinates centered at the
/// orbit point, where the connection coefficients vanish.
pub fn shape_operator_fd(space: &SymmetricSpace, frame: &OrbitFrame, v: &RVec) -> Result<ShapeOperator> {
    let mut h = 1e-3;
    let mut last = None;
    for _ in 0..3 {
        let s = shape_operator_fd_step(space, frame, v, h)?;
        if s.asymmetry <= 1e-7 {
            return Ok(s);
        }
        last = Some(s);
        h /= 4.0;
    }
    let s = last.expect("at least one attempt");
    Err(Error::Numerical(format!("shape operator asymmetry {:.3e} after step adaptation", s.asymmetry)))
}

fn shape_operator_fd_step(space: &SymmetricSpace, frame: &OrbitFrame, v: &RVec, h: f64) -> Result<ShapeOperator> {
    let pair = space.pair();
    let alg = pair.algebra();
    let d = alg.dim();
    let q = &frame.point;
    let b = q.rep();
    let vc = complexify_vec(v);
    let chart = |x: &CVec, t: f64| -> Result<RVec> {
        let g = expm(&(alg.element_matrix_c(x) * c(t, 0.0)))?;
        let a = &g * b;
        let pt = space.point(a.clone())?;
        let u = space.log_point(q, &pt)?;
        let rep_u = b * expm(&alg.element_matrix_c(u.xi()))?;
        let field = space.tangent_from_p(&pt, &vc)?;
        let in_chart = space.in_frame(&field, &rep_u)?;
        let k2 = space.jacobi_operator_matrix(u.xi());
        let (_, sinhc) = crate::linalg::cosh_sinhc_sqrt(&k2);
        let zeta = sinhc
            .lu()
            .solve(&space.p_coords(&in_chart))
            .ok_or_else(|| Error::Numerical("exp differential not invertible in the chart".into()))?;
        Ok(realify_vec(&zeta))
    };
    let mut nabla = RMat::zeros(v.len(), d);
    for j in 0..d {
        let x = CVec::from_fn(d, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let dh = (chart(&x, h)? - chart(&x, -h)?) / (2.0 * h);
        let dh2 = (chart(&x, h / 2.0)? - chart(&x, -h / 2.0)?) / h;
        nabla.set_column(j, &((dh2 * 4.0 - dh) / 3.0));
    }
    assemble_shape(frame, &nabla)
}

/// Orbit classification request: orbit of `G` through `exp(w) K^c`.
#[derive(Debug, Clone)]
pub struct OrbitGermRequest {
    pub space: SymmetricSpace,
    /// Base displacement in `p^c` coordinates.
    pub w: CVec,
    pub samples: usize,
    pub seed: u64,
    /// Half-width of the focal window.
    pub window: f64,
}

impl OrbitGermRequest {
    pub fn new(space: SymmetricSpace, w: CVec, samples: usize, seed: u64) -> Result<Self> {
        if !space.is_complexified() {
            return Err(Error::Precondition("orbits live in a complexified space".into()));
        }
        if w.len() != space.dim_p() || w.iter().any(|z| !z.is_finite()) {
            return Err(Error::Precondition("w must be a finite vector of p^c coordinates".into()));
        }
        if samples < 2 {
            return Err(Error::Precondition("at least two orbit samples are needed".into()));
        }
        Ok(OrbitGermRequest { space, w, samples, seed, window: crate::focal::DEFAULT_WINDOW })
    }

    /// Orbit through `Φ(u) = exp(√−1 u) K^c` for real `u ∈ p`.
    pub fn through_polar(space: SymmetricSpace, u: &RVec, samples: usize, seed: u64) -> Result<Self> {
        let w = u.map(|x| c(0.0, x));
        Self::new(space, w, samples, seed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitVerdict {
    pub space: String,
    pub w: Vec<[f64; 2]>,
    pub seed: u64,
    pub samples: usize,
    pub orbit_dim: usize,
    pub max_orbit_dim: usize,
    pub flags: BTreeMap<String, bool>,
    pub residuals: BTreeMap<String, f64>,
    /// Focal radii per sampled point (argument principle).
    pub focal: Vec<FocalReport>,
    /// Closed-form radii per sampled point, when the eigen-factorization exists.
    pub focal_closed_form: Vec<FocalReport>,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
}

impl OrbitVerdict {
    pub fn flag(&self, name: &str) -> bool {
        self.flags.get(name).copied().unwrap_or(false)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_sorted_json(self)
    }
}

pub const FLAG_NAMES: [&str; 7] =
    ["flat_section", "curvature_adapted", "equifocal", "isoparametric", "principal", "reflective_zero_section", "totally_geodesic"];

fn orbit_dimension(space: &SymmetricSpace, w: &CVec) -> Result<usize> {
    let rep = expm(&space.pair().algebra().element_matrix_c(&space.pair().from_p_coords(w)))?;
    Ok(orbit_frame_dim(space, &space.point(rep)?)?)
}

fn orbit_frame_dim(space: &SymmetricSpace, q: &SpacePoint) -> Result<usize> {
    let pair = space.pair();
    let alg = pair.algebra();
    let d = alg.dim();
    let b = q.rep();
    let binv = b.clone().try_inverse().ok_or_else(|| Error::Numerical("singular rep".into()))?;
    let mut induced = RMat::zeros(2 * space.dim_p(), d);
    for j in 0..d {
        let x = CVec::from_fn(d, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let (coeff, _) = alg.expand_c(&(&binv * alg.element_matrix_c(&x) * b))?;
        induced.set_column(j, &realify_vec(&pair.p_coords(&coeff)));
    }
    Ok(column_span(&induced, 1e-9).ncols())
}

/// Per-point data gathered by [`classify_orbit_with`].
struct PointData {
    shape_fd_exact: f64,
    asymmetry: f64,
    consistency: f64,
    flat: f64,
    adapted_invariance: f64,
    adapted_commutator: f64,
    focal: FocalReport,
    closed: Option<FocalReport>,
    grid: Vec<C64>,
    shape_max: f64,
}

/// Base point of an orbit request with its frame and the unit normal `v0`.
pub struct OrbitBase {
    pub rep: CMat,
    pub frame: OrbitFrame,
    /// Unit normal at the base (realified `p^c` coordinates).
    pub v0: RVec,
    /// `sqrt|g_A(w, w)|` when `−w` is normal (the radial direction), else `None`.
    pub radial_distance: Option<f64>,
}

pub fn orbit_base(req: &OrbitGermRequest) -> Result<OrbitBase> {
    let space = &req.space;
    let pair = space.pair();
    let w_alg = pair.from_p_coords(&req.w);
    let b0 = expm(&pair.algebra().element_matrix_c(&w_alg))?;
    let frame0 = orbit_frame(space, &space.point(b0.clone())?)?;
    let gram = &frame0.gram;
    // the radial direction −w when normal, else the first normal basis vector
    let wr = realify_vec(&req.w);
    let ng = frame0.normal.transpose() * gram;
    let radial = if max_abs_vec(&req.w) > 0.0 {
        let coeff = (ng.clone() * &frame0.normal).try_inverse().map(|inv| inv * (&ng * &wr));
        coeff.map(|cf| &frame0.normal * cf).filter(|x| (x - &wr).amax() <= 1e-9 * wr.amax())
    } else {
        None
    };
    let raw = match &radial {
        Some(r) => -r.clone(),
        None => frame0.normal.column(0).into_owned(),
    };
    let norm2 = (raw.transpose() * gram * &raw)[(0, 0)];
    if norm2.abs() < 1e-12 {
        return Err(Error::Degenerate("chosen normal vector is null; resample".into()));
    }
    let sigma = norm2.abs().sqrt();
    Ok(OrbitBase { rep: b0, frame: frame0, v0: raw / sigma, radial_distance: radial.map(|_| sigma) })
}

/// Germ of the orbit at `h · base` with the equivariant normal `h_* v0`
/// (coefficients in the germ's normal basis).
pub fn orbit_germ_at(space: &SymmetricSpace, base: &OrbitBase, h: &CMat) -> Result<(SubmanifoldGerm, CVec, ShapeStats)> {
    let alg = space.pair().algebra();
    let model = AmbientModel::realified(space)?;
    let hb = h * &base.rep;
    let qk = space.point(hb.clone())?;
    // canonical representative exp(log_o q): frame differs from h b0 by K^c
    let rep = match space.log_point(&space.origin(), &qk) {
        Ok(u) => {
            let r = expm(&alg.element_matrix_c(u.xi()))?;
            if space.point(r.clone())?.distance(&qk) < 1e-9 { r } else { hb.clone() }
        }
        Err(_) => hb.clone(),
    };
    let qk = space.point(rep.clone())?;
    let pushed = space.tangent_from_p(&space.point(hb)?, &complexify_vec(&base.v0))?;
    let vk = real_coords(space, &space.in_frame(&pushed, &rep)?);
    let frame = orbit_frame(space, &qk)?;
    let gram = &frame.gram;
    let nbasis = &frame.normal;
    let mut shapes = Vec::new();
    let mut stats = ShapeStats::default();
    for j in 0..nbasis.ncols() {
        let nj = nbasis.column(j).into_owned();
        let fd = shape_operator_fd(space, &frame, &nj)?;
        let ex = shape_operator_exact(space, &frame, &nj)?;
        stats.fd_vs_exact = stats.fd_vs_exact.max(max_abs_real(&(&fd.matrix - &ex.matrix)));
        stats.asymmetry = stats.asymmetry.max(fd.asymmetry);
        stats.consistency = stats.consistency.max(fd.consistency);
        shapes.push(to_complex(&fd.matrix));
    }
    let ncols = to_complex(nbasis);
    let triple = model.triple_residual(&ncols)?;
    stats.flat = model.abelian_residual(&ncols).max(triple);
    let germ = SubmanifoldGerm::new(model, qk, to_complex(&frame.tangent), ncols, shapes, triple <= crate::focal::SECTION_TOL)?;
    let gn = nbasis.transpose() * gram * nbasis;
    let vcoef = gn.try_inverse().ok_or_else(|| Error::Degenerate("degenerate normal space".into()))? * (nbasis.transpose() * gram * &vk);
    Ok((germ, complexify_real(&vcoef), stats))
}

fn complexify_real(x: &RVec) -> CVec {
    x.map(|t| c(t, 0.0))
}

/// Health residuals of the shape operators of one germ.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShapeStats {
    pub fd_vs_exact: f64,
    pub asymmetry: f64,
    pub consistency: f64,
    /// Abelian and Lie-triple residual of the normal space.
    pub flat: f64,
}

/// Uniform `n × n` cell-centered grid over a window.
pub fn z_grid(window: &Window, n: usize) -> Vec<C64> {
    let (w, h) = (window.width(), window.height());
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| c(window.re_min + w * (i as f64 + 0.5) / n as f64, window.im_min + h * (j as f64 + 0.5) / n as f64))
        .collect()
}

fn point_data(space: &SymmetricSpace, base: &OrbitBase, h: &CMat, window: Window, zgrid: &[C64]) -> Result<PointData> {
    let (germ, v, stats) = orbit_germ_at(space, base, h)?;
    let (kt, inv) = germ.jacobi_on_tangent(&v)?;
    let a = germ.shape_along(&v);
    let comm = max_abs(&(&a * &kt - &kt * &a)) / (max_abs(&a) * max_abs(&kt)).max(1.0);
    let focal = germ_focal_radii(&germ, &v, window, 1)?;
    let closed = simultaneous_eigen(&germ, &v).ok().map(|p| focal_radii_closed_form(&p, window));
    let grid = zgrid.iter().map(|&z| focal_determinant(&germ, &v, z)).collect::<Result<Vec<_>>>()?;
    let shape_max = germ.shape.iter().map(max_abs).fold(0.0, f64::max);
    Ok(PointData {
        shape_fd_exact: stats.fd_vs_exact,
        asymmetry: stats.asymmetry,
        consistency: stats.consistency,
        flat: stats.flat,
        adapted_invariance: inv,
        adapted_commutator: comm,
        focal,
        closed,
        grid,
        shape_max,
    })
}

/// Classification with explicit group elements `h_k` moving the base point
/// (the first should be the identity).
pub fn classify_orbit_with(req: &OrbitGermRequest, elements: &[CMat]) -> Result<OrbitVerdict> {
    let space = &req.space;
    let pair = space.pair();
    let alg = pair.algebra();
    let w_alg = pair.from_p_coords(&req.w);
    let base = orbit_base(req)?;
    let n = base.frame.dim();
    let mut notes = Vec::new();

    let max_dim = {
        let mut rng = sample_rng(req.seed, usize::MAX - 3);
        let mut best = n;
        for _ in 0..3 {
            let u = space.p_coords(&space.random_tangent(&mut rng, &space.origin(), 1.0));
            best = best.max(orbit_dimension(space, &u)?);
        }
        best
    };

    let window = Window::square(req.window);
    let zgrid = z_grid(&window, 8);
    let points: Vec<Result<PointData>> = {
        use rayon::prelude::*;
        elements.par_iter().map(|h| point_data(space, &base, h, window, &zgrid)).collect()
    };
    let mut data = Vec::new();
    for (k, p) in points.into_iter().enumerate() {
        match p {
            Ok(d) => data.push(d),
            Err(Error::Degenerate(msg)) => notes.push(format!("sample {k} rejected: {msg}")),
            Err(e) => return Err(e),
        }
    }
    if data.len() < 2 {
        return Err(Error::Degenerate("fewer than two orbit samples have nondegenerate frames; resample with another seed".into()));
    }

    let mut residuals = BTreeMap::new();
    let mut flags = BTreeMap::new();
    let maxr = |f: &dyn Fn(&PointData) -> f64| ordered_max(&data.iter().map(f).collect::<Vec<_>>());
    residuals.insert("shape_fd_vs_exact".to_string(), maxr(&|d| d.shape_fd_exact));
    residuals.insert("shape_asymmetry".to_string(), maxr(&|d| d.asymmetry));
    residuals.insert("normal_extension_consistency".to_string(), maxr(&|d| d.consistency));
    let flat = maxr(&|d| d.flat);
    residuals.insert("flat_section".to_string(), flat);
    flags.insert("flat_section".to_string(), flat <= ORBIT_TOL);
    let adapted = maxr(&|d| d.adapted_invariance.max(d.adapted_commutator));
    residuals.insert("curvature_adapted".to_string(), adapted);
    flags.insert("curvature_adapted".to_string(), adapted <= ORBIT_TOL);

    // equifocal: radius multisets agree with the first sample
    let mut equi: f64 = 0.0;
    let mut equi_ok = true;
    for d in &data[1..] {
        match multiset_distance(&data[0].focal, &d.focal) {
            Some(x) => equi = equi.max(x),
            None => {
                equi_ok = false;
                equi = f64::INFINITY;
            }
        }
    }
    residuals.insert("equifocal".to_string(), equi);
    flags.insert("equifocal".to_string(), equi_ok && equi <= ORBIT_TOL);
    let mut method_gap: f64 = 0.0;
    for d in &data {
        if let Some(cf) = &d.closed {
            method_gap = method_gap.max(multiset_distance(cf, &d.focal).unwrap_or(f64::INFINITY));
        }
    }
    residuals.insert("focal_method_agreement".to_string(), method_gap);
    // isoparametric: F̂ agrees pointwise on the z-grid
    let mut iso: f64 = 0.0;
    for d in &data[1..] {
        for (a, b) in data[0].grid.iter().zip(&d.grid) {
            iso = iso.max((a - b).norm() / a.norm().max(1.0));
        }
    }
    residuals.insert("isoparametric".to_string(), iso);
    flags.insert("isoparametric".to_string(), iso <= ORBIT_TOL);
    if flags["isoparametric"] && !flags["equifocal"] {
        notes.push("isoparametric without equifocal: inconsistent with the F̂-criterion".into());
    }

    // principal: maximal orbit dimension and ad(w) diagonalizable
    let (_, vecs) = eig(&alg.ad_matrix_c(&w_alg))?;
    let cond = condition(&vecs);
    residuals.insert("ad_w_eigenvector_condition".to_string(), cond);
    flags.insert("principal".to_string(), n == max_dim && cond <= REGULARITY_COND);

    // totally geodesic and the zero section as a focal submanifold
    let shape_max = maxr(&|d| d.shape_max);
    residuals.insert("shape_max".to_string(), shape_max);
    flags.insert("totally_geodesic".to_string(), shape_max <= 1e-8);
    if let Some(sigma) = base.radial_distance {
        let hit = data
            .iter()
            .map(|d| d.focal.radii.iter().map(|r| (r.z() - c(sigma, 0.0)).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        residuals.insert("zero_section_focal_radius".to_string(), hit);
        // the zero section itself is totally geodesic
        let zero = reflective_zero_section_residual(space)?;
        residuals.insert("zero_section_shape".to_string(), zero);
        flags.insert("reflective_zero_section".to_string(), hit <= ORBIT_TOL && zero <= 1e-8);
        if sigma > req.window {
            notes.push(format!("distance {sigma:.6} to the zero section exceeds the focal window"));
        }
    } else {
        flags.insert("reflective_zero_section".to_string(), n < max_dim && shape_max <= 1e-8);
    }
    Ok(OrbitVerdict {
        space: space.name(),
        w: req.w.iter().map(|z| [z.re, z.im]).collect(),
        seed: req.seed,
        samples: req.samples,
        orbit_dim: n,
        max_orbit_dim: max_dim,
        flags,
        residuals,
        focal: data.iter().map(|d| d.focal.clone()).collect(),
        focal_closed_form: data.iter().filter_map(|d| d.closed.clone()).collect(),
        assumptions: vec![
            "normal holonomy triviality is not verified globally; the equivariant normal extension is checked on samples".into(),
        ],
        notes,
    })
}

/// Largest shape-operator entry of `G(eK^c)` over its normal basis.
pub fn reflective_zero_section_residual(space: &SymmetricSpace) -> Result<f64> {
    let frame = orbit_frame(space, &space.origin())?;
    let mut worst: f64 = 0.0;
    for j in 0..frame.normal.ncols() {
        let s = shape_operator_fd(space, &frame, &frame.normal.column(j).into_owned())?;
        worst = worst.max(max_abs_real(&s.matrix));
    }
    Ok(worst)
}

/// Seeded group elements `h_0 = 1, h_1, …` of the real group.
pub fn orbit_elements(space: &SymmetricSpace, samples: usize, seed: u64) -> Result<Vec<CMat>> {
    let size = space.pair().algebra().matrix_size();
    (0..samples)
        .map(|k| {
            if k == 0 {
                Ok(CMat::identity(size, size))
            } else {
                let mut rng = sample_rng(seed, k);
                space.random_group_element(&mut rng, 0.6)
            }
        })
        .collect()
}

pub fn classify_orbit(req: &OrbitGermRequest) -> Result<OrbitVerdict> {
    classify_orbit_with(req, &orbit_elements(&req.space, req.samples, req.seed)?)
}

/// Parse a real vector for `w`: `dim p` entries are `p` coordinates,
/// `dim g` entries are algebra coordinates projected onto `p`.
pub fn parse_p_vector(space: &SymmetricSpace, vals: &[f64]) -> Result<RVec> {
    let pair = space.pair();
    let (m, d) = (space.dim_p(), pair.algebra().dim());
    if vals.len() == m {
        Ok(RVec::from_column_slice(vals))
    } else if vals.len() == d {
        let x = CVec::from_iterator(d, vals.iter().map(|&t| c(t, 0.0)));
        Ok(pair.p_coords(&pair.project_p(&x)).map(|z| z.re))
    } else if vals.len() == 1 && vals[0] == 0.0 {
        Ok(RVec::zeros(m))
    } else {
        Err(Error::Config(format!("w must have {m} (p coordinates) or {d} (algebra coordinates) entries")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn polar_map_basics() {
        let real = catalog::space("sl2").unwrap();
        let o = real.origin();
        let zero = real.tangent_from_p(&o, &CVec::zeros(2)).unwrap();
        let p = polar_map(&real, &zero).unwrap();
        assert!(p.distance(&real.complexification().origin()) < 1e-15);
        let r = verify_polar(&real, 20, 3, 1e-9).unwrap();
        assert!(r.pass, "{:?}", r.residuals);
    }

    #[test]
    fn dual_is_totally_geodesic_and_hyperbolic() {
        let s = catalog::space("so3c").unwrap();
        let r = verify_dual(&s, 6, 1, 1e-7).unwrap();
        assert!(r.pass, "{:?} {:?}", r.residuals, r.notes);
        let real = s.real_form();
        let e = |j: usize| CVec::from_fn(2, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let k = brute_force_curvature(&real, &e(0), &e(1)).unwrap();
        assert!((k - 0.5).abs() < 1e-12, "{k}");
        let d = dual_at_point(&s, &s.origin(), 3, 2).unwrap();
        for x in &d.normalized_curvature {
            assert!(*x < 0.0 && (x + 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_section_orbit() {
        let s = catalog::space("sl2c").unwrap();
        let f = orbit_frame(&s, &s.origin()).unwrap();
        assert_eq!(f.dim(), 2);
        // tangent p, normal √−1 p
        assert!(f.tangent.rows(2, 2).amax() < 1e-12);
        assert!(f.normal.rows(0, 2).amax() < 1e-12);
        assert!(reflective_zero_section_residual(&s).unwrap() <= 1e-8);
    }

    #[test]
    fn shape_fd_matches_exact() {
        let s = catalog::space("sl2c").unwrap();
        let u = RVec::from_vec(vec![0.7, 0.2]);
        let rep = expm(&s.pair().algebra().element_matrix_c(&s.pair().from_p_coords(&u.map(|x| c(0.0, x))))).unwrap();
        let f = orbit_frame(&s, &s.point(rep).unwrap()).unwrap();
        assert_eq!(f.dim(), 3);
        let nv = f.normal.column(0).into_owned();
        let a = shape_operator_fd(&s, &f, &nv).unwrap();
        let b = shape_operator_exact(&s, &f, &nv).unwrap();
        assert!(a.asymmetry <= 1e-7);
        assert!(max_abs_real(&(&a.matrix - &b.matrix)) < 1e-7);
        assert!(max_abs_real(&b.matrix) > 1e-3);
    }

    #[test]
    fn principal_orbit_classification() {
        let s = catalog::space("sl2c").unwrap();
        let req = OrbitGermRequest::through_polar(s, &RVec::from_vec(vec![0.7, 0.2]), 3, 7).unwrap();
        let v = classify_orbit(&req).unwrap();
        for f in ["flat_section", "curvature_adapted", "equifocal", "isoparametric", "principal", "reflective_zero_section"] {
            assert!(v.flag(f), "{f}: {:?}", v.residuals);
        }
        assert!(!v.flag("totally_geodesic"));
    }

    #[test]
    fn zero_orbit_is_totally_geodesic_not_principal() {
        let s = catalog::space("sl2c").unwrap();
        let req = OrbitGermRequest::new(s, CVec::zeros(2), 2, 1).unwrap();
        let v = classify_orbit(&req).unwrap();
        assert!(v.flag("totally_geodesic"));
        assert!(!v.flag("principal"));
        assert!(v.flag("reflective_zero_section"));
    }

    #[test]
    fn parse_w_forms() {
        let s = catalog::space("sl2c").unwrap();
        let a = parse_p_vector(&s, &[1.0, 0.0, 0.3]).unwrap();
        assert_eq!(a.len(), 2);
        assert!(parse_p_vector(&s, &[1.0, 2.0, 3.0, 4.0]).is_err());
        assert_eq!(parse_p_vector(&s, &[0.0]).unwrap(), RVec::zeros(2));
    }
}

