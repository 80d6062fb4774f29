//! Residual suites for the anti-Kaehler structure of `G^c/K^c`.
//!
//! Each check is evaluated through a second code path so that a zero
//! residual is not an artifact of identical arithmetic: the metric through
//! the Cartan embedding, curvature through the realified algebra, and
//! transport by a real-linear ODE along a twisted lift.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    c, expm, max_abs, max_abs_real, real_complex_structure, realify, realify_vec, to_complex_vec, CMat, CVec, RMat,
    RVec, I,
};
use crate::report::{ordered_max, Report};
use crate::space::{SymmetricSpace, TangentVector};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Independent random stream for sample `i` of a run seeded by `seed`.
pub fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i as u64 + 1);
    r
}

/// Evaluate `f` on `n` seeded samples in parallel, returning results in
/// sample order.
pub fn sample_map<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..n).into_par_iter().map(|i| f(i, &mut sample_rng(seed, i))).collect()
}

struct AkSample {
    metric: f64,
    curvature: f64,
    transport: f64,
}

/// Checks, over random samples, that `g_A(JX, JY) = −g_A(X, Y)`,
/// `R(JX, Y)Z = J R(X, Y)Z` and that parallel transport along geodesics
/// commutes with `J`.
pub fn verify_anti_kaehler(space: &SymmetricSpace, samples: usize, seed: u64, tol: f64) -> Result<Report> {
    if !space.is_complexified() {
        return Err(Error::Precondition("anti-Kaehler suite needs a complexified space".into()));
    }
    let realified = space.pair().algebra().complexification()?;
    let d = space.pair().algebra().dim();
    let jr = real_complex_structure(d);
    let results = sample_map(samples, seed, |_, rng| -> Result<AkSample> {
        let p = space.random_point(rng, 0.5)?;
        let x = space.random_tangent(rng, &p, 1.0);
        let y = space.random_tangent(rng, &p, 1.0);
        let z = space.random_tangent(rng, &p, 1.0);
        let jx = space.complex_structure(&x)?;
        let jy = space.complex_structure(&y)?;

        // (a) metric from Cartan-embedded tangent matrices
        let g = |a: &TangentVector, b: &TangentVector| -> Result<f64> {
            space.embedded_metric(p.cartan_image(), &space.embed_tangent(a)?, &space.embed_tangent(b)?)
        };
        let gxy = g(&x, &y)?;
        let metric = (g(&jx, &jy)? + gxy).abs() / gxy.abs().max(1.0);

        // (b) curvature in the realified algebra, J as a real matrix
        let rv = |v: &TangentVector| realify_vec(v.xi());
        let curv = |a: &RVec, b: &RVec, e: &RVec| -> RVec { -realified.bracket(&realified.bracket(a, b), e) };
        let lhs = curv(&(&jr * rv(&x)), &rv(&y), &rv(&z));
        let base = curv(&rv(&x), &rv(&y), &rv(&z));
        let rhs = &jr * &base;
        let curvature = (lhs - rhs).amax() / base.amax().max(1.0);

        // (c) real-linear transport along a geodesic with a twisted lift
        let v = space.random_tangent(rng, &p, 0.8);
        let t1: f64 = rand::Rng::random_range(rng, 0.2..1.5);
        let p_real = transport_twisted_real(space, &v, t1, rng)?;
        let j2 = real_complex_structure(space.dim_p());
        let transport = max_abs_real(&(&j2 * &p_real - &p_real * &j2)) / max_abs_real(&p_real).max(1.0);
        Ok(AkSample { metric, curvature, transport })
    });
    let mut metric = Vec::with_capacity(samples);
    let mut curvature = Vec::with_capacity(samples);
    let mut transport = Vec::with_capacity(samples);
    for r in results {
        let s = r?;
        metric.push(s.metric);
        curvature.push(s.curvature);
        transport.push(s.transport);
    }
    let mut report = Report::new("anti-kaehler", &space.name(), seed, samples, tol);
    report.record("metric_anti_isometry", ordered_max(&metric));
    report.record("curvature_j_linearity", ordered_max(&curvature));
    report.record("transport_j_commutator", ordered_max(&transport));
    report.notes.push("domains of exp are limited only by the matrix-exponential overflow guard".into());
    Ok(report.finish())
}

/// Parallel transport along `u -> γ_v(u t1)` computed as a real `2m × 2m`
/// matrix by RK4 on the realified transport equation, along the lift
/// `a(u) = b exp(u t1 ξ) exp(φ(u) κ)` with a random `κ ∈ k^c`. The result is
/// expressed in the frame of `b exp(t1 ξ)`.
pub fn transport_twisted_real<R: rand::Rng + ?Sized>(
    space: &SymmetricSpace,
    v: &TangentVector,
    t1: f64,
    rng: &mut R,
) -> Result<RMat> {
    let pair = space.pair();
    let alg = pair.algebra();
    let kappa = {
        let kb = pair.k_basis();
        let mut x = CVec::zeros(alg.dim());
        for j in 0..kb.ncols() {
            let w = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            x += to_complex_vec(&kb.column(j).into_owned()) * w;
        }
        x
    };
    let km = alg.element_matrix_c(&kappa);
    let vm = alg.element_matrix_c(v.xi()) * c(t1, 0.0);
    let b = v.base().rep().clone();
    let omega = 1.3;
    let phi = |u: f64| (omega * u).sin();
    let lift = |u: f64| -> Result<(CMat, CMat)> {
        let g = expm(&(&vm * c(u, 0.0)))?;
        let k = expm(&(&km * c(phi(u), 0.0)))?;
        let a = &b * &g * &k;
        let da = &b * &g * (&vm * &k + &km * &k * c(omega * (omega * u).cos(), 0.0));
        Ok((a, da))
    };
    let steps = 24;
    let m = space.dim_p();
    // transport the realified frame: columns are real basis vectors of p^c
    let y = real_transport_rk4(space, &lift, m, steps)?;
    // move to the transvection frame b exp(t1 ξ): coordinates get Ad(k(1))
    let k1 = expm(&(&km * c(phi(1.0), 0.0)))?;
    let ad = realify(&space.isotropy_action(&k1)?);
    Ok(ad * y)
}

fn real_transport_rk4<F>(space: &SymmetricSpace, lift: &F, m: usize, steps: usize) -> Result<RMat>
where
    F: Fn(f64) -> Result<(CMat, CMat)>,
{
    let pair = space.pair();
    let alg = pair.algebra();
    let rhs = |u: f64| -> Result<RMat> {
        let (a, da) = lift(u)?;
        let ainv = a.try_inverse().ok_or_else(|| Error::Numerical("singular lift".into()))?;
        let (omega, _) = alg.expand_c(&(ainv * da))?;
        let kappa = pair.project_k(&omega);
        let ad = alg.ad_matrix_c(&kappa);
        let mut op = CMat::zeros(m, m);
        for j in 0..m {
            let e = CVec::from_fn(m, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
            let col = pair.p_coords(&(&ad * pair.from_p_coords(&e)));
            op.set_column(j, &(-col));
        }
        Ok(realify(&op))
    };
    let h = 1.0 / steps as f64;
    let mut y = RMat::identity(2 * m, 2 * m);
    for s in 0..steps {
        let u = s as f64 * h;
        let m0 = rhs(u)?;
        let mh = rhs(u + 0.5 * h)?;
        let m1 = rhs(u + h)?;
        let k1 = &m0 * &y;
        let k2 = &mh * (&y + &k1 * (0.5 * h));
        let k3 = &mh * (&y + &k2 * (0.5 * h));
        let k4 = &m1 * (&y + &k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(y)
}

/// Differential of `exp_p` at `u` applied to `x`, as a tangent matrix of the
/// Cartan embedding. Central differences with one Richardson step; at
/// `u = 0` the exact differential (the identity) is used.
pub fn exp_differential_fd(space: &SymmetricSpace, u: &TangentVector, x: &TangentVector, h: f64) -> Result<CMat> {
    if u.is_zero() {
        return space.embed_tangent(x);
    }
    let f = |s: f64| -> Result<CMat> { Ok(space.exp(&u.add(&x.scale(s)))?.cartan_image().clone()) };
    let central = |s: f64| -> Result<CMat> { Ok((f(s)? - f(-s)?) / c(2.0 * s, 0.0)) };
    let d1 = central(h)?;
    let d2 = central(h / 2.0)?;
    Ok((d2 * c(4.0, 0.0) - d1) / c(3.0, 0.0))
}

/// Holomorphy of `exp_p`: compares `(exp_p)_{*u}(JX)` with `J (exp_p)_{*u} X`
/// where `J` on the Cartan embedding is multiplication by `i` (the embedding
/// is holomorphic). Sample 0 uses `u = 0`.
pub fn verify_exp_holomorphic(
    space: &SymmetricSpace,
    samples: usize,
    seed: u64,
    fd_step: f64,
    tol: f64,
) -> Result<Report> {
    if !space.is_complexified() {
        return Err(Error::Precondition("exp holomorphy needs a complexified space".into()));
    }
    let p = space.random_point(&mut sample_rng(seed, usize::MAX - 1), 0.4)?;
    let results = sample_map(samples, seed, |i, rng| -> Result<(f64, f64)> {
        let u = if i == 0 { space.tangent(&p, CVec::zeros(space.pair().algebra().dim()))? } else { space.random_tangent(rng, &p, 0.7) };
        let x = space.random_tangent(rng, &p, 1.0);
        let jx = space.complex_structure(&x)?;
        let dx = exp_differential_fd(space, &u, &x, fd_step)?;
        let djx = exp_differential_fd(space, &u, &jx, fd_step)?;
        let mismatch = max_abs(&(djx - &dx * I)) / max_abs(&dx).max(1.0);
        Ok((if i == 0 { mismatch } else { 0.0 }, mismatch))
    });
    let mut at_zero = Vec::new();
    let mut all = Vec::new();
    for r in results {
        let (z, m) = r?;
        at_zero.push(z);
        all.push(m);
    }
    let mut report = Report::new("exp-holomorphic", &space.name(), seed, samples, tol);
    report.record("differential_j_mismatch", ordered_max(&all));
    report.record("differential_j_mismatch_at_zero", ordered_max(&at_zero));
    if !(1e-8..=1e-2).contains(&fd_step) {
        report.notes.push(format!("conditioning warning: finite-difference step {fd_step:e} is outside [1e-8, 1e-2]"));
    }
    Ok(report.finish())
}
