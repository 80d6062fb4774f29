//! Acceptance criteria, one pass/fail line each.

use std::process::Command;

use antikaehler::catalog;
use antikaehler::contour::Window;
use antikaehler::focal::{
    focal_determinant, focal_product, focal_radii_closed_form, germ_focal_radii, multiset_distance, simultaneous_eigen,
};
use antikaehler::holo::{complexify_map, geodesic_circle_isometry_check, sphere_inclusion_complexification, SphereInclusion};
use antikaehler::jacobi::{bridge_real_operators, jacobi_closed_form, jacobi_ode, JacobiData};
use antikaehler::linalg::{c, max_abs_vec, CMat, RVec, C64};
use antikaehler::orbit::{
    classify_orbit, dual_at_point, orbit_base, orbit_germ_at, reflective_zero_section_residual, verify_dual, verify_polar,
    OrbitGermRequest,
};
use antikaehler::verify::{sample_rng, verify_anti_kaehler, verify_exp_holomorphic};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn anti_kaehler_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["sl2c", "so3c"] {
        let r = verify_anti_kaehler(&catalog::space(name).unwrap(), 1000, 11, 1e-10).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_residual());
    }
    check(worst <= 1e-10, format!("max residual {worst:.3e} (tol 1e-10)"))
}

fn exp_is_holomorphic() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["sl2c", "so3c"] {
        let r = verify_exp_holomorphic(&catalog::space(name).unwrap(), 100, 12, 1e-5, 1e-6).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_residual());
    }
    check(worst <= 1e-6, format!("max commutator {worst:.3e} (tol 1e-6)"))
}

fn random_sphere_data<R: Rng>(rng: &mut R, n: usize) -> (f64, RVec, RVec) {
    let r = rng.random_range(0.5..2.0);
    let mut p = RVec::from_fn(n + 1, |_, _| rng.random_range(-1.0..1.0));
    p *= r / p.norm();
    let mut v = RVec::from_fn(n + 1, |_, _| rng.random_range(-1.0..1.0));
    v -= &p * (p.dot(&v) / (r * r));
    v *= rng.random_range(0.0..2.0) * r / v.norm().max(1e-300);
    (r, p, v)
}

fn sphere_quadric() -> Outcome {
    let mut rng = sample_rng(13, 0);
    let (mut quadric, mut engine): (f64, f64) = (0.0, 0.0);
    for k in 0..1000 {
        let (r, p, v) = random_sphere_data(&mut rng, 2 + k % 3);
        let z = sphere_inclusion_complexification(r, &p, &v).map_err(|e| e.to_string())?;
        let sum: C64 = z.iter().map(|w| w * w).sum();
        quadric = quadric.max((sum - c(r * r, 0.0)).norm());
        if k % 10 == 0 {
            let ext = complexify_map(&SphereInclusion { radius: r }, &p, &v, 1e-12).map_err(|e| e.to_string())?;
            engine = engine.max(max_abs_vec(&(ext.value - &z)));
        }
    }
    check(
        quadric <= 1e-12 && engine <= 1e-8,
        format!("|sum z^2 - r^2| {quadric:.3e} (tol 1e-12), Taylor vs closed form {engine:.3e} (tol 1e-8)"),
    )
}

fn metric_extension() -> Outcome {
    let r = geodesic_circle_isometry_check(&catalog::space("so3c").unwrap(), 100, 14, 1e-7).map_err(|e| e.to_string())?;
    check(r.pass, format!("pullback mismatch {:.3e} (tol 1e-7)", r.max_residual()))
}

fn polar_map() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in catalog::pair_names() {
        let r = verify_polar(&catalog::space(name).unwrap(), 200, 15, 1e-9).map_err(|e| e.to_string())?;
        worst = worst.max(r.residuals["polar_geodesic_mismatch"]);
    }
    check(worst <= 1e-9, format!("max |Phi(gamma_*) - gamma^c| {worst:.3e} over 200 samples per space (tol 1e-9)"))
}

/// Round-sphere curvature from antisymmetric 3x3 generators with the metric
/// `-tr(XY)` and `R(X,Y)Y = -[[X,Y],Y]`.
fn sphere_oracle() -> f64 {
    let gen = |i: usize, j: usize| {
        let mut m = CMat::zeros(3, 3);
        m[(i, j)] = c(1.0, 0.0);
        m[(j, i)] = c(-1.0, 0.0);
        m
    };
    let (x, y) = (gen(0, 2), gen(1, 2));
    let g = |a: &CMat, b: &CMat| -(a * b).trace().re;
    let br = |a: &CMat, b: &CMat| a * b - b * a;
    let r = -br(&br(&x, &y), &y);
    g(&r, &x) / (g(&x, &x) * g(&y, &y) - g(&x, &y).powi(2))
}

fn dual_space() -> Outcome {
    let mut second: f64 = 0.0;
    for name in ["sl2c", "so3c"] {
        let r = verify_dual(&catalog::space(name).unwrap(), 10, 16, 1e-7).map_err(|e| e.to_string())?;
        second = second.max(r.residuals["second_fundamental_form"]);
    }
    let s = catalog::space("so3c").unwrap();
    let expected = -sphere_oracle();
    let d = dual_at_point(&s, &s.origin(), 10, 17).map_err(|e| e.to_string())?;
    let curv = d.normalized_curvature.iter().map(|k| (k - expected).abs()).fold(0.0, f64::max);
    check(
        second <= 1e-7 && curv <= 1e-6 && expected < 0.0,
        format!("second fundamental form {second:.3e} (tol 1e-7); dual curvature vs {expected} off by {curv:.3e} (tol 1e-6)"),
    )
}

fn jacobi_closed_form_vs_ode() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, name) in ["sl2c", "so3c", "so21c", "so31c", "sl2c"].iter().enumerate() {
        let s = catalog::space(name).unwrap();
        let mut rng = sample_rng(18, k);
        for _ in 0..10 {
            let p = s.random_point(&mut rng, 0.4).map_err(|e| e.to_string())?;
            let v = s.random_tangent(&mut rng, &p, 1.0);
            let geo = s.complex_geodesic(&p, &v).map_err(|e| e.to_string())?;
            let y0 = s.p_coords(&s.random_tangent(&mut rng, &p, 1.0));
            let y1 = s.p_coords(&s.random_tangent(&mut rng, &p, 1.0));
            let data = JacobiData::new(geo, y0, y1).map_err(|e| e.to_string())?;
            let z = loop {
                let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                if z.norm() <= 2.0 {
                    break z;
                }
            };
            let cf = s.p_coords(&jacobi_closed_form(&s, &data, z).map_err(|e| e.to_string())?);
            let ode = jacobi_ode(&s, &data, z, None).map_err(|e| e.to_string())?;
            worst = worst.max(max_abs_vec(&(&cf - &ode.value)) / max_abs_vec(&cf).max(1e-300));
        }
    }
    check(worst <= 1e-8, format!("max relative error {worst:.3e} over 50 rays (tol 1e-8)"))
}

fn bridge() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, name) in catalog::pair_names().iter().enumerate() {
        let s = catalog::space(&format!("{name}c")).unwrap();
        let mut rng = sample_rng(19, k);
        for _ in 0..50 {
            let v = s.p_coords(&s.random_tangent(&mut rng, &s.origin(), 1.0));
            let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            worst = worst.max(bridge_real_operators(&s, &v, z).map_err(|e| e.to_string())?.residual);
        }
    }
    check(worst <= 1e-10, format!("max operator residual {worst:.3e} over 200 (v, z) (tol 1e-10)"))
}

fn focal_radii() -> Outcome {
    let cases: [(&str, &[f64]); 5] = [
        ("sl2c", &[0.7, 0.2]),
        ("sl2c", &[-0.3, 0.9]),
        ("so3c", &[0.4, 0.9]),
        ("so21c", &[0.6, -0.5]),
        ("so31c", &[0.5, 0.2, 0.1]),
    ];
    let window = Window::square(3.0);
    let (mut det_gap, mut method_gap): (f64, f64) = (0.0, 0.0);
    let mut winding_ok = true;
    let mut total = 0;
    for (k, (name, u)) in cases.iter().enumerate() {
        let s = catalog::space(name).unwrap();
        let req = OrbitGermRequest::through_polar(s.clone(), &RVec::from_column_slice(u), 2, 0).map_err(|e| e.to_string())?;
        let base = orbit_base(&req).map_err(|e| e.to_string())?;
        let n = s.pair().algebra().matrix_size();
        let (germ, v, _) = orbit_germ_at(&s, &base, &CMat::identity(n, n)).map_err(|e| e.to_string())?;
        let pairs = simultaneous_eigen(&germ, &v).map_err(|e| e.to_string())?;
        let mut rng = sample_rng(20, k);
        for _ in 0..20 {
            let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let d = focal_determinant(&germ, &v, z).map_err(|e| e.to_string())?;
            det_gap = det_gap.max((d - focal_product(&pairs, z)).norm() / d.norm().max(1.0));
        }
        let closed = focal_radii_closed_form(&pairs, window);
        let generic = germ_focal_radii(&germ, &v, window, 1).map_err(|e| e.to_string())?;
        method_gap = method_gap.max(multiset_distance(&closed, &generic).unwrap_or(f64::INFINITY));
        winding_ok &= generic.winding_count == Some(closed.total_multiplicity() as i64)
            && generic.winding_count == Some(generic.total_multiplicity() as i64);
        total += closed.total_multiplicity();
    }
    check(
        det_gap <= 1e-9 && method_gap <= 1e-8 && winding_ok && total > 0,
        format!(
            "det vs product {det_gap:.3e} (tol 1e-9); closed vs argument principle {method_gap:.3e} (tol 1e-8); winding conserved: {winding_ok} ({total} radii)"
        ),
    )
}

fn orbit_classification() -> Outcome {
    let s = catalog::space("sl2c").unwrap();
    let req = OrbitGermRequest::through_polar(s.clone(), &RVec::from_vec(vec![0.7, 0.2]), 10, 21).map_err(|e| e.to_string())?;
    let v = classify_orbit(&req).map_err(|e| e.to_string())?;
    let flags = ["flat_section", "curvature_adapted", "equifocal", "isoparametric", "principal"];
    let all = flags.iter().all(|f| v.flag(f));
    let worst = flags.iter().filter(|f| **f != "principal").map(|f| v.residuals[*f]).fold(0.0, f64::max);
    let zero = reflective_zero_section_residual(&s).map_err(|e| e.to_string())?;
    check(
        all && worst <= 1e-6 && v.focal.len() >= 10 && zero <= 1e-8,
        format!(
            "flags {:?}; max residual {worst:.3e} over {} points (tol 1e-6); zero-section shape {zero:.3e} (tol 1e-8)",
            v.flags,
            v.focal.len()
        ),
    )
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 3] = [
        &["verify", "--space", "so3c", "--suite", "polar", "--samples", "50", "--seed", "5"],
        &["focal", "--space", "sl2c", "--orbit-w", "[0.7,0,0.2]", "--window", "3", "--grid", "16"],
        &["orbit", "--space", "sl2c", "--w", "[1,0,0.3]", "--samples", "3", "--seed", "7"],
    ];
    let mut differing = Vec::new();
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (rep, threads) in ["1", "2", "4"].iter().enumerate() {
            let out = dir.path().join(format!("run{k}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_akc"))
                .args(*args)
                .arg("--out")
                .arg(if k == 1 { out.clone() } else { out.with_extension("json") })
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            if status.status.code() != Some(0) {
                return Err(format!("{args:?} exited with {:?}", status.status.code()));
            }
            let bytes = if k == 1 {
                let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
                names.sort();
                names.iter().flat_map(|p| std::fs::read(p).unwrap()).collect::<Vec<u8>>()
            } else {
                std::fs::read(out.with_extension("json")).map_err(|e| e.to_string())?
            };
            outputs.push(bytes);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(args[0]);
        }
    }
    check(differing.is_empty(), format!("3 runs each of verify, focal, orbit; differing: {differing:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("anti-Kaehler identities", anti_kaehler_identities),
        ("exp is holomorphic", exp_is_holomorphic),
        ("sphere quadric", sphere_quadric),
        ("isometric metric extension", metric_extension),
        ("polar map and complex geodesics", polar_map),
        ("dual space", dual_space),
        ("complex Jacobi field vs real ODE", jacobi_closed_form_vs_ode),
        ("complex/real operator bridge", bridge),
        ("complex focal radii", focal_radii),
        ("orbit classification", orbit_classification),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{secs:.1}s]", k + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
