//! Orbit verdict invariants across the catalog.

use antikaehler::catalog;
use antikaehler::focal::simultaneous_eigen;
use antikaehler::linalg::{CMat, CVec, RVec};
use antikaehler::orbit::{
    classify_orbit, classify_orbit_with, orbit_base, orbit_elements, orbit_germ_at, OrbitGermRequest, ORBIT_TOL,
};
use antikaehler::verify::sample_rng;

const CASES: [(&str, &[f64]); 4] = [
    ("sl2c", &[0.7, 0.2]),
    ("so3c", &[0.4, 0.9]),
    ("so21c", &[0.6, -0.5]),
    ("so31c", &[0.5, 0.2, 0.1]),
];

fn request(name: &str, u: &[f64], samples: usize, seed: u64) -> OrbitGermRequest {
    OrbitGermRequest::through_polar(catalog::space(name).unwrap(), &RVec::from_column_slice(u), samples, seed).unwrap()
}

#[test]
fn residuals_invariant_under_moving_the_sample_set() {
    let req = request("sl2c", &[0.7, 0.2], 3, 4);
    let elements = orbit_elements(&req.space, 3, 4).unwrap();
    let g = req.space.random_group_element(&mut sample_rng(99, 0), 0.5).unwrap();
    let moved: Vec<CMat> = elements.iter().map(|h| &g * h).collect();
    let a = classify_orbit_with(&req, &elements).unwrap();
    let b = classify_orbit_with(&req, &moved).unwrap();
    assert_eq!(a.flags, b.flags);
    for key in ["flat_section", "curvature_adapted", "equifocal", "isoparametric", "shape_fd_vs_exact"] {
        assert!((a.residuals[key] - b.residuals[key]).abs() <= 2.0 * ORBIT_TOL, "{key}");
    }
}

#[test]
fn isoparametric_implies_equifocal_and_principal_is_curvature_adapted() {
    for (name, u) in CASES {
        let v = classify_orbit(&request(name, u, 3, 5)).unwrap();
        if v.flag("isoparametric") {
            assert!(v.flag("equifocal"), "{name}");
        }
        if v.flag("principal") {
            assert!(v.flag("curvature_adapted"), "{name}");
            let req = request(name, u, 2, 5);
            let base = orbit_base(&req).unwrap();
            let n = req.space.pair().algebra().matrix_size();
            let (germ, nv, _) = orbit_germ_at(&req.space, &base, &CMat::identity(n, n)).unwrap();
            assert!(simultaneous_eigen(&germ, &nv).is_ok(), "{name}");
        }
    }
}

#[test]
fn identical_germs_are_trivially_equifocal() {
    let req = request("so31c", &[0.5, 0.2, 0.1], 2, 0);
    let n = req.space.pair().algebra().matrix_size();
    let id = CMat::identity(n, n);
    let v = classify_orbit_with(&req, &[id.clone(), id]).unwrap();
    assert!(v.flag("equifocal"));
    assert_eq!(v.residuals["equifocal"], 0.0);
}

#[test]
fn zero_orbit_is_reflective_and_not_principal() {
    for name in ["sl2c", "so3c"] {
        let s = catalog::space(name).unwrap();
        let m = s.dim_p();
        let v = classify_orbit(&OrbitGermRequest::new(s, CVec::zeros(m), 2, 1).unwrap()).unwrap();
        assert!(v.flag("totally_geodesic") && v.flag("reflective_zero_section"), "{name}");
        assert!(!v.flag("principal"), "{name}");
    }
}
