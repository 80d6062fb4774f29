// Complex focal radii of an orbit germ by the closed form and by the
// argument principle.

use antikaehler::contour::Window;
use antikaehler::focal::{focal_radii_closed_form, germ_focal_radii, multiset_distance, simultaneous_eigen};
use antikaehler::linalg::{CMat, RVec};
use antikaehler::orbit::{orbit_base, orbit_germ_at, OrbitGermRequest};
use antikaehler::catalog;

pub fn run_example() {
    let s = catalog::space("so31c").expect("catalog space");
    let req = OrbitGermRequest::through_polar(s.clone(), &RVec::from_vec(vec![0.5, 0.2, 0.1]), 2, 0).expect("request");
    let base = orbit_base(&req).expect("base");
    let n = s.pair().algebra().matrix_size();
    let (germ, v, _) = orbit_germ_at(&s, &base, &CMat::identity(n, n)).expect("germ");
    let window = Window::square(3.0);
    let pairs = simultaneous_eigen(&germ, &v).expect("curvature adapted");
    let closed = focal_radii_closed_form(&pairs, window);
    let generic = germ_focal_radii(&germ, &v, window, 1).expect("zeros");
    for r in &generic.radii {
        println!("z = {:+.12} {:+.12}i  multiplicity {}", r.re, r.im, r.multiplicity);
    }
    let gap = multiset_distance(&closed, &generic).expect("same count");
    println!("closed form vs argument principle: {gap:.3e}; winding {:?}", generic.winding_count);
    assert!(gap < 1e-8);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
