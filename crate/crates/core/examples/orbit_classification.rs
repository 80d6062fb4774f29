// Principal G-orbit on SL(2,C)/SO(2,C) and the orbit G/K itself.

use antikaehler::linalg::{CVec, RVec};
use antikaehler::orbit::{classify_orbit, OrbitGermRequest};
use antikaehler::catalog;

pub fn run_example() {
    let s = catalog::space("sl2c").expect("catalog space");
    let req = OrbitGermRequest::through_polar(s.clone(), &RVec::from_vec(vec![0.7, 0.2]), 3, 7).expect("request");
    let v = classify_orbit(&req).expect("verdict");
    println!("regular w: dim {} flags {:?}", v.orbit_dim, v.flags);
    assert!(v.flag("principal") && v.flag("equifocal") && v.flag("isoparametric"));
    let zero = classify_orbit(&OrbitGermRequest::new(s, CVec::zeros(2), 2, 1).expect("request")).expect("verdict");
    println!("w = 0: dim {} flags {:?}", zero.orbit_dim, zero.flags);
    assert!(zero.flag("totally_geodesic") && !zero.flag("principal"));
}

#[allow(dead_code)]
fn main() {
    run_example();
}
