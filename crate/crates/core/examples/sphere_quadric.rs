// The complexified round sphere lands on the quadric sum z_i^2 = r^2.

use antikaehler::holo::{complexify_map, sphere_inclusion_complexification, SphereInclusion};
use antikaehler::linalg::{c, max_abs_vec, RVec, C64};

pub fn run_example() {
    let r = 1.5;
    let p = RVec::from_vec(vec![0.0, 0.0, r]);
    let v = RVec::from_vec(vec![0.8, -0.3, 0.0]);
    let z = sphere_inclusion_complexification(r, &p, &v).expect("tangent data");
    let sum: C64 = z.iter().map(|w| w * w).sum();
    let taylor = complexify_map(&SphereInclusion { radius: r }, &p, &v, 1e-12).expect("entire germ");
    println!("f^c(v) = {:?}", z.iter().map(|w| (w.re, w.im)).collect::<Vec<_>>());
    println!("|sum z^2 - r^2| = {:.3e}", (sum - c(r * r, 0.0)).norm());
    println!("Taylor engine vs closed form: {:.3e} (order {})", max_abs_vec(&(&taylor.value - &z)), taylor.order);
    assert!((sum - c(r * r, 0.0)).norm() < 1e-12);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
