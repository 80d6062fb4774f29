// The complexified equator S^1 -> S^2 pulls the ambient g_A back to the
// intrinsic g_A of the complexified circle.

use antikaehler::{catalog, holo};

pub fn run_example() {
    let space = catalog::space("so3c").expect("catalog space");
    let report = holo::geodesic_circle_isometry_check(&space, 50, 7, 1e-7).expect("check runs");
    println!("pullback mismatch {:.3e}, pass={}", report.max_residual(), report.pass);
    assert!(report.pass);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
