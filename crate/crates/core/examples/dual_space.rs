// The dual exp_o(sqrt(-1) p) of the round sphere is totally geodesic with
// constant negative curvature.

use antikaehler::orbit::{dual_at_point, line_dual_membership};
use antikaehler::catalog;

pub fn run_example() {
    let s = catalog::space("so3c").expect("catalog space");
    let d = dual_at_point(&s, &s.origin(), 5, 3).expect("dual samples");
    println!("second fundamental form {:.3e}", d.second_fundamental_form);
    println!("induced curvature {:?}", d.induced_curvature);
    println!("normalized curvature {:?}", d.normalized_curvature);
    let m = line_dual_membership(&s, 10).expect("membership");
    println!("complexified geodesic line stays in the dual: {m:.3e}");
    assert!(d.normalized_curvature.iter().all(|k| (k + 0.5).abs() < 1e-6));
}

#[allow(dead_code)]
fn main() {
    run_example();
}
