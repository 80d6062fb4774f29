// The polar map v -> exp_p(Jv) of the hyperbolic plane sends tangent lines
// of geodesics to complex geodesics; a ray is scanned for rank drops (the
// first lies at t |v| sqrt(-K) = pi/2).

use antikaehler::linalg::{c, CVec};
use antikaehler::{catalog, orbit};

pub fn run_example() {
    let real = catalog::space("sl2").expect("catalog space");
    let o = real.origin();
    let v = real.tangent_from_p(&o, &CVec::from_vec(vec![c(0.6, 0.0), c(0.2, 0.0)])).expect("tangent");
    let g = real.random_group_element(&mut antikaehler::verify::sample_rng(1, 0), 0.5).expect("group element");
    let (geo, equi) = orbit::polar_residuals(&real, &v, 0.4, 0.9, &g).expect("residuals");
    println!("|Phi(t gamma'(s)) - gamma^c(s + it)| = {geo:.3e}, equivariance {equi:.3e}");
    let crit = orbit::polar_critical_parameters(&real, &v, 8.0, 40, 1e-2).expect("scan");
    println!("candidate critical parameters along the ray: {crit:?}");
    assert!(geo < 1e-9 && equi < 1e-9);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
