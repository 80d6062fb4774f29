// Closed-form complex Jacobi field against the real Jacobi ODE along a ray.

use antikaehler::jacobi::{jacobi_closed_form, jacobi_ode, JacobiData};
use antikaehler::linalg::{c, max_abs_vec};
use antikaehler::verify::sample_rng;
use antikaehler::catalog;

pub fn run_example() {
    let s = catalog::space("sl2c").expect("catalog space");
    let mut rng = sample_rng(5, 0);
    let p = s.random_point(&mut rng, 0.4).expect("point");
    let v = s.random_tangent(&mut rng, &p, 1.0);
    let geo = s.complex_geodesic(&p, &v).expect("geodesic");
    let y0 = s.p_coords(&s.random_tangent(&mut rng, &p, 1.0));
    let y1 = s.p_coords(&s.random_tangent(&mut rng, &p, 1.0));
    let data = JacobiData::new(geo, y0, y1).expect("data");
    for z in [c(1.0, 0.0), c(0.0, 1.0), c(0.8, -1.1)] {
        let cf = s.p_coords(&jacobi_closed_form(&s, &data, z).expect("closed form"));
        let ode = jacobi_ode(&s, &data, z, None).expect("ode");
        let rel = max_abs_vec(&(&cf - &ode.value)) / max_abs_vec(&cf);
        println!("z = {z}: relative gap {rel:.3e} (ODE error estimate {:.1e})", ode.error_estimate);
        assert!(rel < 1e-8);
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
