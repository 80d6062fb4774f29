// Anti-Kaehler identities of G^c/K^c on every catalog space.

use antikaehler::{catalog, verify};

pub fn run_example() {
    for name in catalog::pair_names() {
        let space = catalog::space(&format!("{name}c")).expect("catalog space");
        let report = verify::verify_anti_kaehler(&space, 200, 42, 1e-10).expect("suite runs");
        println!("{:>6}: pass={} residuals={:?}", report.space, report.pass, report.residuals);
        assert!(report.pass);
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
