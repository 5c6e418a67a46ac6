// scratch probe for the phi_minus continuation walk
use bifcc_core::dynamics::CubicParam;
use bifcc_core::param::{green_minus, green_plus, marking_involution};
use num_complex::Complex64;

fn main() {
    let p = marking_involution(&CubicParam::from_re(10.0, 0.0));
    println!("p = {:?}", p);
    for lam in [4.0, 2.0, 1.5, 1.3, 1.2, 1.1, 1.05, 1.02, 1.01, 1.005, 1.002, 1.001, 1.0005, 1.0001, 1.0] {
        let q = CubicParam::new(p.c * lam, p.v);
        let gm = green_minus(&q, 1024);
        let gp = green_plus(&q, 1024);
        let mut j = 0;
        let mut lvl = gm.value;
        while j <= 6 && lvl <= gp.value { lvl *= 3.0; j += 1; }
        println!("lam {:>8}: G- = {:>10.6} G+ = {:>10.6}  j >= {}  |phi| = {:.4}",
            lam, gm.value, gp.value, j, gm.value.exp());
    }
}
