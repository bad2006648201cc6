//! Evaluates E_{alpha,beta}(z) across the Taylor, contour and asymptotic
//! regimes and along the ray used by the Riccati solution.

use std::f64::consts::PI;

use mlrh::special_fn::{mittag_leffler, ml_asymptotic, MittagLefflerParams};
use num_complex::Complex64;

fn main() -> mlrh::Result<()> {
    let p = MittagLefflerParams::classical(0.55)?;
    println!("{:>8} {:>8} {:>24} {:>24}", "|z|", "arg/pi", "Re E", "Im E");
    for r in [0.5, 2.0, 10.0, 39.0, 41.0, 1e3] {
        for theta in [1.0, 0.8] {
            let z = Complex64::from_polar(r, theta * PI);
            let e = mittag_leffler(p, z)?;
            println!("{r:>8} {theta:>8} {:>24.16e} {:>24.16e}", e.re, e.im);
        }
    }

    // the asymptotic expansion alone, with a fixed number of terms
    let z = Complex64::new(-50.0, 0.0);
    for terms in [1, 3, 6] {
        let v = ml_asymptotic(p, z, terms)?;
        println!("E(-50) with {terms} asymptotic terms: {:.16e}", v.re);
    }
    println!("E(-50) full:                     {:.16e}", mittag_leffler(p, z)?.re);
    Ok(())
}
