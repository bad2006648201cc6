//! Short-time and long-time expansions of h(t; a), and the
//! Mittag-Leffler approximant h_inf, at the default rough parameters.

use mlrh::model::{riccati_roots, FourierArg, ModelParams};
use mlrh::series::{eval_series, h_infinity, large_time_coeffs, small_time_coeffs};

fn main() -> mlrh::Result<()> {
    let m = ModelParams::realistic();
    let a = FourierArg::from_parts(3.0, -0.5)?;
    let roots = riccati_roots(&m, a)?;
    println!("A = {:.6}, r- = {:.6}, r+ = {:.6}", roots.a_root, roots.r_minus, roots.r_plus);

    let small = small_time_coeffs(&m, a, 6)?;
    let large = large_time_coeffs(&m, a, 2)?;
    for (k, b) in small.coeffs.iter().enumerate() {
        println!("b_{} = {b:.6e}", k + 1);
    }
    for (k, g) in large.coeffs.iter().enumerate() {
        println!("g_{k} = {g:.6e}");
    }

    println!("{:>8} {:>28} {:>28} {:>28}", "t", "short-time", "long-time", "h_inf");
    for t in [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0] {
        println!(
            "{t:>8} {:>28.6} {:>28.6} {:>28.6}",
            eval_series(&small, t),
            eval_series(&large, t),
            h_infinity(&m, a, t)?
        );
    }
    Ok(())
}
