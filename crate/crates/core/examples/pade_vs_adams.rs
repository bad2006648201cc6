//! Builds the rational approximants h^(n,n) and compares them with the
//! fractional Adams benchmark on a log-spaced grid.

use mlrh::adams::adams_at;
use mlrh::model::{FourierArg, ModelParams};
use mlrh::pade::{build_pade, default_scan_limit, eval_pade, pole_scan};

fn main() -> mlrh::Result<()> {
    let m = ModelParams::new(0.2, 0.4, -0.65, 1.0)?;
    let a = FourierArg::from_parts(3.0, -0.5)?;
    let ts: Vec<f64> = (0..30).map(|i| 0.01 * 1000f64.powf(i as f64 / 29.0)).collect();
    let bench: Vec<_> = ts.iter().map(|&t| adams_at(&m, a, t, 1000)).collect::<Result<_, _>>()?;
    for n in 2..=5 {
        let r = build_pade(&m, a, n)?;
        let poles = pole_scan(&r, default_scan_limit(&m));
        let err = ts
            .iter()
            .zip(&bench)
            .map(|(&t, b)| eval_pade(&r, t).map(|h| (h - b).norm()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("n = {n}: max |h^(n,n) - Adams(1000)| = {err:.3e}, poles on the ray: {}", poles.len());
    }
    Ok(())
}
