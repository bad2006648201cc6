//! At H = 1/2 the Riccati solution is known in closed form; the rational
//! approximants and the Adams scheme are checked against it.

use mlrh::adams::adams_at;
use mlrh::model::{classical_h, FourierArg, ModelParams};
use mlrh::pade::{build_pade, eval_pade};

fn main() -> mlrh::Result<()> {
    let m = ModelParams::new(0.5, 0.4, -0.65, 1.0)?;
    let a = FourierArg::from_parts(3.0, -0.5)?;
    let ts = [0.01, 0.1, 1.0, 3.0, 10.0];
    for n in 2..=5 {
        let r = build_pade(&m, a, n)?;
        let mut worst = 0.0_f64;
        for &t in &ts {
            worst = worst.max((eval_pade(&r, t)? - classical_h(&m, a, t)?).norm());
        }
        println!("h^({n},{n}): max error {worst:.3e}");
    }
    for steps in [100, 200, 400, 800] {
        let err = (adams_at(&m, a, 2.0, steps)? - classical_h(&m, a, 2.0)?).norm();
        println!("Adams with {steps:>3} steps at t = 2: error {err:.3e}");
    }
    Ok(())
}
