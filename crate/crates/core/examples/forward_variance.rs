//! Piecewise-constant forward variance: the same rough model priced under
//! a flat and an upward-sloping curve, against the deterministic limit.

use mlrh::model::ModelParams;
use mlrh::pricer::{implied_vol, lewis_call, ForwardVarianceCurve, HMethod, VarianceModel};

fn main() -> mlrh::Result<()> {
    let flat = ForwardVarianceCurve::flat(0.04)?;
    let upward = ForwardVarianceCurve::new(vec![0.0, 0.25, 0.5, 1.0], vec![0.02, 0.03, 0.04, 0.06])?;
    let rough = VarianceModel::Rough(ModelParams::realistic());
    for (name, xi) in [("flat", &flat), ("upward", &upward)] {
        for t in [0.25, 1.0, 2.0] {
            let c = lewis_call(rough, xi, 1.0, 1.0, t, HMethod::Pade(5))?;
            let d = lewis_call(VarianceModel::Deterministic, xi, 1.0, 1.0, t, HMethod::Pade(5))?;
            println!(
                "{name:>6} T = {t}: ATM iv rough {:.6}, deterministic {:.6}, sqrt(mean xi) {:.6}",
                implied_vol(1.0, 1.0, t, c)?,
                implied_vol(1.0, 1.0, t, d)?,
                (xi.integral(t) / t).sqrt()
            );
        }
    }
    Ok(())
}
