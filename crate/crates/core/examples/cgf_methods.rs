//! The cumulant generating function int xi(s) g(T - s) ds computed from
//! each h provider, and the martingale condition cgf(-i) = 0.

use mlrh::model::{FourierArg, ModelParams};
use mlrh::pricer::{ForwardVarianceCurve, HMethod, Pricer, VarianceModel};

fn main() -> mlrh::Result<()> {
    let model = VarianceModel::Rough(ModelParams::realistic());
    let xi = ForwardVarianceCurve::flat(0.04)?;
    let a = FourierArg::from_parts(3.0, -0.5)?;
    for method in [HMethod::Pade(3), HMethod::Pade(5), HMethod::Adams(200), HMethod::Adams(1000)] {
        let p = Pricer::new(model, xi.clone(), method)?;
        let v = p.cgf(a, 1.0)?;
        let mart = p.cgf(FourierArg::from_parts(0.0, -1.0)?, 1.0)?;
        println!("{method:>11}: cgf(3 - i/2) = {v:.10}, |cgf(-i)| = {:.1e}", mart.norm());
    }
    Ok(())
}
