//! Prices a strike/maturity grid with the Lewis formula and inverts the
//! prices to Black-Scholes implied volatilities.

use mlrh::model::ModelParams;
use mlrh::pricer::{ForwardVarianceCurve, HMethod, Pricer, VarianceModel};

fn main() -> mlrh::Result<()> {
    let xi = ForwardVarianceCurve::flat(0.04)?;
    let pricer = Pricer::new(VarianceModel::Rough(ModelParams::realistic()), xi, HMethod::Pade(5))?;
    let strikes: Vec<f64> = (0..=8).map(|i| 0.8 + 0.05 * i as f64).collect();
    let rows = pricer.smile(1.0, &strikes, &[0.1, 0.5, 1.0])?;
    println!("{:>6} {:>6} {:>14} {:>10}", "T", "K", "call", "iv");
    for r in rows {
        println!("{:>6} {:>6.2} {:>14.10} {:>10.6} {}", r.maturity, r.strike, r.price, r.implied_vol, r.error);
    }
    println!("Fourier nodes priced by the Adams fallback: {}", pricer.fallbacks());
    Ok(())
}
