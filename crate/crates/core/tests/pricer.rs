//! Lewis pricing against an independent Gil-Pelaez inversion, plus
//! no-arbitrage and limit properties.

use mlrh::adams::adams_at;
use mlrh::model::{FourierArg, ModelParams};
use mlrh::pricer::{
    bs_price, cgf, implied_vol, lewis_call, lewis_put, smile, ForwardVarianceCurve, HMethod, Pricer, VarianceModel,
};
use mlrh::quad::integrate;
use mlrh::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn flat() -> ForwardVarianceCurve {
    ForwardVarianceCurve::flat(0.04).unwrap()
}

fn rough() -> VarianceModel {
    VarianceModel::Rough(ModelParams::realistic())
}

fn heston() -> VarianceModel {
    VarianceModel::Rough(ModelParams::new(0.5, 0.4, -0.65, 1.0).unwrap())
}

/// `C = S P1 - K P2` with the two exercise probabilities obtained by
/// Gil-Pelaez inversion of `E[exp(i u log(S_T/S))]`.
fn gil_pelaez_call(p: &Pricer, spot: f64, strike: f64, horizon: f64) -> f64 {
    let k = (strike / spot).ln();
    let prob = |shift: f64| {
        let f = |u: f64| {
            let phi = p.cgf(FourierArg::from_parts(u, shift).unwrap(), horizon).unwrap().exp();
            let v = (Complex64::new(0.0, -u * k).exp() * phi / Complex64::new(0.0, u)).re;
            Complex64::new(v, 0.0)
        };
        let r = integrate(f, 0.0, 200.0, 1e-13, 1e-11, 4000);
        assert!(r.converged, "Gil-Pelaez integral did not converge");
        0.5 + r.value.re / PI
    };
    spot * prob(-1.0) - strike * prob(0.0)
}

#[test]
fn lewis_matches_gil_pelaez_in_the_classical_model() {
    let p = Pricer::new(heston(), flat(), HMethod::Classical).unwrap();
    for (k, t) in [(0.8, 0.5), (1.0, 1.0), (1.25, 1.0), (1.1, 0.25)] {
        let lewis = p.call(1.0, k, t).unwrap();
        let oracle = gil_pelaez_call(&p, 1.0, k, t);
        assert!((lewis - oracle).abs() < 1e-7, "K {k} T {t}: Lewis {lewis}, Gil-Pelaez {oracle}");
    }
}

#[test]
fn lewis_matches_gil_pelaez_in_the_rough_model() {
    let p = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap();
    for (k, t) in [(0.9, 1.0), (1.0, 0.5), (1.15, 1.0)] {
        let lewis = p.call(1.0, k, t).unwrap();
        let oracle = gil_pelaez_call(&p, 1.0, k, t);
        assert!((lewis - oracle).abs() < 1e-7, "K {k} T {t}: Lewis {lewis}, Gil-Pelaez {oracle}");
    }
}

#[test]
fn put_call_parity() {
    for method in [HMethod::Pade(5), HMethod::Adams(1000)] {
        for k in [0.7, 0.95, 1.0, 1.3] {
            let c = lewis_call(rough(), &flat(), 1.0, k, 0.5, method).unwrap();
            let p = lewis_put(rough(), &flat(), 1.0, k, 0.5, method).unwrap();
            assert!((c - p - (1.0 - k)).abs() < 1e-9, "{method} K {k}: C - P = {}", c - p);
        }
    }
}

#[test]
fn deterministic_variance_is_black_scholes_with_integrated_variance() {
    let xi = ForwardVarianceCurve::new(vec![0.0, 0.5], vec![0.04, 0.09]).unwrap();
    let t = 1.0;
    let vol = (xi.integral(t) / t).sqrt();
    for k in [0.8, 1.0, 1.2] {
        let got = lewis_call(VarianceModel::Deterministic, &xi, 1.0, k, t, HMethod::Pade(5)).unwrap();
        let want = bs_price(1.0, k, t, vol);
        assert!((got - want).abs() < 1e-10, "K {k}: {got} vs {want}");
    }
}

#[test]
fn vanishing_vol_of_vol_gives_a_flat_smile() {
    let m = VarianceModel::Rough(ModelParams::new(0.05, 1e-4, 0.0, 0.0).unwrap());
    let strikes: Vec<f64> = (0..=8).map(|i| 0.8 + 0.05 * i as f64).collect();
    let rows = smile(m, &flat(), 1.0, &strikes, &[0.25, 1.0], HMethod::Pade(5)).unwrap();
    assert_eq!(rows.len(), 18);
    for r in &rows {
        assert!((r.implied_vol - 0.2).abs() < 1e-3, "{r:?}");
        assert!(r.error.is_empty());
    }
}

#[test]
fn call_prices_are_decreasing_and_convex_in_strike() {
    let p = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap();
    let ks: Vec<f64> = (0..=16).map(|i| 0.6 + 0.05 * i as f64).collect();
    let c: Vec<f64> = ks.iter().map(|&k| p.call(1.0, k, 0.5).unwrap()).collect();
    for w in c.windows(2) {
        assert!(w[1] < w[0]);
    }
    for w in c.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] > -1e-12);
    }
}

#[test]
fn tiny_strike_call_is_worth_spot_minus_strike() {
    let p = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap();
    let k = 1e-4;
    let c = p.call(1.0, k, 1.0).unwrap();
    assert!((c - (1.0 - k)).abs() < 1e-8, "{c}");
}

#[test]
fn negative_correlation_gives_negative_skew() {
    let p = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap();
    let t = 0.5;
    let iv = |k: f64| implied_vol(1.0, k, t, p.call(1.0, k, t).unwrap()).unwrap();
    let skew = (iv(1.02) - iv(0.98)) / 0.04;
    assert!(skew < 0.0, "ATM skew {skew}");
}

#[test]
fn pade_and_adams_cgf_agree() {
    // measured relative gap 2.5e-5 at this point, with Adams converged to 1e-7
    let m = ModelParams::realistic();
    let a = FourierArg::from_parts(3.0, -0.5).unwrap();
    let pade = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap().cgf(a, 1.0).unwrap();
    let adams = cgf(&m, a, 1.0, &flat(), |t| adams_at(&m, a, t, 1000)).unwrap();
    let rel = (pade - adams).norm() / adams.norm();
    assert!(rel < 5e-5, "relative gap {rel:e}");
}

#[test]
fn pade_and_adams_prices_agree_at_the_money() {
    let pade = lewis_call(rough(), &flat(), 1.0, 1.0, 1.0, HMethod::Pade(5)).unwrap();
    let adams = lewis_call(rough(), &flat(), 1.0, 1.0, 1.0, HMethod::Adams(1000)).unwrap();
    assert!((pade - adams).abs() < 1e-5, "{pade} vs {adams}");
}

#[test]
fn lewis_integral_meets_its_tolerance() {
    let p = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap();
    let out = p.call_detailed(1.0, 1.0, 1.0).unwrap();
    assert!(out.relative_error() < 1e-8, "{out:?}");
    assert!(out.u_end <= 500.0);
    assert_eq!(p.fallbacks(), 0);
}

#[test]
fn smile_rows_are_sorted_by_maturity_then_strike() {
    let rows = smile(rough(), &flat(), 1.0, &[1.1, 0.9, 1.0], &[1.0, 0.25], HMethod::Pade(4)).unwrap();
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.maturity, r.strike)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
    assert!(rows.iter().all(|r| r.method == "pade4"));
}

#[test]
fn method_names_round_trip() {
    for m in [HMethod::Pade(3), HMethod::Adams(1000), HMethod::Classical] {
        assert_eq!(m.to_string().parse::<HMethod>().unwrap(), m);
    }
    assert!("pade".parse::<HMethod>().is_err());
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(Pricer::new(rough(), flat(), HMethod::Classical).is_err());
    assert!(Pricer::new(rough(), flat(), HMethod::Pade(0)).is_err());
    assert!(ForwardVarianceCurve::new(vec![0.0, 0.0], vec![0.04, 0.04]).is_err());
    assert!(ForwardVarianceCurve::flat(-0.01).is_err());
    assert!(matches!(implied_vol(1.0, 1.0, 1.0, 1.5), Err(Error::NoSolution(_))));
    let p = Pricer::new(rough(), flat(), HMethod::Pade(5)).unwrap();
    assert!(p.call(1.0, 1.0, 0.0).is_err());
    assert!(p.call(-1.0, 1.0, 1.0).is_err());
}

#[test]
fn forward_variance_curve_is_right_continuous() {
    let xi = ForwardVarianceCurve::new(vec![0.0, 1.0], vec![0.04, 0.09]).unwrap();
    assert_eq!(xi.value(0.999), 0.04);
    assert_eq!(xi.value(1.0), 0.09);
    assert!((xi.integral(2.0) - 0.13).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn martingale_condition(h in 0.0..=0.5f64, nu in 0.05..1.5f64, rho in -0.99..0.99f64, lam in 0.0..5.0f64, t in 0.05..3.0f64) {
        let m = ModelParams::new(h, nu, rho, lam).unwrap();
        let p = Pricer::new(VarianceModel::Rough(m), flat(), HMethod::Pade(5)).unwrap();
        let v = p.cgf(FourierArg::from_parts(0.0, -1.0).unwrap(), t).unwrap();
        prop_assert!(v.norm() < 1e-8, "cgf(-i) = {v}");
    }

    #[test]
    fn implied_vol_inverts_black_scholes(k in 0.5..2.0f64, t in 0.05..5.0f64, vol in 0.02..1.5f64) {
        let price = bs_price(1.0, k, t, vol);
        prop_assume!(price - (1.0 - k).max(0.0) > 1e-12);
        let back = implied_vol(1.0, k, t, price).unwrap();
        prop_assert!((bs_price(1.0, k, t, back) - price).abs() < 1e-10);
    }
}
