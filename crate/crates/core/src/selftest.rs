//! Invariant suite behind `mlrh selftest`.
//!
//! The Gamma-dependent checks take the reciprocal Gamma function as an
//! argument so that a corrupted implementation can be injected.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adams::adams_solve;
use crate::model::{classical_h, riccati_rhs, riccati_roots, FourierArg, ModelParams};
use crate::pade::{build_pade, eval_pade, series_match_check};
use crate::pricer::{bs_price, implied_vol, ForwardVarianceCurve, HMethod, Pricer, VarianceModel};
use crate::series::{large_time_coeffs, small_time_coeffs};
use crate::special_fn::{mittag_leffler, ml_asymptotic, reciprocal_gamma, MittagLefflerParams, SWITCH_RADIUS};

/// Outcome of one named invariant.
#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Check = fn(&dyn Fn(f64) -> f64) -> std::result::Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("gamma.factorials", gamma_factorials),
    ("gamma.reflection", gamma_reflection),
    ("ml.exponential", ml_exponential),
    ("ml.handoff_continuity", ml_handoff),
    ("model.root_factorization", root_factorization),
    ("model.sector", sector),
    ("series.small_time_start", small_time_start),
    ("pade.two_point_match", pade_match),
    ("pade.classical_accuracy", pade_classical),
    ("adams.classical_reduction", adams_classical),
    ("pricer.martingale", martingale),
    ("pricer.black_scholes_limit", bs_limit),
    ("pricer.put_call_parity", parity),
    ("pricer.implied_vol_round_trip", iv_round_trip),
];

/// Names of all invariants, in execution order.
pub fn invariant_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Runs every invariant with the library's reciprocal Gamma.
pub fn run() -> Vec<InvariantResult> {
    run_with_gamma(&reciprocal_gamma)
}

/// Runs every invariant, feeding `rgamma` to the Gamma-dependent checks.
pub fn run_with_gamma(rgamma: &dyn Fn(f64) -> f64) -> Vec<InvariantResult> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let outcome = check(rgamma);
            let elapsed = start.elapsed();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            InvariantResult { name, passed, detail, elapsed }
        })
        .collect()
}

fn ensure(ok: bool, detail: String) -> std::result::Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gamma_factorials(rg: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let mut fact = 1.0;
    let mut worst: f64 = 0.0;
    for n in 0..=20 {
        if n > 0 {
            fact *= n as f64;
        }
        worst = worst.max((rg(n as f64 + 1.0) * fact - 1.0).abs());
    }
    ensure(worst < 1e-13, format!("max relative error {worst:.3e}"))
}

fn gamma_reflection(rg: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let worst = (1..40)
        .map(|i| {
            let x = i as f64 / 40.0;
            (rg(x) * rg(1.0 - x) * PI / (PI * x).sin() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    ensure(worst < 1e-13, format!("max relative error {worst:.3e}"))
}

fn ml_exponential(rg: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let p = MittagLefflerParams::classical(1.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..=6 {
        for j in 0..16 {
            let z = Complex64::from_polar(0.5 * i as f64, PI * j as f64 / 8.0);
            let mut series = Complex64::new(0.0, 0.0);
            let mut zk = Complex64::new(1.0, 0.0);
            for k in 0..60 {
                series += zk * rg(k as f64 + 1.0);
                zk *= z;
            }
            let lib = mittag_leffler(p, z).map_err(|e| e.to_string())?;
            let scale = z.exp().norm().max(1.0);
            worst = worst.max((series - z.exp()).norm() / scale).max((lib - z.exp()).norm() / scale);
        }
    }
    ensure(worst < 1e-12, format!("max error {worst:.3e}"))
}

fn ml_handoff(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    for &alpha in &[0.55, 0.75, 0.95] {
        let p = MittagLefflerParams::classical(alpha).map_err(|e| e.to_string())?;
        for &frac in &[0.75, 0.875, 1.0] {
            let unit = Complex64::from_polar(1.0, frac * PI);
            let inside = mittag_leffler(p, unit * (SWITCH_RADIUS * (1.0 - 1e-12))).map_err(|e| e.to_string())?;
            let outside = mittag_leffler(p, unit * SWITCH_RADIUS).map_err(|e| e.to_string())?;
            let asym = ml_asymptotic(p, unit * SWITCH_RADIUS, 8).map_err(|e| e.to_string())?;
            worst = worst.max((inside - outside).norm()).max((inside - asym).norm());
        }
    }
    ensure(worst < 1e-8, format!("max jump {worst:.3e}"))
}

fn draw(rng: &mut ChaCha8Rng) -> (ModelParams, FourierArg) {
    let m = ModelParams::new(
        rng.gen_range(0.02..0.48),
        rng.gen_range(0.1..1.0),
        rng.gen_range(-0.9..0.5),
        rng.gen_range(0.0..2.0),
    )
    .expect("drawn parameters are valid");
    let a = FourierArg::from_parts(rng.gen_range(0.0..10.0), rng.gen_range(-1.0..0.0)).expect("drawn argument is valid");
    (m, a)
}

fn root_factorization(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (m, a) = draw(&mut rng);
        let r = riccati_roots(&m, a).map_err(|e| e.to_string())?;
        let h = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let nu = m.nu();
        let lhs = riccati_rhs(&m, a, h);
        let rhs = 0.5 * (nu * h - r.r_minus) * (nu * h - r.r_plus);
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }
    ensure(worst < 1e-12, format!("max relative residual {worst:.3e}"))
}

fn sector(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let m = ModelParams::realistic();
    let mut worst = PI;
    for i in 0..=40 {
        for j in 0..=20 {
            let a = FourierArg::from_parts(0.25 * i as f64, -(j as f64) / 20.0).map_err(|e| e.to_string())?;
            match riccati_roots(&m, a) {
                Ok(r) => worst = worst.min((-r.a_root).arg().abs()),
                Err(crate::Error::Degenerate(_)) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    ensure(worst >= 0.75 * PI - 1e-12, format!("min |arg(-A)| = {worst:.6}"))
}

fn small_time_start(rg: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let m = ModelParams::realistic();
    let a = FourierArg::from_parts(3.0, -0.5).map_err(|e| e.to_string())?;
    let s = small_time_coeffs(&m, a, 1).map_err(|e| e.to_string())?;
    let want = -0.5 * a.quadratic() * rg(1.0 + m.alpha());
    let err = (s.coeffs[0] - want).norm() / want.norm();
    ensure(err < 1e-13, format!("relative error in b_1 {err:.3e}"))
}

fn pade_match(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (m, a) = draw(&mut rng);
        for n in 2..=5 {
            let r = build_pade(&m, a, n).map_err(|e| e.to_string())?;
            let beta = small_time_coeffs(&m, a, n).map_err(|e| e.to_string())?.scaled(m.nu());
            let gamma = large_time_coeffs(&m, a, n - 1).map_err(|e| e.to_string())?.scaled(m.nu());
            worst = worst.max(series_match_check(&r, &beta, &gamma).max_mismatch);
        }
    }
    ensure(worst < 1e-9, format!("max mismatch {worst:.3e}"))
}

fn pade_classical(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let m = ModelParams::new(0.5, 0.4, -0.65, 1.0).map_err(|e| e.to_string())?;
    let a = FourierArg::from_parts(3.0, -0.5).map_err(|e| e.to_string())?;
    let r = build_pade(&m, a, 5).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let t = 10f64.powf(-2.0 + 3.0 * i as f64 / 199.0);
        let exact = classical_h(&m, a, t).map_err(|e| e.to_string())?;
        worst = worst.max((eval_pade(&r, t).map_err(|e| e.to_string())? - exact).norm());
    }
    ensure(worst < 0.05, format!("max error of h^(5,5) {worst:.3e}"))
}

fn adams_classical(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let m = ModelParams::new(0.5, 0.4, -0.65, 1.0).map_err(|e| e.to_string())?;
    let a = FourierArg::from_parts(3.0, -0.5).map_err(|e| e.to_string())?;
    let g = adams_solve(&m, a, 2.0, 400).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (&t, h) in g.t.iter().zip(&g.h) {
        worst = worst.max((h - classical_h(&m, a, t).map_err(|e| e.to_string())?).norm());
    }
    ensure(worst < 1e-4, format!("max error {worst:.3e}"))
}

fn martingale(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let xi = ForwardVarianceCurve::flat(0.04).map_err(|e| e.to_string())?;
    let a = FourierArg::from_parts(0.0, -1.0).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (m, _) = draw(&mut rng);
        for method in [HMethod::Pade(4), HMethod::Adams(100)] {
            let p = Pricer::new(VarianceModel::Rough(m), xi.clone(), method).map_err(|e| e.to_string())?;
            worst = worst.max(p.cgf(a, 1.0).map_err(|e| e.to_string())?.norm());
        }
    }
    ensure(worst < 1e-8, format!("max |cgf(-i)| {worst:.3e}"))
}

fn bs_limit(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let xi = ForwardVarianceCurve::flat(0.04).map_err(|e| e.to_string())?;
    let m = ModelParams::new(0.05, 1e-4, 0.0, 0.0).map_err(|e| e.to_string())?;
    let p = Pricer::new(VarianceModel::Rough(m), xi, HMethod::Pade(5)).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in [0.8, 1.0, 1.2] {
        let c = p.call(1.0, k, 1.0).map_err(|e| e.to_string())?;
        worst = worst.max((implied_vol(1.0, k, 1.0, c).map_err(|e| e.to_string())? - 0.2).abs());
    }
    ensure(worst < 1e-3, format!("max implied vol gap {worst:.3e}"))
}

fn parity(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let xi = ForwardVarianceCurve::flat(0.04).map_err(|e| e.to_string())?;
    let p = Pricer::new(VarianceModel::Rough(ModelParams::realistic()), xi, HMethod::Pade(4)).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in [0.9, 1.1] {
        let c = p.call(1.0, k, 0.5).map_err(|e| e.to_string())?;
        let put = p.put(1.0, k, 0.5).map_err(|e| e.to_string())?;
        worst = worst.max((c - put - (1.0 - k)).abs());
    }
    ensure(worst < 1e-8, format!("max parity gap {worst:.3e}"))
}

fn iv_round_trip(_: &dyn Fn(f64) -> f64) -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    for &(k, t, v) in &[(1.0, 1.0, 0.2), (0.8, 0.25, 0.35), (1.3, 2.0, 0.1)] {
        let vol = implied_vol(1.0, k, t, bs_price(1.0, k, t, v)).map_err(|e| e.to_string())?;
        worst = worst.max((vol - v).abs());
    }
    ensure(worst < 1e-9, format!("max round-trip error {worst:.3e}"))
}
