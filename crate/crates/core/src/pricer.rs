//! Affine CGF, Lewis call prices, Black-Scholes utilities and implied
//! volatility smiles.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use parking_lot::{Mutex, RwLock};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::adams::adams_solve;
use crate::error::{Error, Result};
use crate::model::{classical_h, FourierArg, ModelParams};
use crate::pade::{build_pade, default_scan_limit, eval_pade, pole_scan, RationalApproximant};
use crate::quad::{gauss_legendre, integrate};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Gauss-Legendre nodes per forward-variance segment in `cgf`.
pub const CGF_NODES: usize = 64;

/// Relative tolerance of the Lewis integral.
pub const LEWIS_REL_TOL: f64 = 1e-8;

/// Upper integration limit of the Lewis integral.
pub const LEWIS_U_MAX: f64 = 500.0;

/// Width of the panels marched along the Lewis integration path.
const LEWIS_PANEL: f64 = 10.0;

/// A panel whose absolute contribution is below this multiple of `S`
/// ends the Lewis integration.
const LEWIS_TAIL: f64 = 1e-10;

/// Bracket of `implied_vol`.
pub const VOL_BOUNDS: (f64, f64) = (1e-6, 5.0);

/// Price tolerance of `implied_vol`.
pub const VOL_PRICE_TOL: f64 = 1e-10;

/// `g = -a(a+i)/2 + i rho nu a h + nu^2 h^2 / 2`, the Volterra integrand
/// expressed through `h` (so that `D^alpha h = g - lambda h`).
pub fn g_from_h(m: &ModelParams, a: FourierArg, h: Complex64) -> Complex64 {
    let nu = m.nu();
    -0.5 * a.quadratic() + I * m.rho() * nu * a.value() * h + 0.5 * nu * nu * h * h
}

/// Right-continuous piecewise-constant forward variance `xi(s)`, flat
/// beyond the last breakpoint and before the first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardVarianceCurve {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ForwardVarianceCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "forward variance curve needs matching nonempty grids, got {} times and {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("forward variance breakpoints must be finite, >= 0 and strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter("forward variances must be finite and positive".into()));
        }
        Ok(Self { times, values })
    }

    pub fn flat(xi: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![xi])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, s: f64) -> f64 {
        let idx = self.times.partition_point(|&t| t <= s);
        self.values[idx.saturating_sub(1)]
    }

    /// `(start, end, xi)` pieces covering `[0, horizon]`.
    pub fn segments(&self, horizon: f64) -> Vec<(f64, f64, f64)> {
        let mut cuts = vec![0.0];
        cuts.extend(self.times.iter().copied().filter(|&t| t > 0.0 && t < horizon));
        cuts.push(horizon);
        cuts.windows(2).map(|w| (w[0], w[1], self.value(w[0]))).collect()
    }

    /// `int_0^horizon xi(s) ds`.
    pub fn integral(&self, horizon: f64) -> f64 {
        self.segments(horizon).iter().map(|(a, b, x)| (b - a) * x).sum()
    }
}

/// `int_0^T xi(s) g(T - s) ds` with `n_nodes`-point Gauss-Legendre per
/// curve segment; `h` supplies `h(t)` on `(0, T]`.
pub fn cgf_with_nodes<F>(
    m: &ModelParams,
    a: FourierArg,
    horizon: f64,
    xi: &ForwardVarianceCurve,
    n_nodes: usize,
    mut h: F,
) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    check_horizon(horizon)?;
    let (x, w) = gauss_legendre(n_nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for (lo, hi, level) in xi.segments(horizon) {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut seg = Complex64::new(0.0, 0.0);
        for (xj, wj) in x.iter().zip(&w) {
            let s = mid + half * xj;
            seg += g_from_h(m, a, h(horizon - s)?) * *wj;
        }
        acc += seg * half * level;
    }
    Ok(acc)
}

/// `cgf_with_nodes` at the default node count.
pub fn cgf<F>(m: &ModelParams, a: FourierArg, horizon: f64, xi: &ForwardVarianceCurve, h: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    cgf_with_nodes(m, a, horizon, xi, CGF_NODES, h)
}

/// The `nu = 0` limit, `-a(a+i)/2 int_0^T xi`.
pub fn cgf_deterministic(a: FourierArg, horizon: f64, xi: &ForwardVarianceCurve) -> Result<Complex64> {
    check_horizon(horizon)?;
    Ok(-0.5 * a.quadratic() * xi.integral(horizon))
}

fn check_horizon(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("maturity T = {t} must be positive")))
    }
}

/// Variance dynamics fed to the pricer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceModel {
    /// `nu = 0`: variance follows the forward curve.
    Deterministic,
    Rough(ModelParams),
}

/// How `h(t; a)` is computed inside the CGF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HMethod {
    Pade(usize),
    Adams(usize),
    Classical,
}

impl fmt::Display for HMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HMethod::Pade(n) => write!(f, "pade{n}"),
            HMethod::Adams(n) => write!(f, "adams:{n}"),
            HMethod::Classical => write!(f, "classical"),
        }
    }
}

impl FromStr for HMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown pricing method '{s}'"));
        let s = s.trim();
        if s == "classical" {
            Ok(HMethod::Classical)
        } else if let Some(n) = s.strip_prefix("pade") {
            n.parse().map(HMethod::Pade).map_err(|_| bad())
        } else if let Some(n) = s.strip_prefix("adams:") {
            n.parse().map(HMethod::Adams).map_err(|_| bad())
        } else {
            Err(bad())
        }
    }
}

type PadeKey = ([u64; 6], usize);

/// Thread-safe memo of Pade builds keyed on `(params, a, n)`. Entries whose
/// build failed or whose denominator vanishes on `(0, nu 100^alpha]` are
/// stored as errors.
#[derive(Debug, Default)]
pub struct PadeCache {
    map: RwLock<HashMap<PadeKey, Result<Arc<RationalApproximant>>>>,
}

impl PadeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_build(&self, m: &ModelParams, a: FourierArg, n: usize) -> Result<Arc<RationalApproximant>> {
        let av = a.value();
        let key = (
            [m.hurst(), m.nu(), m.rho(), m.lam(), av.re, av.im].map(f64::to_bits),
            n,
        );
        if let Some(hit) = self.map.read().get(&key) {
            return hit.clone();
        }
        let built = build_pade(m, a, n).and_then(|r| match pole_scan(&r, default_scan_limit(m)).first() {
            Some(&y) => Err(Error::Pole(y)),
            None => Ok(Arc::new(r)),
        });
        self.map.write().entry(key).or_insert(built).clone()
    }
}

/// Pricing context: dynamics, forward variance, method and the caches
/// shared by every strike and maturity priced through it.
#[derive(Debug)]
pub struct Pricer {
    model: VarianceModel,
    xi: ForwardVarianceCurve,
    method: HMethod,
    fallback_steps: usize,
    cache: PadeCache,
    fallbacks: AtomicUsize,
}

/// A call price with its Lewis-integral diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LewisOutcome {
    pub price: f64,
    /// Price before clamping to the no-arbitrage bounds.
    pub raw_price: f64,
    pub integral: f64,
    pub error_estimate: f64,
    /// Upper end of the last panel integrated.
    pub u_end: f64,
    pub evaluations: usize,
}

impl LewisOutcome {
    pub fn relative_error(&self) -> f64 {
        self.error_estimate / self.integral.abs()
    }
}

/// One `(T, K)` cell of a smile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmileRow {
    pub maturity: f64,
    pub strike: f64,
    pub price: f64,
    pub implied_vol: f64,
    pub method: String,
    pub error: String,
}

impl Pricer {
    pub fn new(model: VarianceModel, xi: ForwardVarianceCurve, method: HMethod) -> Result<Self> {
        match (model, method) {
            (_, HMethod::Pade(n)) if n == 0 || n > crate::pade::MAX_PADE_ORDER => {
                return Err(Error::InvalidParameter(format!("Pade order {n} is out of range")))
            }
            (_, HMethod::Adams(n)) if n < 2 => {
                return Err(Error::InvalidParameter(format!("Adams needs at least 2 steps, got {n}")))
            }
            (VarianceModel::Rough(m), HMethod::Classical) if !m.is_classical() => {
                return Err(Error::InvalidParameter("classical method needs H = 1/2".into()))
            }
            _ => {}
        }
        Ok(Self { model, xi, method, fallback_steps: 1000, cache: PadeCache::new(), fallbacks: AtomicUsize::new(0) })
    }

    /// Adams step count used when a Pade build is rejected.
    pub fn with_fallback_steps(mut self, steps: usize) -> Self {
        self.fallback_steps = steps.max(2);
        self
    }

    pub fn method(&self) -> HMethod {
        self.method
    }

    pub fn model(&self) -> VarianceModel {
        self.model
    }

    pub fn curve(&self) -> &ForwardVarianceCurve {
        &self.xi
    }

    /// Number of CGF evaluations that fell back from Pade to Adams.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }

    /// `log E[exp(i a X_T)]`.
    pub fn cgf(&self, a: FourierArg, horizon: f64) -> Result<Complex64> {
        let m = match self.model {
            VarianceModel::Deterministic => return cgf_deterministic(a, horizon, &self.xi),
            VarianceModel::Rough(m) => m,
        };
        match self.method {
            HMethod::Pade(n) => match self.cache.get_or_build(&m, a, n) {
                Ok(r) => cgf(&m, a, horizon, &self.xi, |t| eval_pade(&r, t)),
                Err(_) => {
                    self.fallbacks.fetch_add(1, Ordering::Relaxed);
                    self.cgf_adams(&m, a, horizon, self.fallback_steps)
                }
            },
            HMethod::Adams(steps) => self.cgf_adams(&m, a, horizon, steps),
            HMethod::Classical => cgf(&m, a, horizon, &self.xi, |t| classical_h(&m, a, t)),
        }
    }

    fn cgf_adams(&self, m: &ModelParams, a: FourierArg, horizon: f64, steps: usize) -> Result<Complex64> {
        check_horizon(horizon)?;
        let grid = adams_solve(m, a, horizon, steps)?;
        cgf(m, a, horizon, &self.xi, |t| Ok(grid.interpolate(t)))
    }

    /// `phi(u - i/2) = exp(cgf(u - i/2))` for one maturity, memoized on `u`.
    pub fn lewis_transform(&self, horizon: f64) -> LewisTransform<'_> {
        LewisTransform { pricer: self, horizon, memo: Mutex::new(HashMap::new()) }
    }

    pub fn call(&self, spot: f64, strike: f64, horizon: f64) -> Result<f64> {
        Ok(self.call_detailed(spot, strike, horizon)?.price)
    }

    pub fn call_detailed(&self, spot: f64, strike: f64, horizon: f64) -> Result<LewisOutcome> {
        self.lewis_transform(horizon).call(spot, strike)
    }

    pub fn put(&self, spot: f64, strike: f64, horizon: f64) -> Result<f64> {
        self.lewis_transform(horizon).put(spot, strike)
    }

    /// Prices and implied volatilities on the `(T, K)` grid, rows in
    /// `(T, K)` lexicographic order. Cell failures land in the error column.
    pub fn smile(&self, spot: f64, strikes: &[f64], maturities: &[f64]) -> Result<Vec<SmileRow>> {
        if strikes.is_empty() || maturities.is_empty() {
            return Err(Error::InvalidParameter("smile needs nonempty strike and maturity grids".into()));
        }
        check_spot_strike(spot, strikes[0])?;
        let mut ts = maturities.to_vec();
        ts.sort_by(f64::total_cmp);
        let mut ks = strikes.to_vec();
        ks.sort_by(f64::total_cmp);
        let label = self.method.to_string();
        let rows = ts
            .par_iter()
            .flat_map_iter(|&t| {
                let transform = self.lewis_transform(t);
                let cells: Vec<SmileRow> = ks
                    .par_iter()
                    .map(|&k| {
                        let mut row = SmileRow {
                            maturity: t,
                            strike: k,
                            price: f64::NAN,
                            implied_vol: f64::NAN,
                            method: label.clone(),
                            error: String::new(),
                        };
                        match transform.call(spot, k) {
                            Ok(out) => {
                                row.price = out.price;
                                match implied_vol(spot, k, t, out.price) {
                                    Ok(v) => {
                                        row.implied_vol = v;
                                        if v == 0.0 {
                                            row.error = "price at intrinsic bound".into();
                                        }
                                    }
                                    Err(e) => row.error = e.to_string(),
                                }
                            }
                            Err(e) => row.error = e.to_string(),
                        }
                        row
                    })
                    .collect();
                cells
            })
            .collect();
        Ok(rows)
    }
}

/// The Lewis integrand's transform for one maturity.
pub struct LewisTransform<'p> {
    pricer: &'p Pricer,
    horizon: f64,
    memo: Mutex<HashMap<u64, Complex64>>,
}

impl LewisTransform<'_> {
    pub fn phi(&self, u: f64) -> Result<Complex64> {
        if let Some(v) = self.memo.lock().get(&u.to_bits()) {
            return Ok(*v);
        }
        let v = self.pricer.cgf(FourierArg::lewis(u)?, self.horizon)?.exp();
        self.memo.lock().insert(u.to_bits(), v);
        Ok(v)
    }

    /// `int_0^inf Re[exp(-i u k) phi(u - i/2)] / (u^2 + 1/4) du`, `k = log(K/S)`.
    fn integral(&self, spot: f64, strike: f64) -> Result<(f64, f64, f64, usize)> {
        check_spot_strike(spot, strike)?;
        let k = (strike / spot).ln();
        let scale = (spot * strike).sqrt() / PI;
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let mut integrand = |u: f64| match self.phi(u) {
            Ok(p) => Complex64::new(((-I * u * k).exp() * p).re / (u * u + 0.25), 0.0),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        };
        let mut total = 0.0_f64;
        let mut error = 0.0_f64;
        let mut evaluations = 0;
        let mut lo = 0.0;
        loop {
            let hi = (lo + LEWIS_PANEL).min(LEWIS_U_MAX);
            let abs_tol = 0.1 * LEWIS_REL_TOL * total.abs();
            let panel = integrate(&mut integrand, lo, hi, abs_tol, LEWIS_REL_TOL, 200);
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            total += panel.value.re;
            error += panel.error;
            evaluations += panel.evaluations;
            lo = hi;
            let tail = scale * panel.abs_integral < LEWIS_TAIL * spot;
            if tail || hi >= LEWIS_U_MAX {
                if !tail || error > LEWIS_REL_TOL * total.abs() {
                    return Err(Error::Integration(format!(
                        "Lewis integral at K = {strike}, T = {}: relative error {:e} by u = {hi}",
                        self.horizon,
                        error / total.abs()
                    )));
                }
                return Ok((total, error, hi, evaluations));
            }
        }
    }

    pub fn call(&self, spot: f64, strike: f64) -> Result<LewisOutcome> {
        let (integral, err, u_end, evaluations) = self.integral(spot, strike)?;
        let raw = spot - (spot * strike).sqrt() / PI * integral;
        Ok(LewisOutcome {
            price: raw.clamp((spot - strike).max(0.0), spot),
            raw_price: raw,
            integral,
            error_estimate: err,
            u_end,
            evaluations,
        })
    }

    /// Put from the same integral, `P = K - sqrt(SK)/pi * integral`.
    pub fn put(&self, spot: f64, strike: f64) -> Result<f64> {
        let (integral, ..) = self.integral(spot, strike)?;
        let raw = strike - (spot * strike).sqrt() / PI * integral;
        Ok(raw.clamp((strike - spot).max(0.0), strike))
    }
}

fn check_spot_strike(spot: f64, strike: f64) -> Result<()> {
    if spot > 0.0 && strike > 0.0 && spot.is_finite() && strike.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("spot {spot} and strike {strike} must be positive")))
    }
}

/// Lewis call price for one `(K, T)` cell.
pub fn lewis_call(
    model: VarianceModel,
    xi: &ForwardVarianceCurve,
    spot: f64,
    strike: f64,
    horizon: f64,
    method: HMethod,
) -> Result<f64> {
    Pricer::new(model, xi.clone(), method)?.call(spot, strike, horizon)
}

/// Lewis put price for one `(K, T)` cell.
pub fn lewis_put(
    model: VarianceModel,
    xi: &ForwardVarianceCurve,
    spot: f64,
    strike: f64,
    horizon: f64,
    method: HMethod,
) -> Result<f64> {
    Pricer::new(model, xi.clone(), method)?.put(spot, strike, horizon)
}

/// Smile table for the given grids.
pub fn smile(
    model: VarianceModel,
    xi: &ForwardVarianceCurve,
    spot: f64,
    strikes: &[f64],
    maturities: &[f64],
    method: HMethod,
) -> Result<Vec<SmileRow>> {
    Pricer::new(model, xi.clone(), method)?.smile(spot, strikes, maturities)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Zero-rate Black-Scholes call.
pub fn bs_price(spot: f64, strike: f64, horizon: f64, vol: f64) -> f64 {
    let intrinsic = (spot - strike).max(0.0);
    let sd = vol * horizon.sqrt();
    if !(sd > 0.0) {
        return intrinsic;
    }
    let n = std_normal();
    let d1 = (spot / strike).ln() / sd + 0.5 * sd;
    let price = spot * n.cdf(d1) - strike * n.cdf(d1 - sd);
    price.max(intrinsic)
}

/// `d C / d vol`.
pub fn bs_vega(spot: f64, strike: f64, horizon: f64, vol: f64) -> f64 {
    let sd = vol * horizon.sqrt();
    if !(sd > 0.0) {
        return 0.0;
    }
    let d1 = (spot / strike).ln() / sd + 0.5 * sd;
    spot * std_normal().pdf(d1) * horizon.sqrt()
}

/// Black-Scholes implied volatility on `VOL_BOUNDS` by Newton steps
/// safeguarded with bisection. A price at the intrinsic bound returns 0.
pub fn implied_vol(spot: f64, strike: f64, horizon: f64, price: f64) -> Result<f64> {
    check_spot_strike(spot, strike)?;
    check_horizon(horizon)?;
    let intrinsic = (spot - strike).max(0.0);
    if !(price >= intrinsic - VOL_PRICE_TOL && price <= spot + VOL_PRICE_TOL) {
        return Err(Error::NoSolution(format!(
            "price {price} is outside the no-arbitrage bounds [{intrinsic}, {spot}]"
        )));
    }
    if price <= intrinsic + 1e-15 * spot {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = VOL_BOUNDS;
    let f = |v: f64| bs_price(spot, strike, horizon, v) - price;
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo > VOL_PRICE_TOL || f_hi < -VOL_PRICE_TOL {
        return Err(Error::NoSolution(format!("price {price} is not attained for vol in [{lo}, {hi}]")));
    }
    let mut v = ((2.0 * PI / horizon).sqrt() * price / spot).clamp(lo, hi);
    for _ in 0..200 {
        let fv = f(v);
        if fv == 0.0 {
            return Ok(v);
        }
        if fv > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let vega = bs_vega(spot, strike, horizon, v);
        let newton = v - fv / vega;
        let next = if vega > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - v).abs() <= 1e-15 * v || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        v = next;
    }
    if f(v).abs() <= VOL_PRICE_TOL {
        Ok(v)
    } else {
        Err(Error::NoSolution(format!("implied vol iteration stalled at {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_lookup_is_right_continuous() {
        let c = ForwardVarianceCurve::new(vec![0.0, 1.0, 2.0], vec![0.01, 0.02, 0.03]).unwrap();
        assert_eq!(c.value(0.5), 0.01);
        assert_eq!(c.value(1.0), 0.02);
        assert_eq!(c.value(9.0), 0.03);
        assert!((c.integral(2.5) - (0.01 + 0.02 + 0.015)).abs() < 1e-15);
        assert_eq!(c.segments(1.5).len(), 2);
        assert!(ForwardVarianceCurve::new(vec![1.0, 1.0], vec![0.1, 0.1]).is_err());
        assert!(ForwardVarianceCurve::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn bs_reference_value() {
        assert!((bs_price(1.0, 1.0, 1.0, 0.2) - 0.079_655_674_554_057_96).abs() < 1e-15);
        assert!((bs_price(1.2, 1.0, 1.0, 0.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn implied_vol_round_trip() {
        for &(k, t, v) in &[(1.0, 1.0, 0.2), (0.7, 0.1, 0.5), (1.5, 2.0, 0.05), (1.1, 0.25, 1.3)] {
            let p = bs_price(1.0, k, t, v);
            assert!((implied_vol(1.0, k, t, p).unwrap() - v).abs() < 1e-9, "{k} {t} {v}");
        }
        assert_eq!(implied_vol(1.0, 0.8, 1.0, 0.2).unwrap(), 0.0);
        assert!(matches!(implied_vol(1.0, 0.8, 1.0, 0.1), Err(Error::NoSolution(_))));
        assert!(matches!(implied_vol(1.0, 0.8, 1.0, 1.5), Err(Error::NoSolution(_))));
    }

    #[test]
    fn method_labels_round_trip() {
        for m in [HMethod::Pade(5), HMethod::Adams(1000), HMethod::Classical] {
            assert_eq!(m.to_string().parse::<HMethod>().unwrap(), m);
        }
        assert!("hinf".parse::<HMethod>().is_err());
    }

    #[test]
    fn g_from_h_at_zero() {
        let m = ModelParams::realistic();
        let a = FourierArg::from_parts(3.0, -0.5).unwrap();
        assert_eq!(g_from_h(&m, a, Complex64::new(0.0, 0.0)), -0.5 * a.quadratic());
    }

    #[test]
    fn deterministic_price_is_black_scholes() {
        let xi = ForwardVarianceCurve::flat(0.04).unwrap();
        let p = Pricer::new(VarianceModel::Deterministic, xi, HMethod::Pade(3)).unwrap();
        let c = p.call(1.0, 1.1, 0.5).unwrap();
        assert!((c - bs_price(1.0, 1.1, 0.5, 0.2)).abs() < 1e-9, "{c}");
    }

    #[test]
    fn martingale_cgf_vanishes() {
        let xi = ForwardVarianceCurve::flat(0.04).unwrap();
        let p = Pricer::new(VarianceModel::Rough(ModelParams::realistic()), xi, HMethod::Pade(4)).unwrap();
        let a = FourierArg::from_parts(0.0, -1.0).unwrap();
        assert!(p.cgf(a, 1.0).unwrap().norm() < 1e-14);
    }
}
