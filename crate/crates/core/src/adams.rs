//! Fractional Adams-Bashforth-Moulton predictor-corrector for
//! `D^alpha h = F(h)`, `h(0) = 0`, on a uniform grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{riccati_rhs, FourierArg, ModelParams};
use crate::special_fn::reciprocal_gamma;

/// Blow-up guard on `|h_j|`.
pub const OVERFLOW_LIMIT: f64 = 1e10;

/// Solution on the uniform grid `t_j = j T / N`.
#[derive(Debug, Clone)]
pub struct HGrid {
    pub t: Vec<f64>,
    pub h: Vec<Complex64>,
    pub params: ModelParams,
    pub a: FourierArg,
}

impl HGrid {
    pub fn steps(&self) -> usize {
        self.t.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.t.last().expect("grid has at least two points")
    }

    pub fn step(&self) -> f64 {
        self.horizon() / self.steps() as f64
    }

    /// Value at an arbitrary `t` in `[0, T]` by four-point Lagrange
    /// interpolation in `sigma = t^alpha`, the variable in which the
    /// solution is smooth near the origin.
    pub fn interpolate(&self, t: f64) -> Complex64 {
        let n = self.steps();
        let dt = self.step();
        let x = (t / dt).clamp(0.0, n as f64);
        let nearest = x.round();
        if (x - nearest).abs() < 1e-12 {
            return self.h[nearest as usize];
        }
        let base = (x.floor() as usize).saturating_sub(1).min(n.saturating_sub(3));
        let alpha = self.params.alpha();
        let sigma = t.powf(alpha);
        let nodes: Vec<usize> = (base..(base + 4).min(n + 1)).collect();
        let s: Vec<f64> = nodes.iter().map(|&j| self.t[j].powf(alpha)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &j) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (k, _) in nodes.iter().enumerate() {
                if k != i {
                    w *= (sigma - s[k]) / (s[i] - s[k]);
                }
            }
            acc += self.h[j] * w;
        }
        acc
    }
}

/// Runs `steps` predictor-corrector steps on `[0, horizon]`.
pub fn adams_solve(m: &ModelParams, a: FourierArg, horizon: f64, steps: usize) -> Result<HGrid> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("horizon T = {horizon} must be positive")));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 steps, got {steps}")));
    }
    let alpha = m.alpha();
    let dt = horizon / steps as f64;
    let t: Vec<f64> = (0..=steps).map(|j| j as f64 * horizon / steps as f64).collect();
    let rhs = |h: Complex64| riccati_rhs(m, a, h);

    // m^alpha and m^(alpha+1), m = 0..=steps+1
    let pw: Vec<f64> = (0..=steps + 1).map(|j| (j as f64).powf(alpha)).collect();
    let pw1: Vec<f64> = (0..=steps + 1).map(|j| (j as f64).powf(alpha + 1.0)).collect();
    // predictor weight for lag d = k - j
    let wp: Vec<f64> = (0..=steps).map(|d| pw[d + 1] - pw[d]).collect();
    // corrector weight for lag d = k - j, j >= 1
    let wc: Vec<f64> = (0..steps).map(|d| pw1[d + 2] + pw1[d] - 2.0 * pw1[d + 1]).collect();
    let c_pred = dt.powf(alpha) * reciprocal_gamma(alpha + 1.0);
    let c_corr = dt.powf(alpha) * reciprocal_gamma(alpha + 2.0);

    let mut h = Vec::with_capacity(steps + 1);
    let mut f = Vec::with_capacity(steps + 1);
    h.push(Complex64::new(0.0, 0.0));
    f.push(rhs(h[0]));
    for k in 0..steps {
        let mut pred = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            pred += f[j] * wp[k - j];
        }
        let kf = k as f64;
        let mut corr = f[0] * (pw1[k] - (kf - alpha) * pw[k + 1]);
        for j in 1..=k {
            corr += f[j] * wc[k - j];
        }
        let hp = pred * c_pred;
        let next = (rhs(hp) + corr) * c_corr;
        if !(next.norm() <= OVERFLOW_LIMIT) {
            return Err(Error::Overflow { step: k + 1, t: t[k + 1] });
        }
        h.push(next);
        f.push(rhs(next));
    }
    Ok(HGrid { t, h, params: *m, a })
}

/// Final value of `adams_solve(m, a, t, steps)`.
pub fn adams_at(m: &ModelParams, a: FourierArg, t: f64, steps: usize) -> Result<Complex64> {
    let grid = adams_solve(m, a, t, steps)?;
    Ok(*grid.h.last().expect("nonempty grid"))
}
