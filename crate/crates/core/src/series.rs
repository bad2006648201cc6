//! Short-time (`t^{j alpha}`) and long-time (`t^{-k alpha}`) expansions of
//! the Riccati solution, plus the Mittag-Leffler approximant `h_inf`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{riccati_roots, FourierArg, ModelParams};
use crate::special_fn::{mittag_leffler, reciprocal_gamma, MittagLefflerParams};

/// Default highest order for coefficient vectors; beyond it the Gamma
/// ratios and convolution sums lose double precision.
pub const MAX_ORDER: usize = 24;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Coefficients `b_1..b_n` of `t^{j alpha}`.
    SmallTime,
    /// Coefficients `g_0..g_n` of `t^{-k alpha}`.
    LargeTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    pub kind: SeriesKind,
    pub coeffs: Vec<Complex64>,
    pub alpha: f64,
}

impl ComplexSeries {
    /// Power of `t^alpha` multiplying the `i`-th stored coefficient.
    fn exponent(&self, i: usize) -> f64 {
        match self.kind {
            SeriesKind::SmallTime => (i + 1) as f64,
            SeriesKind::LargeTime => -(i as f64),
        }
    }

    /// Coefficients rescaled to the variable `y = nu t^alpha`: `b_j / nu^j`
    /// for the short-time series, `g_k nu^k` for the long-time one.
    pub fn scaled(&self, nu: f64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * nu.powf(-self.exponent(i)))
            .collect()
    }
}

/// `b_1 = -a(a+i) / (2 Gamma(1+alpha))`,
/// `b_k = Gamma(1+(k-1)alpha)/Gamma(1+k alpha) * (-lambda~ nu b_{k-1} + nu^2/2 sum_{i+j=k-1} b_i b_j)`.
pub fn small_time_coeffs(m: &ModelParams, a: FourierArg, n: usize) -> Result<ComplexSeries> {
    if n == 0 {
        return Err(Error::InvalidParameter("small-time series needs n >= 1".into()));
    }
    let alpha = m.alpha();
    let nu = m.nu();
    let lt_nu = m.lambda_tilde(a) * nu;
    let mut b: Vec<Complex64> = Vec::with_capacity(n);
    b.push(-0.5 * a.quadratic() * reciprocal_gamma(1.0 + alpha));
    for k in 2..=n {
        let ratio = reciprocal_gamma(1.0 + k as f64 * alpha) / reciprocal_gamma(1.0 + (k - 1) as f64 * alpha);
        // b is 0-indexed: b[i - 1] = b_i
        let mut conv = ZERO;
        for i in 1..k - 1 {
            conv += b[i - 1] * b[k - 1 - i - 1];
        }
        b.push(ratio * (-lt_nu * b[k - 2] + 0.5 * nu * nu * conv));
    }
    Ok(ComplexSeries { kind: SeriesKind::SmallTime, coeffs: b, alpha })
}

/// `Gamma(1-(k-1)alpha) / Gamma(1-k alpha)` times `g`, with the convention
/// that a product with an exactly vanishing coefficient is zero.
fn large_time_ratio_times(alpha: f64, k: usize, g: Complex64) -> Result<Complex64> {
    if g == ZERO {
        return Ok(ZERO);
    }
    let num = reciprocal_gamma(1.0 - k as f64 * alpha);
    let den = reciprocal_gamma(1.0 - (k - 1) as f64 * alpha);
    if den == 0.0 {
        if num == 0.0 {
            return Ok(ZERO);
        }
        return Err(Error::Domain(format!(
            "long-time expansion breaks down at order {k}: Gamma(1 - {}) is a pole for alpha = {alpha}",
            (k - 1) as f64 * alpha
        )));
    }
    Ok(g * (num / den))
}

/// `g_0 = r_-/nu` and, for `k >= 1`,
/// `g_k = -(1/(A nu)) (Gamma(1-(k-1)alpha)/Gamma(1-k alpha) g_{k-1} - nu^2/2 sum_{i+j=k; i,j>=1} g_i g_j)`.
pub fn large_time_coeffs(m: &ModelParams, a: FourierArg, n: usize) -> Result<ComplexSeries> {
    let alpha = m.alpha();
    let nu = m.nu();
    let roots = riccati_roots(m, a)?;
    let a_nu = roots.a_root * nu;
    let mut g: Vec<Complex64> = Vec::with_capacity(n + 1);
    g.push(roots.r_minus / nu);
    for k in 1..=n {
        let linear = large_time_ratio_times(alpha, k, g[k - 1])?;
        let mut conv = ZERO;
        for i in 1..k {
            conv += g[i] * g[k - i];
        }
        g.push(-(linear - 0.5 * nu * nu * conv) / a_nu);
    }
    Ok(ComplexSeries { kind: SeriesKind::LargeTime, coeffs: g, alpha })
}

/// Sums the stored terms at time `t`. No convergence check.
pub fn eval_series(s: &ComplexSeries, t: f64) -> Complex64 {
    let x = t.powf(s.alpha);
    match s.kind {
        SeriesKind::SmallTime => {
            // Horner in x, then one factor of x for the missing constant term
            let mut acc = ZERO;
            for c in s.coeffs.iter().rev() {
                acc = acc * x + c;
            }
            acc * x
        }
        SeriesKind::LargeTime => {
            let w = 1.0 / x;
            let mut acc = ZERO;
            for c in s.coeffs.iter().rev() {
                acc = acc * w + c;
            }
            acc
        }
    }
}

/// Term-wise fractional derivative of the truncated series,
/// `D^alpha t^{gamma} = Gamma(1+gamma)/Gamma(1+gamma-alpha) t^{gamma-alpha}`.
pub fn eval_fractional_derivative(s: &ComplexSeries, t: f64) -> Result<Complex64> {
    let alpha = s.alpha;
    let x = t.powf(alpha);
    let mut acc = ZERO;
    for (i, c) in s.coeffs.iter().enumerate() {
        match s.kind {
            SeriesKind::SmallTime => {
                let j = (i + 1) as f64;
                let ratio = reciprocal_gamma(1.0 + (j - 1.0) * alpha) / reciprocal_gamma(1.0 + j * alpha);
                acc += c * ratio * x.powf(j - 1.0);
            }
            SeriesKind::LargeTime => {
                let term = large_time_ratio_times(alpha, i + 1, *c)?;
                acc += term * x.powf(-((i + 1) as f64));
            }
        }
    }
    Ok(acc)
}

/// `h_inf(t) = r_- (1 - E_alpha(-A nu t^alpha)) / nu`.
pub fn h_infinity(m: &ModelParams, a: FourierArg, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("h_infinity needs t > 0, got {t}")));
    }
    let roots = riccati_roots(m, a)?;
    let p = MittagLefflerParams::classical(m.alpha())?;
    let z = -roots.a_root * m.nu() * t.powf(m.alpha());
    let e = mittag_leffler(p, z)?;
    Ok(roots.r_minus * (1.0 - e) / m.nu())
}
