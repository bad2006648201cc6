//! Diagonal two-point rational approximants
//! `h^(n,n)(t) = sum_{i=1}^n p_i y^i / sum_{j=0}^n q_j y^j`, `y = nu t^alpha`,
//! matching `n` short-time coefficients at `y = 0` and `n` long-time
//! coefficients at `y = infinity`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{FourierArg, ModelParams};
use crate::series::{large_time_coeffs, small_time_coeffs};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub const MAX_PADE_ORDER: usize = 8;

/// Relative pivot below which the two-point system counts as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Acceptance threshold of `series_match_check`.
pub const MATCH_TOL: f64 = 1e-9;

/// Number of grid points used by `pole_scan`.
pub const POLE_SCAN_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalApproximant {
    pub n: usize,
    /// `p_1..p_n` (`p_0 = 0`).
    pub p: Vec<Complex64>,
    /// `q_0..q_n` with `q_0 = 1`.
    pub q: Vec<Complex64>,
    pub alpha: f64,
    pub nu: f64,
}

impl RationalApproximant {
    pub fn zero(n: usize, alpha: f64, nu: f64) -> Self {
        let mut q = vec![ZERO; n + 1];
        q[0] = ONE;
        Self { n, p: vec![ZERO; n], q, alpha, nu }
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().all(|c| *c == ZERO)
    }

    /// `Q(y)`.
    pub fn denominator(&self, y: f64) -> Complex64 {
        self.q.iter().rev().fold(ZERO, |acc, c| acc * y + c)
    }

    /// `P(y)`.
    pub fn numerator(&self, y: f64) -> Complex64 {
        self.p.iter().rev().fold(ZERO, |acc, c| acc * y + c) * y
    }

    /// `P(y) / Q(y)`.
    pub fn eval_y(&self, y: f64) -> Result<Complex64> {
        if y == 0.0 {
            return Ok(ZERO);
        }
        // for large y evaluate in w = 1/y to avoid overflow of y^n
        let (num, den) = if y > 1.0 {
            let w = 1.0 / y;
            let num = self.p.iter().fold(ZERO, |acc, c| acc * w + c);
            let den = self.q.iter().fold(ZERO, |acc, c| acc * w + c);
            (num, den)
        } else {
            (self.numerator(y), self.denominator(y))
        };
        if den.norm() < 1e-300 * num.norm() || (den == ZERO && num != ZERO) {
            return Err(Error::Pole(y));
        }
        if num == ZERO {
            return Ok(ZERO);
        }
        Ok(num / den)
    }

    /// Limit `p_n / q_n` as `y -> infinity`, if `q_n != 0`.
    pub fn asymptote(&self) -> Option<Complex64> {
        let qn = self.q[self.n];
        (qn != ZERO).then(|| self.p[self.n - 1] / qn)
    }
}

/// `h^(n,n)` at time `t >= 0`.
pub fn eval_pade(r: &RationalApproximant, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(ZERO);
    }
    r.eval_y(r.nu * t.powf(r.alpha))
}

/// Builds `h^(n,n)` for the given parameters and Fourier argument.
pub fn build_pade(m: &ModelParams, a: FourierArg, n: usize) -> Result<RationalApproximant> {
    if n == 0 || n > MAX_PADE_ORDER {
        return Err(Error::InvalidParameter(format!("Pade order {n} must lie in [1, {MAX_PADE_ORDER}]")));
    }
    if a.quadratic() == ZERO {
        // h vanishes identically
        return Ok(RationalApproximant::zero(n, m.alpha(), m.nu()));
    }
    let small = small_time_coeffs(m, a, n)?;
    let large = large_time_coeffs(m, a, n - 1)?;
    let beta = small.scaled(m.nu());
    let gamma = large.scaled(m.nu());
    build_from_series(&beta, &gamma, m.alpha(), m.nu())
}

/// Solves the two-point conditions for `beta_1..beta_n` (series in `y`) and
/// `gamma_0..gamma_{n-1}` (series in `1/y`).
pub fn build_from_series(beta: &[Complex64], gamma: &[Complex64], alpha: f64, nu: f64) -> Result<RationalApproximant> {
    let n = beta.len();
    if n == 0 || gamma.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need n short-time and n long-time coefficients, got {} and {}",
            beta.len(),
            gamma.len()
        )));
    }
    if beta.iter().chain(gamma).all(|c| *c == ZERO) {
        return Ok(RationalApproximant::zero(n, alpha, nu));
    }
    // Solve in z = y / c for a few balancing scales, with and without row
    // equilibration, and keep the first candidate that certifies (or the
    // best one if none does).
    let mut scales = vec![1.0, balancing_scale(beta), balancing_scale_large(gamma)];
    scales.push((scales[1] * scales[2]).sqrt());
    let mut best: Option<(RationalApproximant, f64)> = None;
    let mut last_err = None;
    for &c in &scales {
        let beta_z: Vec<Complex64> = beta.iter().enumerate().map(|(j, b)| b * c.powi(j as i32 + 1)).collect();
        let gamma_z: Vec<Complex64> = gamma.iter().enumerate().map(|(k, g)| g / c.powi(k as i32)).collect();
        let (matrix, rhs) = assemble(&beta_z, &gamma_z);
        for equilibrate in [false, true] {
            let x = match solve(&matrix, &rhs, equilibrate) {
                Ok(x) => x,
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            };
            let r = unpack(&x, c, alpha, nu);
            let report = series_match_check(&r, beta, gamma);
            if report.passed {
                return Ok(r);
            }
            if best.as_ref().is_none_or(|(_, m)| report.max_mismatch < *m) {
                best = Some((r, report.max_mismatch));
            }
        }
    }
    match (best, last_err) {
        (Some((r, _)), _) => Ok(r),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one solve attempted"),
    }
}

/// Row-major `2n x 2n` system for the unknowns `[p_1..p_n, q_1..q_n]`.
fn assemble(beta: &[Complex64], gamma: &[Complex64]) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
    let n = beta.len();
    let mut rows = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    // y^k, k = 1..n:  p_k - sum_{j=1}^{k-1} q_j beta_{k-j} = beta_k
    for k in 1..=n {
        let mut row = vec![ZERO; 2 * n];
        row[k - 1] = ONE;
        for j in 1..k {
            row[n + j - 1] = -beta[k - j - 1];
        }
        rows.push(row);
        rhs.push(beta[k - 1]);
    }
    // w^m, m = 0..n-1:  p_{n-m} - sum_{j=n-m}^{n} q_j gamma_{j-(n-m)} = 0
    for m in 0..n {
        let mut row = vec![ZERO; 2 * n];
        row[n - m - 1] = ONE;
        for j in (n - m)..=n {
            row[n + j - 1] = -gamma[j - (n - m)];
        }
        rows.push(row);
        rhs.push(ZERO);
    }
    (rows, rhs)
}

/// `c = |beta_1 / beta_n|^(1/(n-1))`, or 1 when undefined.
fn balancing_scale(beta: &[Complex64]) -> f64 {
    let n = beta.len();
    if n < 2 {
        return 1.0;
    }
    let c = (beta[0].norm() / beta[n - 1].norm()).powf(1.0 / (n - 1) as f64);
    if c.is_finite() && c > 0.0 {
        c
    } else {
        1.0
    }
}

/// `c = |gamma_(n-1) / gamma_0|^(1/(n-1))`, or 1 when undefined.
fn balancing_scale_large(gamma: &[Complex64]) -> f64 {
    let n = gamma.len();
    if n < 2 {
        return 1.0;
    }
    let c = (gamma[n - 1].norm() / gamma[0].norm()).powf(1.0 / (n - 1) as f64);
    if c.is_finite() && c > 0.0 {
        c
    } else {
        1.0
    }
}

/// Coefficients solved in `z = y / c` back to `y`.
fn unpack(x: &[Complex64], c: f64, alpha: f64, nu: f64) -> RationalApproximant {
    let n = x.len() / 2;
    let p = (0..n).map(|i| x[i] / c.powi(i as i32 + 1)).collect();
    let mut q = Vec::with_capacity(n + 1);
    q.push(ONE);
    q.extend((1..=n).map(|j| x[n + j - 1] / c.powi(j as i32)));
    RationalApproximant { n, p, q, alpha, nu }
}

/// Gaussian elimination with partial pivoting followed by two steps of
/// iterative refinement.
fn solve(matrix: &[Vec<Complex64>], rhs: &[Complex64], equilibrate: bool) -> Result<Vec<Complex64>> {
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    if equilibrate {
        for (row, bi) in a.iter_mut().zip(b.iter_mut()) {
            let s = row.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if s > 0.0 {
                for c in row.iter_mut() {
                    *c /= s;
                }
                *bi /= s;
            }
        }
    }
    let lu = Lu::factor(&a)?;
    let mut x = lu.apply(&b);
    for _ in 0..2 {
        let residual: Vec<Complex64> = a
            .iter()
            .zip(&b)
            .map(|(row, bi)| bi - row.iter().zip(&x).map(|(c, xi)| c * xi).sum::<Complex64>())
            .collect();
        for (xi, d) in x.iter_mut().zip(lu.apply(&residual)) {
            *xi += d;
        }
    }
    Ok(x)
}

/// Row-pivoted LU factors.
struct Lu {
    lu: Vec<Vec<Complex64>>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(matrix: &[Vec<Complex64>]) -> Result<Self> {
        let dim = matrix.len();
        let mut lu = matrix.to_vec();
        let mut perm: Vec<usize> = (0..dim).collect();
        let scale = lu.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::SingularSystem(0.0));
        }
        for col in 0..dim {
            let (piv, piv_abs) = (col..dim)
                .map(|r| (r, lu[r][col].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("nonempty pivot range");
            if piv_abs < PIVOT_TOL * scale {
                return Err(Error::SingularSystem(piv_abs / scale));
            }
            lu.swap(col, piv);
            perm.swap(col, piv);
            let inv = lu[col][col].inv();
            for r in col + 1..dim {
                let f = lu[r][col] * inv;
                lu[r][col] = f;
                if f == ZERO {
                    continue;
                }
                let (top, rest) = lu.split_at_mut(r);
                for (x, p) in rest[0][col + 1..].iter_mut().zip(&top[col][col + 1..]) {
                    *x -= f * p;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    fn apply(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let dim = rhs.len();
        let mut y: Vec<Complex64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for r in 0..dim {
            for c in 0..r {
                let v = self.lu[r][c] * y[c];
                y[r] -= v;
            }
        }
        for r in (0..dim).rev() {
            for c in r + 1..dim {
                let v = self.lu[r][c] * y[c];
                y[r] -= v;
            }
            y[r] /= self.lu[r][r];
        }
        y
    }
}

/// Coefficient-wise agreement of the re-expanded approximant with the
/// series it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    pub small_mismatch: f64,
    pub large_mismatch: f64,
    pub max_mismatch: f64,
    pub passed: bool,
}

fn relative_mismatch(got: &[Complex64], want: &[Complex64]) -> f64 {
    let scale = want.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return got.iter().map(|c| c.norm()).fold(0.0, f64::max);
    }
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).norm() / w.norm().max(1e-6 * scale))
        .fold(0.0, f64::max)
}

/// Re-expands `P/Q` to order `n` at `y = 0` and to order `n - 1` at
/// `y = infinity` and compares with `beta` and `gamma`.
pub fn series_match_check(r: &RationalApproximant, beta: &[Complex64], gamma: &[Complex64]) -> MatchReport {
    let n = r.n;
    // at y = 0: c_k = p_k - sum_{j=1}^{k} q_j c_{k-j}, c_0 = 0
    let mut c = vec![ZERO; n + 1];
    for k in 1..=n {
        let mut s = r.p[k - 1];
        for j in 1..k {
            s -= r.q[j] * c[k - j];
        }
        c[k] = s / r.q[0];
    }
    let small = relative_mismatch(&c[1..], &beta[..n.min(beta.len())]);
    // at w = 0: coefficients of w^j are p_{n-j} and q_{n-j}
    let large = if r.q[n] == ZERO {
        if gamma.iter().all(|g| *g == ZERO) && r.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        let mut d = vec![ZERO; n];
        for m in 0..n {
            let mut s = r.p[n - m - 1];
            for j in 1..=m {
                s -= r.q[n - j] * d[m - j];
            }
            d[m] = s / r.q[n];
        }
        relative_mismatch(&d, &gamma[..n.min(gamma.len())])
    };
    let max = small.max(large);
    MatchReport { small_mismatch: small, large_mismatch: large, max_mismatch: max, passed: max < MATCH_TOL }
}

/// Default scan limit `nu (100 years)^alpha`.
pub fn default_scan_limit(m: &ModelParams) -> f64 {
    m.nu() * 100f64.powf(m.alpha())
}

/// Positive real `y <= y_max` where `Q(y)` (numerically) vanishes.
/// An empty result means the approximant is pole-free on the ray.
pub fn pole_scan(r: &RationalApproximant, y_max: f64) -> Vec<f64> {
    if !(y_max > 0.0) {
        return Vec::new();
    }
    let n = POLE_SCAN_POINTS;
    let ys: Vec<f64> = (1..=n).map(|i| y_max * i as f64 / n as f64).collect();
    let qs: Vec<Complex64> = ys.iter().map(|&y| r.denominator(y)).collect();
    let mags: Vec<f64> = qs.iter().map(|q| q.norm()).collect();
    // size of Q(y) if its terms did not cancel
    let scale = |y: f64| r.q.iter().rev().fold(0.0, |acc, c| acc * y + c.norm());
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        let left = if i == 0 { f64::INFINITY } else { mags[i - 1] };
        let right = if i + 1 == n { f64::INFINITY } else { mags[i + 1] };
        let sign_change = i + 1 < n
            && ((qs[i].re.signum() != qs[i + 1].re.signum()) || (qs[i].im.signum() != qs[i + 1].im.signum()));
        if !(mags[i] <= left && mags[i] <= right) && !sign_change {
            continue;
        }
        let lo = if i == 0 { 0.0 } else { ys[i - 1] };
        let hi = if i + 1 == n { ys[i] } else { ys[i + 1] };
        let (y, q) = golden_min(|y| r.denominator(y).norm(), lo, hi);
        if y > 0.0 && q < 1e-8 * scale(y) && !roots.iter().any(|&x| (x - y).abs() <= 2.0 * y_max / n as f64) {
            roots.push(y);
        }
    }
    roots
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
