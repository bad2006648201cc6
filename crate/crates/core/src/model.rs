//! Model parameters, the factorised Riccati right-hand side and the
//! classical (`alpha = 1`) closed-form solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{mittag_leffler, MittagLefflerParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Below this modulus the two Riccati roots are treated as coincident.
pub const DEGENERATE_ROOT_TOL: f64 = 1e-14;

/// Rough Heston parameters `(H, nu, rho, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    hurst: f64,
    nu: f64,
    rho: f64,
    lam: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(rename = "H")]
    hurst: f64,
    nu: f64,
    rho: f64,
    lam: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.hurst, r.nu, r.rho, r.lam)
    }
}

impl From<ModelParams> for RawParams {
    fn from(m: ModelParams) -> Self {
        RawParams { hurst: m.hurst, nu: m.nu, rho: m.rho, lam: m.lam }
    }
}

impl ModelParams {
    pub fn new(hurst: f64, nu: f64, rho: f64, lam: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&hurst) {
            return Err(Error::InvalidParameter(format!("H = {hurst} must lie in [0, 1/2]")));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu = {nu} must be positive")));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("rho = {rho} must satisfy |rho| < 1")));
        }
        if !(lam >= 0.0) || !lam.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lam} must be nonnegative")));
        }
        Ok(Self { hurst, nu, rho, lam })
    }

    /// `H = 0.05, nu = 0.4, rho = -0.65, lambda = 1`.
    pub fn realistic() -> Self {
        Self { hurst: 0.05, nu: 0.4, rho: -0.65, lam: 1.0 }
    }

    pub fn with_hurst(self, hurst: f64) -> Result<Self> {
        Self::new(hurst, self.nu, self.rho, self.lam)
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    /// Fractional order `alpha = H + 1/2`.
    pub fn alpha(&self) -> f64 {
        self.hurst + 0.5
    }

    /// `lambda / nu`.
    pub fn lam_prime(&self) -> f64 {
        self.lam / self.nu
    }

    /// `H = 0`, i.e. `alpha = 1/2`, only run as a numerical boundary case.
    pub fn is_boundary(&self) -> bool {
        self.hurst == 0.0
    }

    /// `H = 1/2`: the classical Heston model.
    pub fn is_classical(&self) -> bool {
        self.hurst == 0.5
    }

    /// `lambda' - i rho a`.
    pub fn lambda_tilde(&self, a: FourierArg) -> Complex64 {
        self.lam_prime() - I * self.rho * a.value()
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::realistic()
    }
}

/// A Fourier argument in `{Re a >= 0, -1 <= Im a <= 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierArg(Complex64);

impl FourierArg {
    pub fn new(a: Complex64) -> Result<Self> {
        if a.re >= 0.0 && (-1.0..=0.0).contains(&a.im) {
            Ok(Self(a))
        } else {
            Err(Error::Domain(format!("Fourier argument {a} is outside Re a >= 0, -1 <= Im a <= 0")))
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// `u - i/2`, the argument used along the Lewis integration path.
    pub fn lewis(u: f64) -> Result<Self> {
        Self::from_parts(u, -0.5)
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// `a (a + i)`, zero exactly when the solution vanishes identically.
    pub fn quadratic(&self) -> Complex64 {
        self.0 * (self.0 + I)
    }
}

/// Roots of `nu h -> (nu h - r_minus)(nu h - r_plus)` and their half
/// difference `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiRoots {
    pub a_root: Complex64,
    pub r_minus: Complex64,
    pub r_plus: Complex64,
}

/// `A = sqrt(a(a+i) + (lambda' - i rho a)^2)` on the principal branch and
/// `r_pm = lambda' - i rho a +- A`.
pub fn riccati_roots(m: &ModelParams, a: FourierArg) -> Result<RiccatiRoots> {
    let lt = m.lambda_tilde(a);
    let a_root = (a.quadratic() + lt * lt).sqrt();
    if a_root.norm() < DEGENERATE_ROOT_TOL {
        return Err(Error::Degenerate(a_root.norm()));
    }
    Ok(RiccatiRoots { a_root, r_minus: lt - a_root, r_plus: lt + a_root })
}

/// `kappa(x) = nu x^(alpha-1) E_{alpha,alpha}(-lambda x^alpha)`.
pub fn kernel(m: &ModelParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("kernel evaluated at x = {x}; needs x > 0")));
    }
    let alpha = m.alpha();
    let p = MittagLefflerParams::new(alpha, alpha)?;
    let e = mittag_leffler(p, Complex64::new(-m.lam() * x.powf(alpha), 0.0))?;
    Ok(m.nu() * x.powf(alpha - 1.0) * e.re)
}

/// Right-hand side `-a(a+i)/2 + (i rho nu a - lambda) h + nu^2 h^2 / 2`.
pub fn riccati_rhs(m: &ModelParams, a: FourierArg, h: Complex64) -> Complex64 {
    let av = a.value();
    -0.5 * a.quadratic() + (I * m.rho() * m.nu() * av - m.lam()) * h + 0.5 * m.nu() * m.nu() * h * h
}

/// Closed-form solution of the classical Riccati ODE `h' = rhs(h)`, `h(0) = 0`:
/// `nu h = r_- (1 - e^{-A nu t}) / (1 - (r_-/r_+) e^{-A nu t})`.
pub fn classical_h(m: &ModelParams, a: FourierArg, t: f64) -> Result<Complex64> {
    if !m.is_classical() {
        return Err(Error::InvalidParameter(format!(
            "classical closed form needs H = 1/2, got H = {}",
            m.hurst()
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if a.quadratic() == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let roots = riccati_roots(m, a)?;
    if roots.r_plus.norm() < DEGENERATE_ROOT_TOL {
        return Err(Error::Degenerate(roots.r_plus.norm()));
    }
    let decay = (-roots.a_root * m.nu() * t).exp();
    let ratio = roots.r_minus / roots.r_plus;
    Ok(roots.r_minus * (1.0 - decay) / (1.0 - ratio * decay) / m.nu())
}
