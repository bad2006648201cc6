use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("|arg z| = {arg:.6} is outside the asymptotic sector [{lower:.6}, pi]")]
    Sector { arg: f64, lower: f64 },

    #[error("asymptotic expansion is not accurate at |z| = {modulus} with {terms} terms")]
    Accuracy { modulus: f64, terms: usize },

    #[error("degenerate double root of the Riccati quadratic (|A| = {0:e})")]
    Degenerate(f64),

    #[error("two-point system is singular (relative pivot {0:e})")]
    SingularSystem(f64),

    #[error("rational approximant denominator vanishes at y = {0}")]
    Pole(f64),

    #[error("solution overflow at step {step} (t = {t})")]
    Overflow { step: usize, t: f64 },

    #[error("quadrature did not converge: {0}")]
    Integration(String),

    #[error("no implied volatility: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
