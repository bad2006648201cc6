// NaN-rejecting guards are written as negated comparisons on purpose, and
// quadrature and Lanczos tables keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod adams;
pub mod cli;
pub mod error;
pub mod model;
pub mod pade;
pub mod pricer;
pub mod quad;
pub mod selftest;
pub mod series;
pub mod special_fn;

pub use error::{Error, Result};
