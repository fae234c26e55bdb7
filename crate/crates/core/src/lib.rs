//! Proximal gradient methods for composite convex minimization `F = f + φ`.
//!
//! The crate provides:
//!
//! - [`problems`]: the composite problem abstraction and concrete instances
//!   (quadratic plus ℓ1, box-constrained least squares) with reference solutions.
//! - [`proxgrad`]: the proximal gradient update, the composite gradient mapping
//!   and the descent/subgradient facts built on it.
//! - [`schedules`]: momentum sequences `t_i` and the step coefficients
//!   `h_{i+1,k}` of fixed-step first-order methods.
//! - [`algorithms`]: PGM, FPGM (FISTA), FPGM-m, FPGM-σ, generalized FPGM in
//!   both recursive forms, FPGM-OPG and the generic fixed-step runner.
//! - [`pep`]: the relaxed performance-estimation dual objects, closed-form
//!   certificates, PSD feasibility checks and analytical worst-case bounds.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod error;
pub mod pep;
pub mod problems;
pub mod proxgrad;
pub mod rng;
pub mod schedules;

pub use error::{Error, Result};

/// Dense column vector used for iterates.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// `max(1, |x|)`, the scale used for relative slack in inequality checks.
pub(crate) fn unit_scale(x: f64) -> f64 {
    x.abs().max(1.0)
}
