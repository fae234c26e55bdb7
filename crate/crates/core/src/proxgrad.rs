//! The proximal gradient update `p_L(y)` and the composite gradient mapping
//! `∇̃F(x) = −L(p_L(x) − x)`.

use crate::error::{check_dim, Error, Result};
use crate::problems::CompositeProblem;
use crate::{unit_scale, Vector};

/// `prox_{φ/c}(y − ∇f(y)/c)`. With `c = L` this is `p_L(y)`.
pub fn prox_grad_step(p: &CompositeProblem, y: &Vector, c: f64) -> Result<Vector> {
    check_dim(p.dim(), y.len())?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("step constant must be positive, got {c}")));
    }
    Ok(p.regularizer().prox(&(y - p.grad(y) / c), c))
}

/// `p_L(x)` together with the mapping `−L(p − x)` and its norm.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingEval {
    pub x: Vector,
    pub prox: Vector,
    pub mapping: Vector,
    pub norm: f64,
}

impl MappingEval {
    /// Builds the record from an already computed prox point; the mapping is
    /// `c(x − p)`.
    pub fn from_prox(x: Vector, prox: Vector, c: f64) -> Self {
        let mapping = (&x - &prox) * c;
        let norm = mapping.norm();
        Self { x, prox, mapping, norm }
    }
}

pub fn composite_gradient_mapping(p: &CompositeProblem, x: &Vector) -> Result<MappingEval> {
    composite_gradient_mapping_with(p, x, p.lipschitz())
}

/// Mapping at an arbitrary constant `c`, used by the σ-variant.
pub fn composite_gradient_mapping_with(p: &CompositeProblem, x: &Vector, c: f64) -> Result<MappingEval> {
    let prox = prox_grad_step(p, x, c)?;
    Ok(MappingEval::from_prox(x.clone(), prox, c))
}

/// The subgradient pair at `p_L(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientAtProx {
    pub prox: Vector,
    /// `φ′(p_L(x)) = ∇̃F(x) − ∇f(x)`.
    pub phi_subgradient: Vector,
    /// `F′(p_L(x)) = ∇f(p_L(x)) + φ′(p_L(x))`.
    pub f_subgradient: Vector,
}

/// Returns `F′(p_L(x))`, after checking that the implied `φ′` lies in
/// `∂φ(p_L(x))`. A failed check means the prox and the mapping disagree.
pub fn subgradient_at_prox(p: &CompositeProblem, x: &Vector) -> Result<SubgradientAtProx> {
    let m = composite_gradient_mapping(p, x)?;
    let grad_x = p.grad(x);
    let phi_subgradient = &m.mapping - &grad_x;
    let tol = 1e-9 * unit_scale(m.mapping.amax()).max(unit_scale(grad_x.amax()));
    p.regularizer().check_subgradient(&m.prox, &phi_subgradient, tol)?;
    let f_subgradient = p.grad(&m.prox) + &phi_subgradient;
    Ok(SubgradientAtProx { prox: m.prox, phi_subgradient, f_subgradient })
}

/// Returns `(F(x) − F(p_L(x)), ‖∇̃F(x)‖²/(2L))`; the first dominates the second.
pub fn check_descent(p: &CompositeProblem, x: &Vector) -> Result<(f64, f64)> {
    let m = composite_gradient_mapping(p, x)?;
    let lhs = p.eval_f(x)? - p.eval_f(&m.prox)?;
    let rhs = m.norm * m.norm / (2.0 * p.lipschitz());
    Ok((lhs, rhs))
}

/// Returns `(‖∇̃F(p_L(x))‖, ‖∇̃F(x)‖)`; PGM never increases the mapping norm.
pub fn check_mapping_monotone(p: &CompositeProblem, x: &Vector) -> Result<(f64, f64)> {
    let before = composite_gradient_mapping(p, x)?;
    let after = composite_gradient_mapping(p, &before.prox)?;
    Ok((after.norm, before.norm))
}

/// Both sides of `F(x) − F(p_L(y)) ≥ (L/2)‖p_L(y) − y‖² + L⟨y − x, p_L(y) − y⟩`,
/// as `(lhs, rhs)`.
pub fn check_prox_inequality(p: &CompositeProblem, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
    check_dim(p.dim(), x.len())?;
    let l = p.lipschitz();
    let py = prox_grad_step(p, y, l)?;
    let step = &py - y;
    let lhs = p.eval_f(x)? - p.eval_f(&py)?;
    let rhs = 0.5 * l * step.norm_squared() + l * (y - x).dot(&step);
    Ok((lhs, rhs))
}

/// Both sides of
/// `(L/2)‖p_L(y) − y‖² − L⟨p_L(x) − x, p_L(y) − y⟩ ≤ F(p_L(x)) − F(p_L(y)) + L⟨p_L(y) − y, x − y⟩`,
/// as `(lower, upper)`.
pub fn check_pair_inequality(p: &CompositeProblem, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
    let l = p.lipschitz();
    let px = prox_grad_step(p, x, l)?;
    let py = prox_grad_step(p, y, l)?;
    let sx = &px - x;
    let sy = &py - y;
    let lower = 0.5 * l * sy.norm_squared() - l * sx.dot(&sy);
    let upper = p.eval_f(&px)? - p.eval_f(&py)? + l * sy.dot(&(x - y));
    Ok((lower, upper))
}

/// Slack used when asserting `lhs ≥ rhs` from [`check_descent`].
pub fn descent_slack(fx: f64) -> f64 {
    1e-10 * unit_scale(fx)
}
