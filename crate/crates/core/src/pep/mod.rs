//! Relaxed performance-estimation dual objects for fixed-step methods.
//!
//! For a schedule `h` of horizon `N` the cost dual certifies
//! `F(x_N) − F* ≤ ½LR²γ` whenever the bordered matrix
//!
//! ```text
//! [ S(h, λ, τ)   τ/2 ]
//! [ τᵀ/2         γ/2 ]  ⪰ 0
//! ```
//!
//! with `(λ, τ)` in the multiplier set Λ. The mapping dual certifies
//! `min_{x∈Ω} ‖∇̃F(x)‖² ≤ ½L²R²γ` through the `(N+2)`-sized analogue built from
//! `S′(h, λ, τ, η, β)`.

mod bounds;
mod certificates;
mod matrices;
mod quad;

pub use bounds::{
    analytic_bounds, fpgm_a_cost_bound, fpgm_a_mapping_bound, fpgm_cost_bound, fpgm_m_cost_bound, fpgm_m_mapping_bound,
    fpgm_sigma_cost_bound, fpgm_sigma_mapping_bound, gfpgm_bounds, gfpgm_cost_bound, gfpgm_final_mapping_bound,
    gfpgm_mapping_bound, opg_cost_bound, opg_mapping_bound, pgm_cost_bound, pgm_mapping_bound, BoundReport, BoundValue,
    ASYMPTOTIC_N,
};
pub use certificates::{
    check_feasibility, cost_certificate, cost_closed_form, dual_bound_cost, dual_bound_mapping, mapping_certificate,
    mapping_closed_form, Certificate, CostCertificate, FeasibilityReport, MappingCertificate, EIGEN_TOLERANCE,
    MULTIPLIER_FLOOR, RESIDUAL_TOLERANCE,
};
pub use matrices::{build_a, build_a_padded, build_d, build_d_padded, build_s, build_s_prime};
pub use quad::{maximize_quad, maximize_quad_with, quad_objective, QuadOptions, QuadResult};

use crate::error::{Error, Result};
use crate::Matrix;

/// Largest `|M_ij − M_ji|`.
pub fn max_asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Smallest eigenvalue of a symmetric matrix. Asymmetry above
/// `1e-12·max(1, max|M_ij|)` is rejected.
pub fn min_eigenvalue(m: &Matrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.is_empty() {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let asym = max_asymmetry(m);
    if asym > 1e-12 * crate::unit_scale(m.amax()) {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    Ok(eig.eigenvalues.min())
}
