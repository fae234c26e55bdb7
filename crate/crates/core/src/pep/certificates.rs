//! Dual certificates and their PSD feasibility check.

use serde::{Deserialize, Serialize};

use super::matrices::{build_s, build_s_prime};
use super::min_eigenvalue;
use crate::error::{Error, Result};
use crate::schedules::{StepSchedule, TSequence};
use crate::{Matrix, Vector};

/// Scaled eigenvalue floor: feasible iff `λ_min ≥ −EIGEN_TOLERANCE·max|M_ij|`.
pub const EIGEN_TOLERANCE: f64 = 1e-10;
/// Largest accepted residual of the multiplier-set equalities.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Multipliers are treated as nonnegative down to this value.
pub const MULTIPLIER_FLOOR: f64 = -1e-14;

/// Multipliers of the cost dual. `lambda[i−1] = λ_i` for `1 ≤ i ≤ N − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCertificate {
    pub horizon: usize,
    pub lambda: Vec<f64>,
    pub tau: Vec<f64>,
    pub gamma: f64,
}

/// Multipliers of the mapping dual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingCertificate {
    pub horizon: usize,
    pub lambda: Vec<f64>,
    pub tau: Vec<f64>,
    pub eta: f64,
    pub beta: Vec<f64>,
    pub gamma: f64,
}

/// Residuals of `τ₀ = λ₁`, `λ_i − λ_{i+1} + τ_i = 0` and `λ_{N−1} + τ_{N−1} = last`,
/// in that order. With `N = 1` only the last equality remains, as `τ₀ = last`.
fn chain_residuals(lambda: &[f64], tau: &[f64], last: f64) -> Vec<f64> {
    let n = tau.len();
    let mut r = Vec::with_capacity(n);
    if n >= 2 {
        r.push(tau[0] - lambda[0]);
        for i in 1..n - 1 {
            r.push(lambda[i - 1] - lambda[i] + tau[i]);
        }
    }
    let lambda_last = if n >= 2 { lambda[n - 2] } else { 0.0 };
    r.push(lambda_last + tau[n - 1] - last);
    r
}

fn bordered(top: Matrix, border: &[f64], gamma: f64) -> Matrix {
    let n = top.nrows();
    let mut m = Matrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(&top);
    for (i, &b) in border.iter().enumerate() {
        m[(i, n)] = 0.5 * b;
        m[(n, i)] = 0.5 * b;
    }
    m[(n, n)] = 0.5 * gamma;
    m
}

fn check_horizon(h: &StepSchedule, horizon: usize) -> Result<()> {
    if h.horizon() != horizon {
        Err(Error::DimensionMismatch { expected: horizon, found: h.horizon() })
    } else {
        Ok(())
    }
}

/// Shared interface of the two certificate kinds.
pub trait Certificate {
    fn kind(&self) -> &'static str;
    fn horizon(&self) -> usize;
    /// The matrix that must be PSD.
    fn bordered_matrix(&self, h: &StepSchedule) -> Result<Matrix>;
    /// Residuals of the multiplier-set equalities.
    fn residuals(&self) -> Vec<f64>;
    /// Smallest multiplier, including `γ`.
    fn min_multiplier(&self) -> f64;
    /// Bound certified for `L = R = 1`.
    fn unit_bound(&self) -> f64;
}

impl Certificate for CostCertificate {
    fn kind(&self) -> &'static str {
        "cost"
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn bordered_matrix(&self, h: &StepSchedule) -> Result<Matrix> {
        check_horizon(h, self.horizon)?;
        Ok(bordered(build_s(h, &self.lambda, &self.tau)?, &self.tau, self.gamma))
    }

    fn residuals(&self) -> Vec<f64> {
        chain_residuals(&self.lambda, &self.tau, 1.0)
    }

    fn min_multiplier(&self) -> f64 {
        self.lambda.iter().chain(&self.tau).copied().fold(self.gamma, f64::min)
    }

    fn unit_bound(&self) -> f64 {
        dual_bound_cost(self, 1.0, 1.0)
    }
}

impl Certificate for MappingCertificate {
    fn kind(&self) -> &'static str {
        "mapping"
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn bordered_matrix(&self, h: &StepSchedule) -> Result<Matrix> {
        check_horizon(h, self.horizon)?;
        let top = build_s_prime(h, &self.lambda, &self.tau, self.eta, &self.beta)?;
        let mut border = self.tau.clone();
        border.push(0.0);
        Ok(bordered(top, &border, self.gamma))
    }

    fn residuals(&self) -> Vec<f64> {
        let mut r = chain_residuals(&self.lambda, &self.tau, self.eta);
        r.push(self.beta.iter().sum::<f64>() - 1.0);
        r
    }

    fn min_multiplier(&self) -> f64 {
        self.lambda.iter().chain(&self.tau).chain(&self.beta).copied().fold(self.gamma.min(self.eta), f64::min)
    }

    fn unit_bound(&self) -> f64 {
        dual_bound_mapping(self, 1.0, 1.0)
    }
}

/// `λ_i = T_{i−1}/T_{N−1}`, `τ_i = t_i/T_{N−1}`, `γ = 1/T_{N−1}`.
pub fn cost_certificate(t: &TSequence) -> Result<CostCertificate> {
    let t = t.clone().validated()?;
    let n = t.len();
    let total = t.total();
    Ok(CostCertificate {
        horizon: n,
        lambda: (1..n).map(|i| t.T(i - 1) / total).collect(),
        tau: t.values().iter().map(|ti| ti / total).collect(),
        gamma: 1.0 / total,
    })
}

/// `τ₀ = 2/(Σ_k(T_k − t_k²) + T_{N−1})`, `λ_i = T_{i−1}τ₀`, `τ_i = t_iτ₀`,
/// `η = T_{N−1}τ₀`, `β_i = ½(T_i − t_i²)τ₀` for `i < N`, `β_N = ½T_{N−1}τ₀`, `γ = τ₀`.
pub fn mapping_certificate(t: &TSequence) -> Result<MappingCertificate> {
    let t = t.clone().validated()?;
    let n = t.len();
    let total = t.total();
    let denom = 0.5 * (t.slacks().sum::<f64>() + total);
    if !(denom > 0.0) {
        return Err(Error::InvalidSequence(format!("non-positive normalizer {denom}")));
    }
    let tau0 = 1.0 / denom;
    let mut beta: Vec<f64> = t.slacks().map(|s| 0.5 * s * tau0).collect();
    beta.push(0.5 * total * tau0);
    Ok(MappingCertificate {
        horizon: n,
        lambda: (1..n).map(|i| t.T(i - 1) * tau0).collect(),
        tau: t.values().iter().map(|ti| ti * tau0).collect(),
        eta: total * tau0,
        beta,
        gamma: tau0,
    })
}

/// `(diag(T̃ − t̃²) + t̃t̃ᵀ)/(2T_{N−1})` with `t̃ = (t, 1)`, `T̃ = (T, 1)`.
pub fn cost_closed_form(t: &TSequence) -> Matrix {
    let mut tt: Vec<f64> = t.values().to_vec();
    tt.push(1.0);
    let v = Vector::from_vec(tt);
    let mut diag: Vec<f64> = t.slacks().collect();
    diag.push(0.0);
    (Matrix::from_diagonal(&Vector::from_vec(diag)) + &v * v.transpose()) / (2.0 * t.total())
}

/// `½τ₀ t̃t̃ᵀ` with `t̃ = (t, 0, 1)`.
pub fn mapping_closed_form(t: &TSequence) -> Matrix {
    let mut tt: Vec<f64> = t.values().to_vec();
    tt.extend([0.0, 1.0]);
    let v = Vector::from_vec(tt);
    let tau0 = 2.0 / (t.slacks().sum::<f64>() + t.total());
    &v * v.transpose() * (0.5 * tau0)
}

/// `½LR²γ`.
pub fn dual_bound_cost(cert: &CostCertificate, l: f64, r: f64) -> f64 {
    0.5 * l * r * r * cert.gamma
}

/// `√(½L²R²γ)`: the dual value bounds the squared mapping norm.
pub fn dual_bound_mapping(cert: &MappingCertificate, l: f64, r: f64) -> f64 {
    l * r * (0.5 * cert.gamma).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub kind: String,
    pub horizon: usize,
    pub size: usize,
    pub min_eigenvalue: f64,
    pub max_abs_entry: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub min_multiplier: f64,
    /// Certified bound at `L = R = 1`.
    pub unit_bound: f64,
    pub feasible: bool,
}

pub fn check_feasibility<C: Certificate>(h: &StepSchedule, cert: &C) -> Result<FeasibilityReport> {
    let m = cert.bordered_matrix(h)?;
    let min_eig = min_eigenvalue(&m)?;
    let max_abs = m.amax();
    let residuals = cert.residuals();
    let max_residual = residuals.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
    let min_multiplier = cert.min_multiplier();
    let feasible = min_eig >= -EIGEN_TOLERANCE * max_abs
        && max_residual <= RESIDUAL_TOLERANCE
        && min_multiplier >= MULTIPLIER_FLOOR;
    Ok(FeasibilityReport {
        kind: cert.kind().to_string(),
        horizon: cert.horizon(),
        size: m.nrows(),
        min_eigenvalue: min_eig,
        max_abs_entry: max_abs,
        residuals,
        max_residual,
        min_multiplier,
        unit_bound: cert.unit_bound(),
        feasible,
    })
}
