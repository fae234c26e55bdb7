//! Seeded instance generation.
//!
//! The generator is SplitMix64 (64-bit state, increment `0x9E3779B97F4A7C15`,
//! Stafford "Mix13" finalizer). Uniform doubles take the top 53 bits; normal
//! deviates use the Box–Muller transform with the cosine branch only, so each
//! normal consumes exactly two uniforms. Instances are also exported as JSON,
//! which is the portable form; the generator only needs to be reproducible
//! within this crate.

use crate::problems::CompositeProblem;
use crate::{Matrix, Result, Vector};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn normal(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal_vector(&mut self, d: usize) -> Vector {
        Vector::from_fn(d, |_, _| self.normal())
    }

    /// Row-major fill, so the draw order matches the JSON layout.
    pub fn normal_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.normal()).collect();
        Matrix::from_row_slice(rows, cols, &data)
    }

    /// Derives an independent stream, e.g. one per instance of a sweep.
    pub fn fork(&mut self) -> Self {
        Self::new(self.next_u64())
    }
}

/// Random lasso `½‖Ax − b‖² + lam‖x‖₁` written as `½xᵀ(AᵀA)x − (Aᵀb)ᵀx`.
///
/// `A` is `2d × d` Gaussian scaled by `1/√(2d)`; `lam` is uniform on
/// `[0.05, 0.5]·‖Aᵀb‖_∞`, which keeps a nontrivial support.
pub fn random_lasso(rng: &mut SplitMix64, d: usize) -> Result<CompositeProblem> {
    let rows = 2 * d;
    let a = rng.normal_matrix(rows, d) / (rows as f64).sqrt();
    let b = rng.normal_vector(rows);
    let q = a.transpose() * &a;
    let lin = a.transpose() * &b;
    let lam = rng.uniform(0.05, 0.5) * lin.amax();
    CompositeProblem::quadratic_l1(&q, &lin, lam)
}

/// Random box-constrained least squares with half-widths uniform on `[0.1, 1]`.
pub fn random_box_ls(rng: &mut SplitMix64, d: usize) -> Result<CompositeProblem> {
    let rows = 2 * d;
    let a = rng.normal_matrix(rows, d) / (rows as f64).sqrt();
    let b = rng.normal_vector(rows) * 2.0;
    let half: Vec<f64> = (0..d).map(|_| rng.uniform(0.1, 1.0)).collect();
    let lo = Vector::from_iterator(d, half.iter().map(|h| -h));
    let hi = Vector::from_vec(half);
    CompositeProblem::box_constrained_ls(&a, &b, &lo, &hi)
}

/// Standard normal starting point scaled by `scale`.
pub fn random_start(rng: &mut SplitMix64, d: usize, scale: f64) -> Vector {
    rng.normal_vector(d) * scale
}
