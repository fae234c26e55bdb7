//! Closed-form worst-case bounds. Cost bounds bound `F(x_N) − F*`; mapping
//! bounds bound the smallest composite gradient mapping norm over
//! `Ω = {y₀, …, y_{N−1}, x_N}` (the final norm for PGM and FPGM-m).

use serde::Serialize;

use crate::algorithms::{Algorithm, MRule};
use crate::error::{Error, Result};
use crate::schedules::TSequence;

/// Horizon at which asymptotic constants are evaluated.
pub const ASYMPTOTIC_N: usize = 1_000_000;

fn require(formula: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::BelowValidity { formula, n, min })
    } else {
        Ok(())
    }
}

fn check_m(m: usize, n: usize) -> Result<()> {
    if m < 1 || m > n {
        Err(Error::IndexOutOfRange { index: m, lo: 1, hi: n })
    } else {
        Ok(())
    }
}

/// `LR²/(2N)`
pub fn pgm_cost_bound(n: usize, l: f64, r: f64) -> Result<f64> {
    require("pgm_cost", n, 1)?;
    Ok(l * r * r / (2.0 * n as f64))
}

/// `2LR/√((N−1)(N+2))`, for `N ≥ 2`.
pub fn pgm_mapping_bound(n: usize, l: f64, r: f64) -> Result<f64> {
    require("pgm_mapping", n, 2)?;
    let n = n as f64;
    Ok(2.0 * l * r / ((n - 1.0) * (n + 2.0)).sqrt())
}

/// `2LR²/(N+1)²`
pub fn fpgm_cost_bound(n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_cost", n, 1)?;
    Ok(2.0 * l * r * r / ((n + 1) as f64).powi(2))
}

/// `2LR²/(m+1)²`: the momentum phase bound, kept by the monotone PGM tail.
pub fn fpgm_m_cost_bound(m: usize, n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_m_cost", n, 1)?;
    check_m(m, n)?;
    Ok(2.0 * l * r * r / ((m + 1) as f64).powi(2))
}

/// `2LR/((m+1)√(N−m+1))`, bounding `‖∇̃F(x_N)‖`.
pub fn fpgm_m_mapping_bound(m: usize, n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_m_mapping", n, 1)?;
    check_m(m, n)?;
    Ok(2.0 * l * r / ((m + 1) as f64 * ((n - m + 1) as f64).sqrt()))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("sigma must lie in (0, 1), got {sigma}")))
    }
}

/// `2LR²/(σ²N²)`
pub fn fpgm_sigma_cost_bound(sigma: f64, n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_sigma_cost", n, 1)?;
    check_sigma(sigma)?;
    Ok(2.0 * l * r * r / (sigma * sigma * (n as f64).powi(2)))
}

/// `(2√3/σ²)√((1+σ)/(1−σ))·LR/N^{3/2}` for the mapping with constant `L/σ`.
/// Advisory: carried over from an external big-O analysis.
pub fn fpgm_sigma_mapping_bound(sigma: f64, n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_sigma_mapping", n, 1)?;
    check_sigma(sigma)?;
    let c = 2.0 * 3f64.sqrt() / (sigma * sigma) * ((1.0 + sigma) / (1.0 - sigma)).sqrt();
    Ok(c * l * r / (n as f64).powf(1.5))
}

/// `LR²/(2T_{N−1})`
pub fn gfpgm_cost_bound(t: &TSequence, l: f64, r: f64) -> f64 {
    l * r * r / (2.0 * t.total())
}

/// `LR/√(Σ_k(T_k − t_k²) + T_{N−1})`
pub fn gfpgm_mapping_bound(t: &TSequence, l: f64, r: f64) -> f64 {
    l * r / (t.slacks().sum::<f64>() + t.total()).sqrt()
}

/// `LR/√T_{N−1}`, bounding `‖∇̃F(x_N)‖` through the cost bound.
pub fn gfpgm_final_mapping_bound(t: &TSequence, l: f64, r: f64) -> f64 {
    l * r / t.total().sqrt()
}

fn check_a(a: f64) -> Result<()> {
    if a >= 2.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("a must be ≥ 2, got {a}")))
    }
}

/// `aLR²/(N(N+2a−1))`
pub fn fpgm_a_cost_bound(a: f64, n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_a_cost", n, 1)?;
    check_a(a)?;
    let n = n as f64;
    Ok(a * l * r * r / (n * (n + 2.0 * a - 1.0)))
}

/// `a√6·LR/√(N((a−2)N² + 3(a²−a+1)N + (3a²+2a−1)))`
pub fn fpgm_a_mapping_bound(a: f64, n: usize, l: f64, r: f64) -> Result<f64> {
    require("fpgm_a_mapping", n, 1)?;
    check_a(a)?;
    let n = n as f64;
    let inner = (a - 2.0) * n * n + 3.0 * (a * a - a + 1.0) * n + (3.0 * a * a + 2.0 * a - 1.0);
    Ok(a * 6f64.sqrt() * l * r / (n * inner).sqrt())
}

/// `4LR²/(N(N+4))`
pub fn opg_cost_bound(n: usize, l: f64, r: f64) -> Result<f64> {
    require("opg_cost", n, 1)?;
    let n = n as f64;
    Ok(4.0 * l * r * r / (n * (n + 4.0)))
}

/// `2√6·LR/(N√(N−2))`, for `N ≥ 3`.
pub fn opg_mapping_bound(n: usize, l: f64, r: f64) -> Result<f64> {
    require("opg_mapping", n, 3)?;
    let n = n as f64;
    Ok(2.0 * 6f64.sqrt() * l * r / (n * (n - 2.0).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub formula: &'static str,
    /// `bound(N)·N^rate` at `N = ASYMPTOTIC_N`, `L = R = 1`.
    pub asymptotic_constant: Option<f64>,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub n: usize,
    pub l: f64,
    pub r: f64,
    pub cost: Option<BoundValue>,
    pub mapping: Option<BoundValue>,
    /// Bound on `‖∇̃F(x_N)‖` alone, where one is available separately.
    pub final_mapping: Option<BoundValue>,
}

type Formula = dyn Fn(usize, f64, f64) -> Result<f64>;

/// Evaluates `f` at `(n, l, r)`; `None` if `n` is below its validity range.
fn evaluate(
    formula: &'static str,
    rate: f64,
    n: usize,
    l: f64,
    r: f64,
    f: &Formula,
    asymptotic: bool,
) -> Result<Option<BoundValue>> {
    let value = match f(n, l, r) {
        Ok(v) => v,
        Err(Error::BelowValidity { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let asymptotic_constant =
        if asymptotic { Some(f(ASYMPTOTIC_N, 1.0, 1.0)? * (ASYMPTOTIC_N as f64).powf(rate)) } else { None };
    Ok(Some(BoundValue { value, formula, asymptotic_constant, rate }))
}

/// Every closed-form bound that applies to `algo` at horizon `n`. Formulas
/// whose validity range excludes `n` are left as `None`.
pub fn analytic_bounds(algo: &Algorithm, n: usize, l: f64, r: f64) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    algo.validate()?;
    let (cost, mapping, final_mapping) = match *algo {
        Algorithm::Pgm => (
            evaluate("pgm_cost", 1.0, n, l, r, &pgm_cost_bound, true)?,
            evaluate("pgm_mapping", 1.0, n, l, r, &pgm_mapping_bound, true)?,
            None,
        ),
        Algorithm::Fpgm => {
            let mapping = |n: usize, l: f64, r: f64| fpgm_m_mapping_bound(n, n, l, r);
            (
                evaluate("fpgm_cost", 2.0, n, l, r, &fpgm_cost_bound, true)?,
                evaluate("fpgm_m_mapping(m=N)", 1.0, n, l, r, &mapping, true)?,
                None,
            )
        }
        Algorithm::FpgmM { m } => {
            let asymptotic = !matches!(m, MRule::Fixed(_));
            let cost = move |n: usize, l: f64, r: f64| fpgm_m_cost_bound(m.resolve(n), n, l, r);
            let mapping = move |n: usize, l: f64, r: f64| fpgm_m_mapping_bound(m.resolve(n), n, l, r);
            (
                evaluate("fpgm_m_cost", 2.0, n, l, r, &cost, asymptotic)?,
                evaluate("fpgm_m_mapping", 1.5, n, l, r, &mapping, asymptotic)?,
                None,
            )
        }
        Algorithm::FpgmSigma { sigma, .. } => {
            let cost = move |n: usize, l: f64, r: f64| fpgm_sigma_cost_bound(sigma, n, l, r);
            let mapping = move |n: usize, l: f64, r: f64| fpgm_sigma_mapping_bound(sigma, n, l, r);
            (
                evaluate("fpgm_sigma_cost", 2.0, n, l, r, &cost, true)?,
                evaluate("fpgm_sigma_mapping", 1.5, n, l, r, &mapping, true)?,
                None,
            )
        }
        Algorithm::FpgmOpg { rounding } => {
            let t = TSequence::opg(n, rounding)?;
            (
                evaluate("opg_cost", 2.0, n, l, r, &opg_cost_bound, true)?,
                evaluate("opg_mapping", 1.5, n, l, r, &opg_mapping_bound, true)?,
                Some(final_mapping_value(&t, l, r)),
            )
        }
        Algorithm::FpgmA { a } => {
            let t = TSequence::linear(n, a)?;
            let cost = move |n: usize, l: f64, r: f64| fpgm_a_cost_bound(a, n, l, r);
            let mapping = move |n: usize, l: f64, r: f64| fpgm_a_mapping_bound(a, n, l, r);
            (
                evaluate("fpgm_a_cost", 2.0, n, l, r, &cost, true)?,
                evaluate("fpgm_a_mapping", 1.5, n, l, r, &mapping, true)?,
                Some(final_mapping_value(&t, l, r)),
            )
        }
    };
    Ok(BoundReport { label: algo.label(), n, l, r, cost, mapping, final_mapping })
}

fn final_mapping_value(t: &TSequence, l: f64, r: f64) -> BoundValue {
    BoundValue {
        value: gfpgm_final_mapping_bound(t, l, r),
        formula: "gfpgm_final_mapping",
        asymptotic_constant: None,
        rate: 1.0,
    }
}

/// Bounds of GFPGM driven by an arbitrary admissible `t`.
pub fn gfpgm_bounds(t: &TSequence, l: f64, r: f64) -> Result<BoundReport> {
    let t = t.clone().validated()?;
    let plain = |value, formula| Some(BoundValue { value, formula, asymptotic_constant: None, rate: 0.0 });
    Ok(BoundReport {
        label: format!("GFPGM[{}]", t.label),
        n: t.len(),
        l,
        r,
        cost: plain(gfpgm_cost_bound(&t, l, r), "gfpgm_cost"),
        mapping: plain(gfpgm_mapping_bound(&t, l, r), "gfpgm_mapping"),
        final_mapping: Some(final_mapping_value(&t, l, r)),
    })
}
