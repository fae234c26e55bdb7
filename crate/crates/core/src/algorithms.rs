//! Runners for fixed-step first-order methods.
//!
//! Every runner performs `N` proximal gradient evaluations `x_{i+1} = p_c(y_i)`
//! and records the full trace. The mapping norm at `y_i` is taken from the
//! step itself, `c‖y_i − x_{i+1}‖`, so no prox is evaluated twice; only the
//! final point `x_N` needs one extra evaluation. `y_N` is never formed.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{CompositeProblem, InitialCondition};
use crate::proxgrad::{composite_gradient_mapping_with, prox_grad_step};
use crate::schedules::{MRounding, StepSchedule, TSequence};
use crate::Vector;

/// How `m` is picked for FPGM-m as a function of `N`; always clamped to `[1, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRule {
    Fixed(usize),
    /// `⌈N/3⌉`
    OneThirdCeil,
    /// `⌊2N/3⌋`
    TwoThirdsFloor,
}

impl MRule {
    pub fn resolve(self, n: usize) -> usize {
        let m = match self {
            MRule::Fixed(m) => m,
            MRule::OneThirdCeil => n.div_ceil(3),
            MRule::TwoThirdsFloor => 2 * n / 3,
        };
        m.clamp(1, n.max(1))
    }
}

/// Prox constant used by FPGM-σ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaConstant {
    /// `c = L/σ`, step `σ/L`.
    #[default]
    #[serde(rename = "L_over_sigma")]
    LOverSigma,
    /// `c = σL`, step `1/(σL)`.
    #[serde(rename = "sigma_L")]
    SigmaL,
}

impl SigmaConstant {
    pub fn constant(self, l: f64, sigma: f64) -> f64 {
        match self {
            SigmaConstant::LOverSigma => l / sigma,
            SigmaConstant::SigmaL => sigma * l,
        }
    }
}

impl std::str::FromStr for SigmaConstant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L_over_sigma" => Ok(SigmaConstant::LOverSigma),
            "sigma_L" => Ok(SigmaConstant::SigmaL),
            other => Err(Error::InvalidArgument(format!("unknown sigma constant `{other}` (L_over_sigma | sigma_L)"))),
        }
    }
}

/// The named algorithms with their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Algorithm {
    Pgm,
    Fpgm,
    FpgmM {
        m: MRule,
    },
    FpgmSigma {
        sigma: f64,
        #[serde(default)]
        constant: SigmaConstant,
    },
    FpgmOpg {
        #[serde(default)]
        rounding: MRounding,
    },
    /// GFPGM with `t_i = (i + a)/a`.
    FpgmA {
        a: f64,
    },
}

impl Algorithm {
    pub fn label(&self) -> String {
        match self {
            Algorithm::Pgm => "PGM".into(),
            Algorithm::Fpgm => "FPGM".into(),
            Algorithm::FpgmM { m } => match m {
                MRule::Fixed(m) => format!("FPGM-m(m={m})"),
                MRule::OneThirdCeil => "FPGM-m(m=ceil(N/3))".into(),
                MRule::TwoThirdsFloor => "FPGM-m(m=floor(2N/3))".into(),
            },
            Algorithm::FpgmSigma { sigma, .. } => format!("FPGM-sigma(sigma={sigma})"),
            Algorithm::FpgmOpg { .. } => "FPGM-OPG".into(),
            Algorithm::FpgmA { a } => format!("FPGM-a(a={a})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Algorithm::FpgmSigma { sigma, .. } if !(sigma > 0.0 && sigma < 1.0) => {
                Err(Error::InvalidArgument(format!("sigma must lie in (0, 1), got {sigma}")))
            }
            Algorithm::FpgmA { a } if !(a >= 2.0 && a.is_finite()) => {
                Err(Error::InvalidArgument(format!("a must be ≥ 2, got {a}")))
            }
            Algorithm::FpgmM { m: MRule::Fixed(0) } => Err(Error::InvalidArgument("m must be ≥ 1".into())),
            _ => Ok(()),
        }
    }

    /// Runs `n` iterations.
    pub fn run(&self, p: &CompositeProblem, init: &InitialCondition, n: usize) -> Result<RunTrace> {
        self.validate()?;
        let mut trace = match *self {
            Algorithm::Pgm => run_pgm(p, init, n)?,
            Algorithm::Fpgm => run_fpgm(p, init, n)?,
            Algorithm::FpgmM { m } => run_fpgm_m(p, init, m.resolve(n), n)?,
            Algorithm::FpgmSigma { sigma, constant } => run_fpgm_sigma(p, init, sigma, constant, n)?,
            Algorithm::FpgmOpg { rounding } => run_fpgm_opg(p, init, n, rounding)?,
            Algorithm::FpgmA { a } => run_gfpgm(p, &TSequence::linear(n, a)?, init)?,
        };
        trace.label = self.label();
        Ok(trace)
    }
}

/// Iterates and per-iteration diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub label: String,
    /// Constant `c` of the prox steps (`L` except for FPGM-σ).
    pub prox_constant: f64,
    /// `x₀..x_N`
    pub xs: Vec<Vector>,
    /// `y₀..y_{N−1}`
    pub ys: Vec<Vector>,
    /// `z₁..z_N`, only for the GFPGM′ form.
    pub zs: Option<Vec<Vector>>,
    /// `F(x₀)..F(x_N)`
    pub f_values: Vec<f64>,
    /// `‖∇̃F(y_i)‖` for `i < N`.
    pub map_norms_y: Vec<f64>,
    /// `‖∇̃F(x_N)‖`
    pub map_norm_x_n: f64,
    /// Minimum mapping norm over `{y₀..y_{N−1}, x_N}`.
    pub omega_min: f64,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.ys.len()
    }

    pub fn x_n(&self) -> &Vector {
        self.xs.last().expect("trace has x₀")
    }

    /// `F(x_N) − F*`.
    pub fn final_gap(&self, f_star: f64) -> f64 {
        self.f_values.last().copied().unwrap_or(f64::NAN) - f_star
    }

    /// Recomputes `max_i ‖x_{i+1} − p_c(y_i)‖`.
    pub fn max_prox_residual(&self, p: &CompositeProblem) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (y, x_next) in self.ys.iter().zip(&self.xs[1..]) {
            let px = prox_grad_step(p, y, self.prox_constant)?;
            worst = worst.max((&px - x_next).norm());
        }
        Ok(worst)
    }

    /// Largest per-coordinate deviation of the `x` and `y` iterates,
    /// relative to `max(1, |coordinate|)`.
    pub fn max_relative_deviation(&self, other: &RunTrace) -> f64 {
        assert_eq!(self.xs.len(), other.xs.len(), "traces of different length");
        let pairs = self.xs.iter().zip(&other.xs).chain(self.ys.iter().zip(&other.ys));
        pairs
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(u, v)| (u - v).abs() / u.abs().max(v.abs()).max(1.0)))
            .fold(0.0, f64::max)
    }

    /// Writes `iter,F_gap,map_norm_y,map_norm_xN,omega_min`, one row per
    /// `i = 0..=N`. `map_norm_y` is empty on the last row and `map_norm_xN`
    /// on all others; `omega_min` is the running minimum over the Ω points
    /// seen so far.
    pub fn write_csv<W: Write>(&self, mut w: W, f_star: f64) -> io::Result<()> {
        writeln!(w, "iter,F_gap,map_norm_y,map_norm_xN,omega_min")?;
        let n = self.iterations();
        let mut running = f64::INFINITY;
        for i in 0..=n {
            let gap = self.f_values[i] - f_star;
            if i < n {
                running = running.min(self.map_norms_y[i]);
                writeln!(w, "{i},{gap},{},,{running}", self.map_norms_y[i])?;
            } else {
                running = running.min(self.map_norm_x_n);
                writeln!(w, "{i},{gap},,{},{running}", self.map_norm_x_n)?;
            }
        }
        Ok(())
    }
}

/// Accumulates iterates; `finish` evaluates the final mapping and `F` values.
struct TraceBuilder<'a> {
    p: &'a CompositeProblem,
    c: f64,
    xs: Vec<Vector>,
    ys: Vec<Vector>,
    map_norms_y: Vec<f64>,
}

impl<'a> TraceBuilder<'a> {
    fn new(p: &'a CompositeProblem, init: &InitialCondition, c: f64, n: usize) -> Result<Self> {
        crate::error::check_dim(p.dim(), init.x0.len())?;
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        let mut xs = Vec::with_capacity(n + 1);
        xs.push(init.x0.clone());
        Ok(Self { p, c, xs, ys: Vec::with_capacity(n), map_norms_y: Vec::with_capacity(n) })
    }

    /// `x_{i+1} = p_c(y_i)`; returns `x_{i+1} − y_i`.
    fn step(&mut self, y: Vector) -> Result<Vector> {
        let x_next = prox_grad_step(self.p, &y, self.c)?;
        let diff = &x_next - &y;
        self.map_norms_y.push(self.c * diff.norm());
        self.ys.push(y);
        self.xs.push(x_next);
        Ok(diff)
    }

    fn x(&self, i: usize) -> &Vector {
        &self.xs[i]
    }

    fn y(&self, i: usize) -> &Vector {
        &self.ys[i]
    }

    fn finish(self, label: &str, zs: Option<Vec<Vector>>) -> Result<RunTrace> {
        let last = self.xs.last().expect("x₀");
        let map_norm_x_n = composite_gradient_mapping_with(self.p, last, self.c)?.norm;
        let f_values = self.xs.iter().map(|x| self.p.eval_f(x)).collect::<Result<Vec<_>>>()?;
        let omega_min = self.map_norms_y.iter().copied().fold(map_norm_x_n, f64::min);
        Ok(RunTrace {
            label: label.to_string(),
            prox_constant: self.c,
            xs: self.xs,
            ys: self.ys,
            zs,
            f_values,
            map_norms_y: self.map_norms_y,
            map_norm_x_n,
            omega_min,
        })
    }
}

/// Generic fixed-step method: `y_{i+1} = y_i + Σ_{k≤i} h_{i+1,k}(x_{k+1} − y_k)`.
pub fn run_fo(p: &CompositeProblem, h: &StepSchedule, init: &InitialCondition, n: usize) -> Result<RunTrace> {
    if h.horizon() < n {
        return Err(Error::HorizonMismatch { available: h.horizon(), requested: n });
    }
    let mut b = TraceBuilder::new(p, init, p.lipschitz(), n)?;
    let mut diffs: Vec<Vector> = Vec::with_capacity(n);
    let mut y = init.x0.clone();
    for i in 0..n {
        diffs.push(b.step(y.clone())?);
        if i + 1 < n {
            for (k, coeff) in h.row(i + 1).iter().enumerate() {
                if *coeff != 0.0 {
                    y.axpy(*coeff, &diffs[k], 1.0);
                }
            }
        }
    }
    b.finish("FO", None)
}

/// `x_{i+1} = p_L(x_i)`.
pub fn run_pgm(p: &CompositeProblem, init: &InitialCondition, n: usize) -> Result<RunTrace> {
    let mut b = TraceBuilder::new(p, init, p.lipschitz(), n)?;
    for i in 0..n {
        let y = b.x(i).clone();
        b.step(y)?;
    }
    b.finish("PGM", None)
}

fn gfpgm_coefficients(t: &TSequence, i: usize) -> (f64, f64) {
    let scale = t.t(i + 1) / (t.t(i) * t.T(i + 1));
    ((t.T(i) - t.t(i)) * scale, (t.t(i) * t.t(i) - t.T(i)) * scale)
}

/// GFPGM driven by an admissible `t`; runs `t.len()` iterations.
pub fn run_gfpgm(p: &CompositeProblem, t: &TSequence, init: &InitialCondition) -> Result<RunTrace> {
    let t = t.clone().validated()?;
    let n = t.len();
    let mut b = TraceBuilder::new(p, init, p.lipschitz(), n)?;
    let mut y = init.x0.clone();
    for i in 0..n {
        b.step(y)?;
        if i + 1 == n {
            break;
        }
        let (momentum, correction) = gfpgm_coefficients(&t, i);
        let x_next = b.x(i + 1);
        let mut next = x_next.clone();
        next.axpy(momentum, &(x_next - b.x(i)), 1.0);
        next.axpy(correction, &(x_next - b.y(i)), 1.0);
        y = next;
    }
    b.finish("GFPGM", None)
}

/// GFPGM′: `z_{i+1} = y₀ − (1/L)Σ_{k≤i} t_k ∇̃F(y_k)` and
/// `y_{i+1} = (1 − t_{i+1}/T_{i+1}) x_{i+1} + (t_{i+1}/T_{i+1}) z_{i+1}`.
pub fn run_gfpgm_prime(p: &CompositeProblem, t: &TSequence, init: &InitialCondition) -> Result<RunTrace> {
    let t = t.clone().validated()?;
    let n = t.len();
    let mut b = TraceBuilder::new(p, init, p.lipschitz(), n)?;
    let mut zs = Vec::with_capacity(n);
    let mut z = init.x0.clone();
    let mut y = init.x0.clone();
    for i in 0..n {
        // −(1/L)∇̃F(y_i) = x_{i+1} − y_i
        let diff = b.step(y)?;
        z.axpy(t.t(i), &diff, 1.0);
        zs.push(z.clone());
        if i + 1 == n {
            break;
        }
        let w = t.t(i + 1) / t.T(i + 1);
        y = b.x(i + 1) * (1.0 - w) + &z * w;
    }
    b.finish("GFPGM'", Some(zs))
}

/// FISTA momentum `y_{i+1} = x_{i+1} + ((t_i − 1)/t_{i+1})(x_{i+1} − x_i)` for
/// `i < momentum_steps`, plain `y_{i+1} = x_{i+1}` afterwards.
fn run_fista_like(
    p: &CompositeProblem,
    init: &InitialCondition,
    n: usize,
    momentum_steps: usize,
    c: f64,
    label: &str,
) -> Result<RunTrace> {
    let mut b = TraceBuilder::new(p, init, c, n)?;
    let mut t: f64 = 1.0;
    let mut y = init.x0.clone();
    for i in 0..n {
        b.step(y)?;
        if i + 1 == n {
            break;
        }
        let x_next = b.x(i + 1).clone();
        y = if i < momentum_steps {
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let beta = (t - 1.0) / t_next;
            t = t_next;
            let mut next = x_next.clone();
            next.axpy(beta, &(&x_next - b.x(i)), 1.0);
            next
        } else {
            x_next
        };
    }
    b.finish(label, None)
}

pub fn run_fpgm(p: &CompositeProblem, init: &InitialCondition, n: usize) -> Result<RunTrace> {
    run_fista_like(p, init, n, n, p.lipschitz(), "FPGM")
}

/// FISTA momentum for the first `m` iterations, PGM afterwards.
pub fn run_fpgm_m(p: &CompositeProblem, init: &InitialCondition, m: usize, n: usize) -> Result<RunTrace> {
    if m < 1 || m > n {
        return Err(Error::IndexOutOfRange { index: m, lo: 1, hi: n });
    }
    run_fista_like(p, init, n, m, p.lipschitz(), "FPGM-m")
}

/// FISTA with the prox constant replaced per `constant`.
pub fn run_fpgm_sigma(
    p: &CompositeProblem,
    init: &InitialCondition,
    sigma: f64,
    constant: SigmaConstant,
    n: usize,
) -> Result<RunTrace> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidArgument(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    run_fista_like(p, init, n, n, constant.constant(p.lipschitz(), sigma), "FPGM-sigma")
}

/// GFPGM with the OPG sequence for horizon `n`.
pub fn run_fpgm_opg(p: &CompositeProblem, init: &InitialCondition, n: usize, rounding: MRounding) -> Result<RunTrace> {
    let mut trace = run_gfpgm(p, &TSequence::opg(n, rounding)?, init)?;
    trace.label = "FPGM-OPG".into();
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_lasso, random_start, SplitMix64};
    use crate::schedules::step_coefficients;
    use crate::Matrix;
    use approx::assert_relative_eq;

    fn lasso(seed: u64, d: usize) -> (CompositeProblem, InitialCondition) {
        let mut rng = SplitMix64::new(seed);
        let mut p = random_lasso(&mut rng, d).unwrap();
        p.solve_reference(1e-12).unwrap();
        let init = InitialCondition::from_reference(&p, random_start(&mut rng, d, 2.0)).unwrap();
        (p, init)
    }

    #[test]
    fn identity_schedule_is_pgm() {
        let (p, init) = lasso(1, 8);
        let fo = run_fo(&p, &StepSchedule::pgm(12).unwrap(), &init, 12).unwrap();
        let pgm = run_pgm(&p, &init, 12).unwrap();
        // y + (x − y) differs from x only by rounding.
        assert!(fo.max_relative_deviation(&pgm) <= 1e-14);
    }

    #[test]
    fn horizon_must_cover_run() {
        let (p, init) = lasso(1, 4);
        let err = run_fo(&p, &StepSchedule::pgm(3).unwrap(), &init, 5);
        assert!(matches!(err, Err(Error::HorizonMismatch { available: 3, requested: 5 })));
    }

    #[test]
    fn single_iteration_is_one_prox_step() {
        let (p, init) = lasso(2, 6);
        let expected = prox_grad_step(&p, &init.x0, p.lipschitz()).unwrap();
        let h = step_coefficients(&TSequence::linear(4, 3.0).unwrap());
        for trace in [
            run_fo(&p, &h, &init, 1).unwrap(),
            run_pgm(&p, &init, 1).unwrap(),
            run_fpgm(&p, &init, 1).unwrap(),
            run_gfpgm(&p, &TSequence::fista(1).unwrap(), &init).unwrap(),
            run_fpgm_opg(&p, &init, 1, MRounding::Floor).unwrap(),
        ] {
            assert_eq!(trace.xs[1], expected, "{}", trace.label);
        }
        let sigma = run_fpgm_sigma(&p, &init, 0.5, SigmaConstant::LOverSigma, 1).unwrap();
        assert_eq!(sigma.xs[1], prox_grad_step(&p, &init.x0, 2.0 * p.lipschitz()).unwrap());
    }

    #[test]
    fn pgm_halving_recursion() {
        // f = ¼x² declared with L = 1: x_{i+1} = x_i/2.
        let q = Matrix::from_element(1, 1, 0.5);
        let p = CompositeProblem::quadratic_l1(&q, &Vector::zeros(1), 0.0).unwrap().with_lipschitz(1.0).unwrap();
        let init = InitialCondition::new(Vector::from_element(1, 1.0), 1.0).unwrap();
        let trace = run_pgm(&p, &init, 8).unwrap();
        for (i, x) in trace.xs.iter().enumerate() {
            assert_eq!(x[0], 0.5f64.powi(i as i32));
        }
    }

    #[test]
    fn pgm_from_minimizer_stays() {
        let (p, _) = lasso(3, 5);
        let x_star = p.reference().unwrap().x_star.clone();
        let init = InitialCondition::new(x_star.clone(), 1.0).unwrap();
        let trace = run_pgm(&p, &init, 5).unwrap();
        for x in &trace.xs {
            assert!((x - &x_star).norm() <= 1e-11);
        }
    }

    #[test]
    fn fpgm_equals_gfpgm_with_fista() {
        let (p, init) = lasso(4, 10);
        let a = run_fpgm(&p, &init, 30).unwrap();
        let b = run_gfpgm(&p, &TSequence::fista(30).unwrap(), &init).unwrap();
        assert!(a.max_relative_deviation(&b) <= 1e-12);
    }

    #[test]
    fn fpgm_m_with_full_momentum_is_fpgm() {
        let (p, init) = lasso(5, 10);
        let a = run_fpgm(&p, &init, 15).unwrap();
        let b = run_fpgm_m(&p, &init, 15, 15).unwrap();
        assert_eq!(a.xs, b.xs);
        assert!(run_fpgm_m(&p, &init, 0, 15).is_err());
        assert!(run_fpgm_m(&p, &init, 16, 15).is_err());
    }

    #[test]
    fn fpgm_m_tail_is_monotone() {
        let (p, init) = lasso(6, 10);
        let trace = run_fpgm_m(&p, &init, 1, 25).unwrap();
        // After the single momentum step, y_i = x_i for i ≥ 2.
        for i in 2..25 {
            assert_eq!(trace.ys[i], trace.xs[i]);
            assert!(trace.map_norms_y[i] <= trace.map_norms_y[i - 1] + 1e-10);
        }
    }

    #[test]
    fn gfpgm_prime_first_step() {
        let (p, init) = lasso(7, 6);
        let t = TSequence::linear(3, 4.0).unwrap();
        let trace = run_gfpgm_prime(&p, &t, &init).unwrap();
        let l = p.lipschitz();
        let g0 = (&init.x0 - &trace.xs[1]) * l;
        let z1 = &init.x0 - &g0 * (t.t(0) / l);
        let w = t.t(1) / t.T(1);
        let y1 = &trace.xs[1] * (1.0 - w) + &z1 * w;
        assert!((&trace.zs.as_ref().unwrap()[0] - &z1).norm() <= 1e-14);
        assert!((&trace.ys[1] - &y1).norm() <= 1e-14);
    }

    #[test]
    fn gfpgm_rejects_invalid_sequence() {
        let (p, init) = lasso(8, 4);
        let bad = TSequence::custom(vec![1.0, 3.0]).unwrap();
        assert!(matches!(run_gfpgm(&p, &bad, &init), Err(Error::InvalidSequence(_))));
        assert!(matches!(run_gfpgm_prime(&p, &bad, &init), Err(Error::InvalidSequence(_))));
    }

    #[test]
    fn sigma_close_to_one_tracks_fpgm() {
        let (p, init) = lasso(9, 8);
        let a = run_fpgm(&p, &init, 20).unwrap();
        let b = run_fpgm_sigma(&p, &init, 0.999, SigmaConstant::LOverSigma, 20).unwrap();
        assert!(a.max_relative_deviation(&b) <= 1e-2);
        assert!(run_fpgm_sigma(&p, &init, 1.0, SigmaConstant::LOverSigma, 5).is_err());
        assert!(run_fpgm_sigma(&p, &init, 0.0, SigmaConstant::SigmaL, 5).is_err());
    }

    #[test]
    fn trace_invariants() {
        let (p, init) = lasso(10, 8);
        let trace = run_fpgm_opg(&p, &init, 12, MRounding::Floor).unwrap();
        assert!(trace.max_prox_residual(&p).unwrap() <= 1e-12);
        let manual = trace.map_norms_y.iter().copied().chain([trace.map_norm_x_n]).fold(f64::INFINITY, f64::min);
        assert_eq!(trace.omega_min, manual);
        assert_eq!(trace.ys.len(), 12);
        assert_eq!(trace.xs.len(), 13);
    }

    #[test]
    fn pgm_cost_and_mapping_monotone() {
        let (p, init) = lasso(11, 12);
        let trace = run_pgm(&p, &init, 40).unwrap();
        for i in 1..trace.f_values.len() {
            assert!(trace.f_values[i] <= trace.f_values[i - 1] + 1e-10 * trace.f_values[i - 1].abs().max(1.0));
        }
        for i in 1..trace.map_norms_y.len() {
            assert!(trace.map_norms_y[i] <= trace.map_norms_y[i - 1] + 1e-10);
        }
    }

    #[test]
    fn csv_layout() {
        let (p, init) = lasso(12, 3);
        let trace = run_pgm(&p, &init, 10).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf, p.reference().unwrap().f_star).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[0], "iter,F_gap,map_norm_y,map_norm_xN,omega_min");
        assert!(lines[11].starts_with("10,") && lines[11].contains(",,"));
        let last_omega: f64 = lines[11].rsplit(',').next().unwrap().parse().unwrap();
        assert_relative_eq!(last_omega, trace.omega_min);
    }

    #[test]
    fn m_rule_resolution() {
        assert_eq!(MRule::OneThirdCeil.resolve(30), 10);
        assert_eq!(MRule::OneThirdCeil.resolve(31), 11);
        assert_eq!(MRule::TwoThirdsFloor.resolve(30), 20);
        assert_eq!(MRule::TwoThirdsFloor.resolve(1), 1);
        assert_eq!(MRule::Fixed(50).resolve(10), 10);
    }

    #[test]
    fn algorithm_json_round_trip() {
        let algos = vec![
            Algorithm::Pgm,
            Algorithm::FpgmM { m: MRule::Fixed(3) },
            Algorithm::FpgmSigma { sigma: 0.78, constant: SigmaConstant::LOverSigma },
            Algorithm::FpgmOpg { rounding: MRounding::Floor },
            Algorithm::FpgmA { a: 4.0 },
        ];
        let json = serde_json::to_string(&algos).unwrap();
        let back: Vec<Algorithm> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, algos);
        let parsed: Algorithm = serde_json::from_str(r#"{"name":"fpgm_sigma","sigma":0.5}"#).unwrap();
        assert_eq!(parsed, Algorithm::FpgmSigma { sigma: 0.5, constant: SigmaConstant::LOverSigma });
        assert!(Algorithm::FpgmA { a: 1.0 }.validate().is_err());
    }
}
