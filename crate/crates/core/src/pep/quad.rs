//! Maximization of `Σ_k(T_k − t_k²) + T_{N−1}` over admissible sequences,
//! the surrogate whose maximizer minimizes the generalized mapping bound.
//!
//! In coordinate `t_i` (`i ≥ 1`, others fixed) the objective is
//! `(N − i + 1)t_i − t_i² + const`, and the admissible set is an interval:
//! `t_i ≤ (1 + √(1 + 4T_{i−1}))/2` from its own constraint, and
//! `t_i ≥ t_j² − (T_j − t_i)` from every later `j`. Each coordinate step is
//! therefore an exact clamp of `(N − i + 1)/2`.

use serde::Serialize;

use crate::rng::SplitMix64;
use crate::schedules::TSequence;

/// `Σ_{k<N}(T_k − t_k²) + T_{N−1}`.
pub fn quad_objective(t: &TSequence) -> f64 {
    t.slacks().sum::<f64>() + t.total()
}

fn objective(t: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut acc = 0.0;
    for &ti in t {
        total += ti;
        acc += total - ti * ti;
    }
    acc + total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// A start stops once a sweep improves the objective by less than this.
    pub improvement: f64,
    pub seed: u64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { restarts: 20, max_sweeps: 10_000, improvement: 1e-12, seed: 0x005e_ed0f_0c7a }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadResult {
    pub t: TSequence,
    pub objective: f64,
    /// Sweeps used by the winning start.
    pub sweeps: usize,
    /// Whether the winning start met the improvement threshold.
    pub converged: bool,
    pub starts: usize,
}

fn upper(prefix: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * prefix).sqrt()) / 2.0
}

/// Smallest positive value used for lower clamps.
const POSITIVE_FLOOR: f64 = 1e-12;

/// One pass over `t₁..t_{N−1}`; keeps `t` admissible.
fn sweep(t: &mut [f64]) {
    let n = t.len();
    for i in 1..n {
        let prefix: f64 = t[..i].iter().sum();
        let hi = upper(prefix);
        // t_i ≥ t_j² − (T_j − t_i) for each later j.
        let mut lo = POSITIVE_FLOOR;
        // rest = T_j − t_i
        let mut rest = prefix;
        for &tj in &t[i + 1..] {
            rest += tj;
            lo = lo.max(tj * tj - rest);
        }
        let target = (n - i + 1) as f64 / 2.0;
        t[i] = target.clamp(lo.min(hi), hi);
    }
}

fn ascend(mut t: Vec<f64>, opts: &QuadOptions) -> (Vec<f64>, f64, usize, bool) {
    let mut value = objective(&t);
    for s in 1..=opts.max_sweeps {
        sweep(&mut t);
        let next = objective(&t);
        let gain = next - value;
        value = next;
        if gain < opts.improvement {
            return (t, value, s, true);
        }
    }
    (t, value, opts.max_sweeps, false)
}

/// Greedy start: the unconstrained maximizer, clamped from the left.
fn greedy_start(n: usize) -> Vec<f64> {
    let mut t = vec![1.0];
    let mut prefix = 1.0;
    for i in 1..n {
        let v = ((n - i + 1) as f64 / 2.0).min(upper(prefix));
        t.push(v);
        prefix += v;
    }
    t
}

/// Random admissible start: each `t_i` uniform on `(0, upper(T_{i−1})]`.
fn random_start(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
    let mut t = vec![1.0];
    let mut prefix = 1.0;
    for _ in 1..n {
        let v = upper(prefix) * rng.uniform(0.05, 1.0);
        t.push(v);
        prefix += v;
    }
    t
}

pub fn maximize_quad(n: usize) -> QuadResult {
    maximize_quad_with(n, &QuadOptions::default())
}

/// Projected coordinate ascent from a greedy start and `restarts` random
/// admissible starts; returns the best end point.
pub fn maximize_quad_with(n: usize, opts: &QuadOptions) -> QuadResult {
    let n = n.max(1);
    let mut rng = SplitMix64::new(opts.seed);
    let mut best: Option<(Vec<f64>, f64, usize, bool)> = None;
    let starts = std::iter::once(greedy_start(n)).chain((0..opts.restarts).map(|_| random_start(n, &mut rng)));
    let mut count = 0;
    for start in starts {
        count += 1;
        let candidate = ascend(start, opts);
        if best.as_ref().is_none_or(|b| candidate.1 > b.1) {
            best = Some(candidate);
        }
    }
    let (t, objective, sweeps, converged) = best.expect("at least one start");
    let t = TSequence::custom(t).expect("non-empty");
    QuadResult { t, objective, sweeps, converged, starts: count }
}
