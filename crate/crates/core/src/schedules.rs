//! Momentum sequences `t_i` with partial sums `T_i = Σ_{l≤i} t_l`, and the
//! lower-triangular step coefficients `h_{i+1,k}` of fixed-step first-order
//! methods
//!
//! ```text
//! y_{i+1} = y_i + Σ_{k≤i} h_{i+1,k} (x_{k+1} − y_k).
//! ```
//!
//! A sequence is admissible when `t₀ = 1`, `t_i > 0` and `t_i² ≤ T_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack on `t_i² ≤ T_i`. The FISTA recursion meets it with equality,
/// so the check must absorb rounding in `T_i`.
pub const SQUARE_SLACK: f64 = 1e-12;

/// How `m` is rounded in the OPG sequence: `floor(N/2)` or `ceil(N/2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MRounding {
    #[default]
    Floor,
    Ceil,
}

impl MRounding {
    pub fn half(self, n: usize) -> usize {
        match self {
            MRounding::Floor => n / 2,
            MRounding::Ceil => n.div_ceil(2),
        }
    }
}

impl std::str::FromStr for MRounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(MRounding::Floor),
            "ceil" => Ok(MRounding::Ceil),
            other => Err(Error::InvalidArgument(format!("unknown rounding `{other}` (floor | ceil)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceLabel {
    Fista,
    Linear { a: f64 },
    Opg { n: usize, rounding: MRounding },
    Custom,
}

impl std::fmt::Display for SequenceLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceLabel::Fista => write!(f, "fista"),
            SequenceLabel::Linear { a } => write!(f, "linear(a={a})"),
            SequenceLabel::Opg { n, rounding } => write!(f, "opg(N={n}, {rounding:?})"),
            SequenceLabel::Custom => write!(f, "custom"),
        }
    }
}

/// `t₀..t_{N−1}` and their running sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TSequence {
    pub label: SequenceLabel,
    #[serde(rename = "t")]
    values: Vec<f64>,
    #[serde(rename = "T")]
    partial_sums: Vec<f64>,
}

fn fista_next(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

fn require_horizon(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("horizon N must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl TSequence {
    fn from_values(label: SequenceLabel, values: Vec<f64>) -> Self {
        let partial_sums = values
            .iter()
            .scan(0.0, |acc, &t| {
                *acc += t;
                Some(*acc)
            })
            .collect();
        Self { label, values, partial_sums }
    }

    /// `t₀ = 1`, `t_{i+1} = (1 + √(1 + 4t_i²))/2`.
    pub fn fista(n: usize) -> Result<Self> {
        require_horizon(n)?;
        let mut t = Vec::with_capacity(n);
        t.push(1.0);
        for i in 1..n {
            t.push(fista_next(t[i - 1]));
        }
        Ok(Self::from_values(SequenceLabel::Fista, t))
    }

    /// `t_i = (i + a)/a`, admissible for `a ≥ 2`.
    pub fn linear(n: usize, a: f64) -> Result<Self> {
        require_horizon(n)?;
        if !(a >= 2.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("linear sequence needs a ≥ 2, got {a}")));
        }
        let t = (0..n).map(|i| (i as f64 + a) / a).collect();
        Ok(Self::from_values(SequenceLabel::Linear { a }, t))
    }

    /// FISTA for `1 ≤ i ≤ m − 1`, then `t_i = (N − i + 1)/2` for `m ≤ i ≤ N − 1`,
    /// with `m = N/2` rounded per `rounding`.
    pub fn opg(n: usize, rounding: MRounding) -> Result<Self> {
        require_horizon(n)?;
        let m = rounding.half(n);
        let mut t = Vec::with_capacity(n);
        t.push(1.0);
        for i in 1..n {
            if i < m {
                t.push(fista_next(t[i - 1]));
            } else {
                t.push((n - i + 1) as f64 / 2.0);
            }
        }
        Ok(Self::from_values(SequenceLabel::Opg { n, rounding }, t))
    }

    /// Arbitrary values; not validated here, see [`TSequence::validate`].
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        require_horizon(values.len())?;
        Ok(Self::from_values(SequenceLabel::Custom, values))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn t(&self, i: usize) -> f64 {
        self.values[i]
    }

    #[allow(non_snake_case)]
    pub fn T(&self, i: usize) -> f64 {
        self.partial_sums[i]
    }

    /// `T_{N−1}`.
    pub fn total(&self) -> f64 {
        *self.partial_sums.last().expect("non-empty sequence")
    }

    /// Slack terms `T_i − t_i²`.
    pub fn slacks(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().zip(&self.partial_sums).map(|(t, tt)| tt - t * t)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.values.first() != Some(&1.0) {
            violations.push(Violation { index: 0, kind: ViolationKind::FirstNotOne, value: self.values[0] });
        }
        for (i, (&t, &tt)) in self.values.iter().zip(&self.partial_sums).enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                violations.push(Violation { index: i, kind: ViolationKind::NonPositive, value: t });
            } else if t * t > tt + SQUARE_SLACK * tt.max(1.0) {
                violations.push(Violation { index: i, kind: ViolationKind::SquareExceedsSum, value: t * t - tt });
            }
        }
        ValidationReport { violations }
    }

    /// Errors with the list of violations unless the sequence is admissible.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidSequence(report.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    FirstNotOne,
    NonPositive,
    SquareExceedsSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
    /// The offending `t_i`, or `t_i² − T_i` for `SquareExceedsSum`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violating_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.violations.iter().map(|v| v.index).collect();
        idx.dedup();
        idx
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let parts: Vec<String> =
            self.violations.iter().map(|v| format!("i={} {:?} ({})", v.index, v.kind, v.value)).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Lower-triangular step coefficients. Row `r` (0-based) holds
/// `h_{r+1,0..=r}`; a schedule of horizon `N` has `N − 1` rows, enough to
/// form `y₁..y_{N−1}` for an `N`-iteration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    horizon: usize,
    #[serde(rename = "h")]
    rows: Vec<Vec<f64>>,
}

impl StepSchedule {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != r + 1 {
                return Err(Error::InvalidArgument(format!("row {r} must have {} entries, has {}", r + 1, row.len())));
            }
            if row.iter().any(|h| !h.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {r} has a non-finite coefficient")));
            }
        }
        Ok(Self { horizon: rows.len() + 1, rows })
    }

    /// `h_{i+1,i} = 1`, all else zero: plain PGM.
    pub fn pgm(n: usize) -> Result<Self> {
        require_horizon(n)?;
        let rows = (0..n - 1)
            .map(|r| {
                let mut row = vec![0.0; r + 1];
                row[r] = 1.0;
                row
            })
            .collect();
        Ok(Self { horizon: n, rows })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `h_{i,k}` for `1 ≤ i ≤ N − 1`, `0 ≤ k < i`.
    pub fn h(&self, i: usize, k: usize) -> f64 {
        self.rows[i - 1][k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Largest entrywise difference, relative to `max(1, |entry|)`.
    pub fn max_relative_difference(&self, other: &StepSchedule) -> f64 {
        assert_eq!(self.horizon, other.horizon, "schedules of different horizon");
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Direct form:
/// `h_{i+1,k} = (t_{i+1}/T_{i+1})(t_k − Σ_{j=k+1}^{i} h_{j,k})` for `k < i` and
/// `h_{i+1,i} = 1 + (t_i − 1)t_{i+1}/T_{i+1}`.
pub fn step_coefficients(t: &TSequence) -> StepSchedule {
    let n = t.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
    // column_sums[k] = Σ_{j=k+1}^{i} h_{j,k} over the rows built so far.
    let mut column_sums = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let ratio = t.t(i + 1) / t.T(i + 1);
        let mut row = Vec::with_capacity(i + 1);
        row.extend(t.values()[..i].iter().zip(&column_sums).map(|(tk, sum)| ratio * (tk - sum)));
        row.push(1.0 + (t.t(i) - 1.0) * ratio);
        for (k, h) in row.iter().enumerate() {
            column_sums[k] += h;
        }
        rows.push(row);
    }
    StepSchedule { horizon: n, rows }
}

/// Row-to-row recursion with factor `c_i = (T_i − t_i)t_{i+1}/(t_i T_{i+1})`:
/// `h_{i+1,k} = c_i h_{i,k}` (`k ≤ i − 2`), `h_{i+1,i−1} = c_i(h_{i,i−1} − 1)`,
/// and the same diagonal as [`step_coefficients`].
pub fn step_coefficients_recursive(t: &TSequence) -> StepSchedule {
    let n = t.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let diag = 1.0 + (t.t(i) - 1.0) * t.t(i + 1) / t.T(i + 1);
        let mut row = Vec::with_capacity(i + 1);
        if i >= 1 {
            let factor = (t.T(i) - t.t(i)) * t.t(i + 1) / (t.t(i) * t.T(i + 1));
            let prev = &rows[i - 1];
            row.extend(prev[..i - 1].iter().map(|h| factor * h));
            row.push(factor * (prev[i - 1] - 1.0));
        }
        row.push(diag);
        rows.push(row);
    }
    StepSchedule { horizon: n, rows }
}
