//! Experiment harness behind the `fpgm` binary: trace sweeps, certificate
//! reports, bound comparison tables and the surrogate maximization report.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fpgm::algorithms::{Algorithm, MRule, RunTrace, SigmaConstant};
use fpgm::pep::{
    analytic_bounds, check_feasibility, cost_certificate, cost_closed_form, dual_bound_cost, dual_bound_mapping,
    fpgm_a_cost_bound, fpgm_a_mapping_bound, gfpgm_bounds, mapping_certificate, mapping_closed_form, maximize_quad,
    opg_cost_bound, opg_mapping_bound, quad_objective, BoundReport, Certificate, FeasibilityReport,
};
use fpgm::problems::{CompositeProblem, InitialCondition, ProblemDocument};
use fpgm::rng::{random_box_ls, random_lasso, random_start, SplitMix64};
use fpgm::schedules::{step_coefficients, MRounding, TSequence, ValidationReport};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Ratio slack tolerated before `compare` reports a violated bound.
pub const RATIO_SLACK: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fpgm::error::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratedKind {
    Lasso,
    BoxLs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ProblemSpec {
    /// Drawn from the seeded generator.
    Generated { kind: GeneratedKind, dim: usize },
    /// A problem document as written by `run` to `problem.json`.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    /// `None` selects [`default_suite`]; an explicit empty list is rejected.
    #[serde(default)]
    pub algorithms: Option<Vec<Algorithm>>,
    pub horizons: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Fixed-point tolerance of the reference solve.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Standard deviation of the Gaussian starting point.
    #[serde(default = "default_start_scale")]
    pub start_scale: f64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_true")]
    pub solve_reference: bool,
}

fn default_tolerance() -> f64 {
    fpgm::problems::DEFAULT_REFERENCE_TOL
}

fn default_start_scale() -> f64 {
    1.0
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::Generated { kind: GeneratedKind::Lasso, dim: 30 },
            algorithms: None,
            horizons: vec![20],
            seed: 0,
            tolerance: default_tolerance(),
            start_scale: default_start_scale(),
            out_dir: default_out_dir(),
            solve_reference: true,
        }
    }
}

/// PGM, FPGM, FPGM-σ (σ = 0.78), FPGM-m (m = ⌊2N/3⌋), FPGM-OPG and FPGM-a (a = 4).
pub fn default_suite() -> Vec<Algorithm> {
    vec![
        Algorithm::Pgm,
        Algorithm::Fpgm,
        Algorithm::FpgmSigma { sigma: 0.78, constant: SigmaConstant::default() },
        Algorithm::FpgmM { m: MRule::TwoThirdsFloor },
        Algorithm::FpgmOpg { rounding: MRounding::default() },
        Algorithm::FpgmA { a: 4.0 },
    ]
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub m_rounding: Option<MRounding>,
    pub sigma_constant: Option<SigmaConstant>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out_dir {
            self.out_dir = out.clone();
        }
        if let Some(tol) = o.tolerance {
            self.tolerance = tol;
        }
        if o.m_rounding.is_none() && o.sigma_constant.is_none() {
            return;
        }
        let mut algos = self.algorithms.take().unwrap_or_else(default_suite);
        for algo in &mut algos {
            match algo {
                Algorithm::FpgmOpg { rounding } => {
                    if let Some(r) = o.m_rounding {
                        *rounding = r;
                    }
                }
                Algorithm::FpgmSigma { constant, .. } => {
                    if let Some(c) = o.sigma_constant {
                        *constant = c;
                    }
                }
                _ => {}
            }
        }
        self.algorithms = Some(algos);
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.algorithms.clone().unwrap_or_else(default_suite)
    }

    /// Rejects empty algorithm or horizon lists, `N = 0` and out-of-range parameters.
    pub fn validate(&self) -> Result<()> {
        if matches!(&self.algorithms, Some(a) if a.is_empty()) {
            return Err(CliError::Usage("algorithm list is empty; omit `algorithms` for the default suite".into()));
        }
        if self.horizons.is_empty() {
            return Err(CliError::Usage("horizon list is empty".into()));
        }
        if self.horizons.contains(&0) {
            return Err(CliError::Config("every horizon N must be at least 1".into()));
        }
        if let ProblemSpec::Generated { dim: 0, .. } = self.problem {
            return Err(CliError::Config("problem dimension must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(CliError::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.start_scale > 0.0 && self.start_scale.is_finite()) {
            return Err(CliError::Config(format!("start_scale must be positive, got {}", self.start_scale)));
        }
        for algo in self.algorithms() {
            algo.validate().map_err(|e| CliError::Config(format!("{}: {e}", algo.label())))?;
        }
        Ok(())
    }
}

/// A problem with its reference solution and starting point.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: CompositeProblem,
    pub init: InitialCondition,
    pub f_star: f64,
}

/// Builds the problem, solves or loads its reference, and draws `x₀`.
///
/// Generated problems consume the seeded stream first and `x₀` is drawn next;
/// file problems draw `x₀` from a fresh stream with the same seed.
pub fn prepare(config: &ExperimentConfig) -> Result<Instance> {
    let mut rng = SplitMix64::new(config.seed);
    let mut problem = match &config.problem {
        ProblemSpec::Generated { kind: GeneratedKind::Lasso, dim } => random_lasso(&mut rng, *dim)?,
        ProblemSpec::Generated { kind: GeneratedKind::BoxLs, dim } => random_box_ls(&mut rng, *dim)?,
        ProblemSpec::File { path } => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let doc: ProblemDocument = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid problem file {}: {e}", path.display())))?;
            CompositeProblem::from_document(&doc)?
        }
    };
    if problem.reference().is_none() {
        if !config.solve_reference {
            return Err(CliError::Failed(
                "problem has no reference solution (x_star, F_star); set \"solve_reference\": true in the config \
                 or supply them in the problem file"
                    .into(),
            ));
        }
        problem.solve_reference(config.tolerance).map_err(|e| {
            CliError::Failed(format!("reference solve failed: {e}; loosen `tolerance` or check the problem data"))
        })?;
    }
    let f_star = problem.reference().expect("reference present").f_star;
    let x0 = random_start(&mut rng, problem.dim(), config.start_scale);
    let init = InitialCondition::from_reference(&problem, x0)?;
    Ok(Instance { problem, init, f_star })
}

/// File-name stem for an algorithm label: lowercase alphanumerics joined by `_`.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

pub fn trace_file_name(algo: &Algorithm, n: usize) -> String {
    format!("{}_N{n}.csv", slug(&algo.label()))
}

/// Writes through a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Runs every (algorithm, N) cell and writes one CSV per cell plus
/// `problem.json`. Returns the written paths in order.
pub fn cmd_run(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let inst = prepare(config)?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let doc = serde_json::to_vec_pretty(&inst.problem.to_document()).expect("problem document serializes");
    let problem_path = dir.join("problem.json");
    write_atomic(&problem_path, &doc)?;
    written.push(problem_path);
    for algo in config.algorithms() {
        for &n in &config.horizons {
            let trace = algo.run(&inst.problem, &inst.init, n)?;
            let mut buf = Vec::new();
            trace.write_csv(&mut buf, inst.f_star).expect("writing to memory");
            let path = dir.join(trace_file_name(&algo, n));
            write_atomic(&path, &buf)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub label: String,
    pub n: usize,
    pub cost_bound: Option<f64>,
    pub f_gap: f64,
    pub mapping_bound: Option<f64>,
    pub omega_min: f64,
}

impl CompareRow {
    pub fn cost_ratio(&self) -> Option<f64> {
        self.cost_bound.map(|b| ratio(self.f_gap, b))
    }

    pub fn mapping_ratio(&self) -> Option<f64> {
        self.mapping_bound.map(|b| ratio(self.omega_min, b))
    }

    pub fn within_bounds(&self) -> bool {
        [self.cost_ratio(), self.mapping_ratio()].into_iter().flatten().all(|r| r <= 1.0 + RATIO_SLACK)
    }
}

/// Observed over bound; a gap at or below zero counts as ratio 0.
fn ratio(observed: f64, bound: f64) -> f64 {
    if observed <= 0.0 {
        0.0
    } else {
        observed / bound
    }
}

fn compare_row(trace: &RunTrace, bounds: &BoundReport, f_star: f64) -> CompareRow {
    CompareRow {
        label: trace.label.clone(),
        n: bounds.n,
        cost_bound: bounds.cost.as_ref().map(|b| b.value),
        f_gap: trace.final_gap(f_star),
        mapping_bound: bounds.mapping.as_ref().map(|b| b.value),
        omega_min: trace.omega_min,
    }
}

pub fn compare_rows(config: &ExperimentConfig) -> Result<Vec<CompareRow>> {
    config.validate()?;
    let inst = prepare(config)?;
    let (l, r) = (inst.problem.lipschitz(), inst.init.radius);
    let mut rows = Vec::new();
    for &n in &config.horizons {
        for algo in config.algorithms() {
            let trace = algo.run(&inst.problem, &inst.init, n)?;
            let bounds = analytic_bounds(&algo, n, l, r)?;
            rows.push(compare_row(&trace, &bounds, inst.f_star));
        }
    }
    Ok(rows)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.6e}"))
}

pub fn render_markdown(rows: &[CompareRow]) -> String {
    let mut s = String::from(
        "| algorithm | N | cost bound | F gap | ratio | mapping bound | Ω-min | ratio |\n\
         |---|---|---|---|---|---|---|---|\n",
    );
    for row in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {:.6e} | {} | {} | {:.6e} | {} |\n",
            row.label,
            row.n,
            cell(row.cost_bound),
            row.f_gap,
            row.cost_ratio().map_or_else(|| "n/a".into(), |x| format!("{x:.4}")),
            cell(row.mapping_bound),
            row.omega_min,
            row.mapping_ratio().map_or_else(|| "n/a".into(), |x| format!("{x:.4}")),
        ));
    }
    s
}

/// The markdown table; fails after rendering if any ratio exceeds one.
pub fn cmd_compare(config: &ExperimentConfig) -> Result<(String, bool)> {
    let rows = compare_rows(config)?;
    let ok = rows.iter().all(CompareRow::within_bounds);
    Ok((render_markdown(&rows), ok))
}

/// Which momentum sequence `certify` examines.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpec {
    Fista,
    Linear { a: f64 },
    Opg { rounding: MRounding },
    Custom { values: Vec<f64> },
}

impl SequenceSpec {
    pub fn build(&self, n: Option<usize>) -> Result<TSequence> {
        let need = || n.ok_or_else(|| CliError::Usage("this sequence needs a horizon N".into()));
        Ok(match self {
            SequenceSpec::Fista => TSequence::fista(need()?)?,
            SequenceSpec::Linear { a } => TSequence::linear(need()?, *a)?,
            SequenceSpec::Opg { rounding } => TSequence::opg(need()?, *rounding)?,
            SequenceSpec::Custom { values } => {
                if let Some(n) = n {
                    if n != values.len() {
                        return Err(CliError::Usage(format!("N = {n} but {} values were given", values.len())));
                    }
                }
                TSequence::custom(values.clone())?
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSection {
    pub feasibility: FeasibilityReport,
    /// Dual bound at `L = R = 1`: on `F(x_N) − F*` for the cost certificate,
    /// on `min_Ω ‖∇̃F‖` for the mapping one.
    pub dual_bound: f64,
    /// Largest entrywise deviation of the assembled bordered matrix from its closed form.
    pub closed_form_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub sequence: TSequence,
    pub validation: ValidationReport,
    pub valid: bool,
    pub cost: Option<CertificateSection>,
    pub mapping: Option<CertificateSection>,
    pub bounds: Option<BoundReport>,
    /// Named closed-form bounds of the same method, for cross-checking.
    pub formula_bounds: serde_json::Value,
}

impl CertifyReport {
    pub fn feasible(&self) -> bool {
        self.valid
            && self.cost.as_ref().is_some_and(|c| c.feasibility.feasible)
            && self.mapping.as_ref().is_some_and(|c| c.feasibility.feasible)
    }
}

fn section<C: Certificate>(
    h: &fpgm::schedules::StepSchedule,
    cert: &C,
    closed: &fpgm::Matrix,
    dual_bound: f64,
) -> Result<CertificateSection> {
    let feasibility = check_feasibility(h, cert)?;
    let closed_form_deviation = (cert.bordered_matrix(h)? - closed).amax();
    Ok(CertificateSection { feasibility, dual_bound, closed_form_deviation })
}

fn optional(r: fpgm::error::Result<f64>) -> Option<f64> {
    r.ok()
}

pub fn cmd_certify(spec: &SequenceSpec, n: Option<usize>) -> Result<CertifyReport> {
    let t = spec.build(n)?;
    let validation = t.validate();
    let valid = validation.is_valid();
    let nn = t.len();
    let formula_bounds = match spec {
        SequenceSpec::Opg { .. } => json!({
            "opg_cost": optional(opg_cost_bound(nn, 1.0, 1.0)),
            "opg_mapping": optional(opg_mapping_bound(nn, 1.0, 1.0)),
        }),
        SequenceSpec::Linear { a } => json!({
            "fpgm_a_cost": optional(fpgm_a_cost_bound(*a, nn, 1.0, 1.0)),
            "fpgm_a_mapping": optional(fpgm_a_mapping_bound(*a, nn, 1.0, 1.0)),
        }),
        _ => json!({}),
    };
    if !valid {
        return Ok(CertifyReport {
            sequence: t,
            validation,
            valid,
            cost: None,
            mapping: None,
            bounds: None,
            formula_bounds,
        });
    }
    let h = step_coefficients(&t);
    let cost = cost_certificate(&t)?;
    let mapping = mapping_certificate(&t)?;
    let cost_section = section(&h, &cost, &cost_closed_form(&t), dual_bound_cost(&cost, 1.0, 1.0))?;
    let mapping_section = section(&h, &mapping, &mapping_closed_form(&t), dual_bound_mapping(&mapping, 1.0, 1.0))?;
    Ok(CertifyReport {
        bounds: Some(gfpgm_bounds(&t, 1.0, 1.0)?),
        sequence: t,
        validation,
        valid,
        cost: Some(cost_section),
        mapping: Some(mapping_section),
        formula_bounds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadReport {
    pub n: usize,
    pub maximizer: Vec<f64>,
    pub objective: f64,
    pub opg_objective: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub starts: usize,
}

pub fn cmd_quadopt(n: usize, rounding: MRounding) -> Result<QuadReport> {
    if n < 2 {
        return Err(CliError::Usage(format!("quadopt needs N ≥ 2 (got {n}); for N = 1 there is nothing to optimize")));
    }
    let r = maximize_quad(n);
    let opg_objective = quad_objective(&TSequence::opg(n, rounding)?);
    let gap = r.objective - opg_objective;
    Ok(QuadReport {
        n,
        maximizer: r.t.values().to_vec(),
        objective: r.objective,
        opg_objective,
        gap,
        relative_gap: gap.abs() / opg_objective.abs().max(1.0),
        sweeps: r.sweeps,
        converged: r.converged,
        starts: r.starts,
    })
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}
