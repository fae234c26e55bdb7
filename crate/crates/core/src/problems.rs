//! Composite problems `F(x) = f(x) + φ(x)`.
//!
//! `f` is convex with an `L`-Lipschitz gradient and `φ` is a closed convex
//! function with a cheap proximal operator. Two smooth parts are shipped
//! (a PSD quadratic and a least-squares term) and two regularizers (a scaled
//! ℓ1 norm and the indicator of a box).
//!
//! Extended values are plain `f64`: `φ` returns `f64::INFINITY` outside the
//! box, and all orderings on values go through `f64::total_cmp`.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::{Matrix, Vector};

/// Symmetry tolerance for user-supplied quadratics, relative to the largest entry.
const SYMMETRY_TOL: f64 = 1e-12;
/// PSD tolerance for user-supplied quadratics, relative to the spectral radius.
const PSD_TOL: f64 = 1e-10;

/// Reference minimizer attached to a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub x_star: Vector,
    pub f_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothPart {
    /// `½xᵀQx − bᵀx`
    Quadratic { q: Matrix, b: Vector },
    /// `½‖Ax − b‖²`
    LeastSquares { a: Matrix, b: Vector },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regularizer {
    /// `lam·‖x‖₁`; `lam = 0` is the zero function.
    L1 { lam: f64 },
    /// Indicator of `{x : lo ≤ x ≤ hi}`; bounds may be infinite.
    Box { lo: Vector, hi: Vector },
}

impl Regularizer {
    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Regularizer::L1 { lam } => {
                if *lam == 0.0 {
                    0.0
                } else {
                    lam * x.lp_norm(1)
                }
            }
            Regularizer::Box { lo, hi } => {
                let inside = x.iter().zip(lo.iter().zip(hi.iter())).all(|(v, (l, h))| *l <= *v && *v <= *h);
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `argmin_x (c/2)‖x − v‖² + φ(x)`.
    pub fn prox(&self, v: &Vector, c: f64) -> Vector {
        match self {
            Regularizer::L1 { lam } => {
                let thr = lam / c;
                v.map(|vi| soft_threshold(vi, thr))
            }
            Regularizer::Box { lo, hi } => Vector::from_iterator(
                v.len(),
                v.iter().zip(lo.iter().zip(hi.iter())).map(|(vi, (l, h))| vi.max(*l).min(*h)),
            ),
        }
    }

    /// Checks `g ∈ ∂φ(p)` coordinatewise with absolute slack `tol`.
    ///
    /// For ℓ1 this is the interval `[−lam, lam]` at zero coordinates and
    /// `lam·sign(p_j)` elsewhere; for boxes it is the normal cone.
    pub fn check_subgradient(&self, p: &Vector, g: &Vector, tol: f64) -> Result<()> {
        check_dim(p.len(), g.len())?;
        let fail = |index: usize, detail: String| Err(Error::SubgradientCheck { index, detail });
        match self {
            Regularizer::L1 { lam } => {
                for (j, (&pj, &gj)) in p.iter().zip(g.iter()).enumerate() {
                    if pj == 0.0 {
                        if gj.abs() > lam + tol {
                            return fail(j, format!("|{gj}| > lam = {lam} at a zero coordinate"));
                        }
                    } else if (gj - lam * pj.signum()).abs() > tol {
                        return fail(j, format!("{gj} != lam·sign({pj})"));
                    }
                }
            }
            Regularizer::Box { lo, hi } => {
                for j in 0..p.len() {
                    let (pj, gj, l, h) = (p[j], g[j], lo[j], hi[j]);
                    if l == h {
                        continue;
                    }
                    let ok = if pj == l {
                        gj <= tol
                    } else if pj == h {
                        gj >= -tol
                    } else if l < pj && pj < h {
                        gj.abs() <= tol
                    } else {
                        false
                    };
                    if !ok {
                        return fail(j, format!("{gj} not in the normal cone at {pj} of [{l}, {h}]"));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn soft_threshold(v: f64, thr: f64) -> f64 {
    if v > thr {
        v - thr
    } else if v < -thr {
        v + thr
    } else {
        0.0
    }
}

/// A composite problem instance. Immutable after construction apart from
/// attaching a reference solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeProblem {
    smooth: SmoothPart,
    regularizer: Regularizer,
    lipschitz: f64,
    reference: Option<Reference>,
}

impl CompositeProblem {
    /// `f(x) = ½xᵀQx − bᵀx`, `φ = lam‖x‖₁`, `L = λ_max(Q)`.
    pub fn quadratic_l1(q: &Matrix, b: &Vector, lam: f64) -> Result<Self> {
        let d = q.nrows();
        if d == 0 {
            return Err(Error::InvalidArgument("empty quadratic".into()));
        }
        check_dim(d, q.ncols())?;
        check_dim(d, b.len())?;
        if !(lam >= 0.0) || !lam.is_finite() {
            return Err(Error::InvalidArgument(format!("lam must be finite and ≥ 0, got {lam}")));
        }
        let scale = q.amax().max(f64::MIN_POSITIVE);
        let asym = (q - q.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let eig = SymmetricEigen::new(q.clone()).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if lo < -PSD_TOL * hi.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NotPsd(lo));
        }
        if !(hi > 0.0) {
            return Err(Error::InvalidArgument("quadratic has no positive curvature (L = 0)".into()));
        }
        Ok(Self {
            smooth: SmoothPart::Quadratic { q: q.clone(), b: b.clone() },
            regularizer: Regularizer::L1 { lam },
            lipschitz: hi,
            reference: None,
        })
    }

    /// `f(x) = ½‖Ax − b‖²`, `φ` the indicator of `[lo, hi]`, `L = λ_max(AᵀA)`.
    pub fn box_constrained_ls(a: &Matrix, b: &Vector, lo: &Vector, hi: &Vector) -> Result<Self> {
        let d = a.ncols();
        if d == 0 || a.nrows() == 0 {
            return Err(Error::InvalidArgument("empty design matrix".into()));
        }
        check_dim(a.nrows(), b.len())?;
        check_dim(d, lo.len())?;
        check_dim(d, hi.len())?;
        for (index, (&l, &h)) in lo.iter().zip(hi.iter()).enumerate() {
            if l.is_nan() || h.is_nan() || l > h {
                return Err(Error::InvalidBox { index, lo: l, hi: h });
            }
        }
        let gram = a.transpose() * a;
        let l = SymmetricEigen::new(gram).eigenvalues.max();
        if !(l > 0.0) {
            return Err(Error::InvalidArgument("design matrix is zero (L = 0)".into()));
        }
        Ok(Self {
            smooth: SmoothPart::LeastSquares { a: a.clone(), b: b.clone() },
            regularizer: Regularizer::Box { lo: lo.clone(), hi: hi.clone() },
            lipschitz: l,
            reference: None,
        })
    }

    /// Replaces `L` by a larger constant. Any `L' ≥ L` is still a valid
    /// Lipschitz constant; smaller values are rejected.
    pub fn with_lipschitz(mut self, l: f64) -> Result<Self> {
        if !(l.is_finite() && l >= self.lipschitz * (1.0 - 1e-12)) {
            return Err(Error::InvalidArgument(format!("declared L = {l} is below the curvature {}", self.lipschitz)));
        }
        self.lipschitz = l;
        self.reference = None;
        Ok(self)
    }

    pub fn with_reference(mut self, reference: Reference) -> Result<Self> {
        check_dim(self.dim(), reference.x_star.len())?;
        self.reference = Some(reference);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        match &self.smooth {
            SmoothPart::Quadratic { q, .. } => q.ncols(),
            SmoothPart::LeastSquares { a, .. } => a.ncols(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn smooth_part(&self) -> &SmoothPart {
        &self.smooth
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn reference(&self) -> Option<&Reference> {
        self.reference.as_ref()
    }

    pub fn f(&self, x: &Vector) -> f64 {
        match &self.smooth {
            SmoothPart::Quadratic { q, b } => 0.5 * x.dot(&(q * x)) - b.dot(x),
            SmoothPart::LeastSquares { a, b } => 0.5 * (a * x - b).norm_squared(),
        }
    }

    pub fn grad(&self, x: &Vector) -> Vector {
        match &self.smooth {
            SmoothPart::Quadratic { q, b } => q * x - b,
            SmoothPart::LeastSquares { a, b } => a.transpose() * (a * x - b),
        }
    }

    pub fn phi(&self, x: &Vector) -> f64 {
        self.regularizer.value(x)
    }

    /// `prox_{φ/c}(v)`.
    pub fn prox(&self, v: &Vector, c: f64) -> Result<Vector> {
        check_dim(self.dim(), v.len())?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("prox constant must be positive, got {c}")));
        }
        Ok(self.regularizer.prox(v, c))
    }

    /// `F(x) = f(x) + φ(x)`; `+∞` when `x` leaves the domain of `φ`.
    pub fn eval_f(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let phi = self.phi(x);
        if phi.is_infinite() {
            return Ok(f64::INFINITY);
        }
        Ok(self.f(x) + phi)
    }

    /// `F(x) − F*`. Requires a reference solution.
    pub fn gap(&self, x: &Vector) -> Result<f64> {
        let r = self.reference.as_ref().ok_or(Error::MissingReference)?;
        Ok(self.eval_f(x)? - r.f_star)
    }

    /// Runs PGM from the origin projected onto the domain until
    /// `‖x − p_L(x)‖ ≤ tol`, then stores and returns the solution.
    pub fn solve_reference(&mut self, tol: f64) -> Result<Reference> {
        self.solve_reference_capped(tol, DEFAULT_REFERENCE_CAP)
    }

    pub fn solve_reference_capped(&mut self, tol: f64, cap: usize) -> Result<Reference> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let l = self.lipschitz;
        let mut x = self.regularizer.prox(&Vector::zeros(self.dim()), 1.0);
        let mut residual = f64::INFINITY;
        for _ in 0..cap {
            let next = self.regularizer.prox(&(&x - self.grad(&x) / l), l);
            residual = (&next - &x).norm();
            x = next;
            if residual <= tol {
                let f_star = self.eval_f(&x)?;
                let reference = Reference { x_star: x, f_star };
                self.reference = Some(reference.clone());
                return Ok(reference);
            }
        }
        Err(Error::IterationCap { iterations: cap, residual })
    }

    /// Builds the serializable form.
    pub fn to_document(&self) -> ProblemDocument {
        let (kind, q, a, b) = match &self.smooth {
            SmoothPart::Quadratic { q, b } => (ProblemKind::QuadraticL1, Some(rows(q)), None, b),
            SmoothPart::LeastSquares { a, b } => (ProblemKind::BoxLs, None, Some(rows(a)), b),
        };
        let (lam, bounds) = match &self.regularizer {
            Regularizer::L1 { lam } => (Some(*lam), None),
            Regularizer::Box { lo, hi } => {
                (None, Some(BoxDocument { lo: lo.iter().copied().collect(), hi: hi.iter().copied().collect() }))
            }
        };
        ProblemDocument {
            kind,
            q,
            a,
            b: b.iter().copied().collect(),
            lam,
            bounds,
            lipschitz: self.lipschitz,
            x_star: self.reference.as_ref().map(|r| r.x_star.iter().copied().collect()),
            f_star: self.reference.as_ref().map(|r| r.f_star),
        }
    }

    pub fn from_document(doc: &ProblemDocument) -> Result<Self> {
        let b = Vector::from_vec(doc.b.clone());
        let missing = |what: &str| Error::InvalidArgument(format!("{:?} document lacks `{what}`", doc.kind));
        let problem = match doc.kind {
            ProblemKind::QuadraticL1 => {
                let q = from_rows(doc.q.as_ref().ok_or_else(|| missing("Q"))?)?;
                Self::quadratic_l1(&q, &b, doc.lam.ok_or_else(|| missing("lam"))?)?
            }
            ProblemKind::BoxLs => {
                let a = from_rows(doc.a.as_ref().ok_or_else(|| missing("A"))?)?;
                let bx = doc.bounds.as_ref().ok_or_else(|| missing("box"))?;
                Self::box_constrained_ls(&a, &b, &Vector::from_vec(bx.lo.clone()), &Vector::from_vec(bx.hi.clone()))?
            }
        };
        let mut problem =
            if doc.lipschitz > problem.lipschitz { problem.with_lipschitz(doc.lipschitz)? } else { problem };
        match (&doc.x_star, doc.f_star) {
            (Some(x), Some(f)) => {
                problem = problem.with_reference(Reference { x_star: Vector::from_vec(x.clone()), f_star: f })?
            }
            (None, None) => {}
            _ => return Err(Error::InvalidArgument("x_star and F_star must be given together".into())),
        }
        Ok(problem)
    }
}

/// Iteration cap for [`CompositeProblem::solve_reference`].
pub const DEFAULT_REFERENCE_CAP: usize = 1_000_000;
/// Default fixed-point tolerance for the reference solver.
pub const DEFAULT_REFERENCE_TOL: f64 = 1e-12;

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(data: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = data.len();
    let ncols = data.first().map_or(0, Vec::len);
    if let Some(bad) = data.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch { expected: ncols, found: bad.len() });
    }
    let flat: Vec<f64> = data.iter().flatten().copied().collect();
    Ok(Matrix::from_row_slice(nrows, ncols, &flat))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    QuadraticL1,
    BoxLs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDocument {
    #[serde(with = "extended")]
    pub lo: Vec<f64>,
    #[serde(with = "extended")]
    pub hi: Vec<f64>,
}

/// JSON form of a problem instance. Matrices are row-major nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub kind: ProblemKind,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lam: Option<f64>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoxDocument>,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<f64>>,
    #[serde(rename = "F_star", default, skip_serializing_if = "Option::is_none")]
    pub f_star: Option<f64>,
}

/// Box bounds: finite entries are JSON numbers, infinite ones the strings
/// `"inf"` / `"-inf"`.
mod extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = v
            .iter()
            .map(|&x| {
                if x == f64::INFINITY {
                    Entry::Str("inf".into())
                } else if x == f64::NEG_INFINITY {
                    Entry::Str("-inf".into())
                } else {
                    Entry::Num(x)
                }
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        entries
            .into_iter()
            .map(|e| match e {
                Entry::Num(x) => Ok(x),
                Entry::Str(s) => match s.as_str() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(serde::de::Error::custom(format!("bad bound `{other}`"))),
                },
            })
            .collect()
    }
}

/// Starting point and distance bound `R ≥ ‖x₀ − x*‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub x0: Vector,
    pub radius: f64,
}

impl InitialCondition {
    pub fn new(x0: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("R must be positive, got {radius}")));
        }
        Ok(Self { x0, radius })
    }

    /// Uses `R = ‖x₀ − x*‖` from the problem's reference solution.
    pub fn from_reference(problem: &CompositeProblem, x0: Vector) -> Result<Self> {
        let r = problem.reference().ok_or(Error::MissingReference)?;
        check_dim(r.x_star.len(), x0.len())?;
        let radius = (&x0 - &r.x_star).norm();
        Self::new(x0, radius)
    }

    /// Checks `‖x₀ − x*‖ ≤ R + 1e−12` against a known minimizer.
    pub fn is_consistent_with(&self, x_star: &Vector) -> bool {
        (&self.x0 - x_star).norm() <= self.radius + 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_box_ls, random_lasso, SplitMix64};
    use approx::assert_relative_eq;

    fn scalar(v: f64) -> Vector {
        Vector::from_element(1, v)
    }

    fn one_d_l1(b: f64, lam: f64) -> CompositeProblem {
        CompositeProblem::quadratic_l1(&Matrix::identity(1, 1), &scalar(b), lam).unwrap()
    }

    #[test]
    fn soft_threshold_prox_shifts_by_lambda() {
        let p = one_d_l1(0.0, 1.0);
        assert_eq!(p.prox(&scalar(3.0), 1.0).unwrap()[0], 2.0);
        assert_eq!(p.prox(&scalar(-0.5), 1.0).unwrap()[0], 0.0);
    }

    #[test]
    fn zero_lambda_prox_is_identity() {
        let p = one_d_l1(0.0, 0.0);
        assert_eq!(p.prox(&scalar(-3.25), 7.0).unwrap()[0], -3.25);
        assert_eq!(p.phi(&scalar(5.0)), 0.0);
    }

    #[test]
    fn rejects_bad_quadratics() {
        let asym = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(CompositeProblem::quadratic_l1(&asym, &Vector::zeros(2), 0.1), Err(Error::NotSymmetric(_))));
        let indef = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(CompositeProblem::quadratic_l1(&indef, &Vector::zeros(2), 0.1), Err(Error::NotPsd(_))));
        assert!(CompositeProblem::quadratic_l1(&Matrix::identity(2, 2), &Vector::zeros(2), -1.0).is_err());
    }

    #[test]
    fn diagonal_quadratic_lipschitz_and_minimizer() {
        let q = Matrix::from_diagonal(&Vector::from_vec(vec![0.5, 2.0]));
        let b = Vector::from_vec(vec![1.0, 1.0]);
        let mut p = CompositeProblem::quadratic_l1(&q, &b, 0.3).unwrap();
        assert_relative_eq!(p.lipschitz(), 2.0, max_relative = 1e-14);

        // Oracle: 10⁵ plain PGM iterations, independent of the reference solver.
        let l = p.lipschitz();
        let mut x = Vector::zeros(2);
        for _ in 0..100_000 {
            x = p.regularizer().prox(&(&x - p.grad(&x) / l), l);
        }
        // Separable closed form: x_j = soft(b_j, lam)/q_jj = (0.7/0.5, 0.7/2).
        assert_relative_eq!(x[0], 1.4, epsilon = 1e-12);
        assert_relative_eq!(x[1], 0.35, epsilon = 1e-12);

        let r = p.solve_reference(1e-12).unwrap();
        assert!((&r.x_star - &x).norm() < 1e-10);
        let step = p.regularizer().prox(&(&r.x_star - p.grad(&r.x_star) / l), l);
        assert!((&step - &r.x_star).norm() <= 1e-12);
    }

    #[test]
    fn box_prox_is_clamp() {
        let a = Matrix::identity(1, 1);
        let p = CompositeProblem::box_constrained_ls(&a, &scalar(5.0), &scalar(0.0), &scalar(1.0)).unwrap();
        assert_eq!(p.prox(&scalar(3.0), 1.0).unwrap()[0], 1.0);
        assert_eq!(p.prox(&scalar(-3.0), 2.0).unwrap()[0], 0.0);
        assert_eq!(p.prox(&scalar(0.25), 2.0).unwrap()[0], 0.25);
    }

    #[test]
    fn infinite_box_prox_is_identity() {
        let a = Matrix::identity(2, 2);
        let inf = Vector::from_element(2, f64::INFINITY);
        let p = CompositeProblem::box_constrained_ls(&a, &Vector::zeros(2), &(-&inf), &inf).unwrap();
        let v = Vector::from_vec(vec![1e9, -3.5]);
        assert_eq!(p.prox(&v, 1.0).unwrap(), v);
    }

    #[test]
    fn box_with_identity_projects_unconstrained_optimum() {
        let a = Matrix::identity(2, 2);
        let b = Vector::from_vec(vec![2.0, -2.0]);
        let mut p =
            CompositeProblem::box_constrained_ls(&a, &b, &Vector::from_element(2, -1.0), &Vector::from_element(2, 1.0))
                .unwrap();
        let r = p.solve_reference(1e-12).unwrap();
        assert_relative_eq!(r.x_star[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.x_star[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn inverted_box_rejected() {
        let a = Matrix::identity(2, 2);
        let err = CompositeProblem::box_constrained_ls(
            &a,
            &Vector::zeros(2),
            &Vector::from_vec(vec![0.0, 2.0]),
            &Vector::from_vec(vec![1.0, 1.0]),
        );
        assert!(matches!(err, Err(Error::InvalidBox { index: 1, .. })));
    }

    #[test]
    fn eval_f_values() {
        let p = one_d_l1(0.0, 1.0);
        assert_eq!(p.eval_f(&scalar(2.0)).unwrap(), 4.0);
        assert!(p.eval_f(&Vector::zeros(2)).is_err());

        let a = Matrix::identity(1, 1);
        let bx = CompositeProblem::box_constrained_ls(&a, &scalar(5.0), &scalar(0.0), &scalar(1.0)).unwrap();
        assert_eq!(bx.eval_f(&scalar(1.5)).unwrap(), f64::INFINITY);
        assert_eq!(bx.eval_f(&scalar(1.0)).unwrap(), 8.0);
    }

    #[test]
    fn reference_of_simple_problems() {
        let mut smooth = one_d_l1(0.0, 0.0);
        let r = smooth.solve_reference(1e-12).unwrap();
        assert_eq!(r.x_star[0], 0.0);
        assert_eq!(r.f_star, 0.0);
        assert_eq!(smooth.eval_f(&r.x_star).unwrap(), r.f_star);

        let mut lasso = one_d_l1(2.0, 1.0);
        let r = lasso.solve_reference(1e-12).unwrap();
        assert_relative_eq!(r.x_star[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reference_of_random_lasso_is_fixed_point() {
        let mut p = random_lasso(&mut SplitMix64::new(11), 20).unwrap();
        let tol = 1e-12;
        let r = p.solve_reference(tol).unwrap();
        let l = p.lipschitz();
        let next = p.regularizer().prox(&(&r.x_star - p.grad(&r.x_star) / l), l);
        assert!((&r.x_star - &next).norm() <= tol);
    }

    #[test]
    fn iteration_cap_reported() {
        let mut p = random_lasso(&mut SplitMix64::new(3), 10).unwrap();
        assert!(matches!(p.solve_reference_capped(1e-14, 2), Err(Error::IterationCap { iterations: 2, .. })));
    }

    #[test]
    fn declared_lipschitz_must_dominate() {
        let q = Matrix::from_element(1, 1, 0.5);
        let p = CompositeProblem::quadratic_l1(&q, &scalar(0.0), 0.0).unwrap();
        assert!(p.clone().with_lipschitz(0.25).is_err());
        assert_eq!(p.with_lipschitz(1.0).unwrap().lipschitz(), 1.0);
    }

    #[test]
    fn document_round_trip_keeps_infinite_bounds() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 2.0]);
        let p = CompositeProblem::box_constrained_ls(
            &a,
            &Vector::from_vec(vec![1.0, -1.0]),
            &Vector::from_vec(vec![f64::NEG_INFINITY, -1.0]),
            &Vector::from_vec(vec![f64::INFINITY, 0.5]),
        )
        .unwrap();
        let json = serde_json::to_string(&p.to_document()).unwrap();
        assert!(json.contains("\"-inf\""));
        let doc: ProblemDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(CompositeProblem::from_document(&doc).unwrap(), p);
    }

    #[test]
    fn document_carries_reference() {
        let mut p = random_box_ls(&mut SplitMix64::new(8), 4).unwrap();
        p.solve_reference(1e-12).unwrap();
        let doc = p.to_document();
        let json = serde_json::to_value(&doc).unwrap();
        assert!(json.get("x_star").is_some() && json.get("F_star").is_some() && json.get("L").is_some());
        let back = CompositeProblem::from_document(&doc).unwrap();
        assert_eq!(back.reference(), p.reference());
    }

    #[test]
    fn initial_condition_radius() {
        assert!(InitialCondition::new(Vector::zeros(2), 0.0).is_err());
        let mut p = one_d_l1(2.0, 1.0);
        p.solve_reference(1e-12).unwrap();
        let init = InitialCondition::from_reference(&p, scalar(4.0)).unwrap();
        assert_relative_eq!(init.radius, 3.0, epsilon = 1e-12);
        assert!(init.is_consistent_with(&scalar(1.0)));
    }
}
