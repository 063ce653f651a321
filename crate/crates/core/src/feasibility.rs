//! Numeric oracle for small marginal problems.
//!
//! The affine set of Hermitian operators with the prescribed marginals is
//! intersected with the trace-one PSD set by Dykstra's alternating
//! projections. A feasible verdict comes with a verified witness;
//! infeasibility is inferred from a residual that stops moving.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{embed, hermitian_eig, reduce, ComplexMatrix, DensityMatrix, Eigen, TensorSpace};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 20_000;
/// Largest total dimension accepted.
pub const DIM_CAP: usize = 4096;
/// Allowed disagreement between constraints on shared subsystems.
pub const OVERLAP_TOL: f64 = 1e-10;
/// Iterations between plateau checks.
pub const PLATEAU_WINDOW: usize = 200;
/// Relative residual change below which a window counts as a plateau.
pub const PLATEAU_REL: f64 = 1e-10;
/// Witness acceptance, both for reductions and for the smallest eigenvalue.
pub const WITNESS_TOL: f64 = 1e-8;

/// Trace-one Hermitian operator on ABC whose AB and AC marginals are `qab`
/// and `qac`: Q_AB (x) I/d_C + Q_AC (x) I/d_B - Q_A (x) I/(d_B d_C).
pub fn hermitian_join(qab: &ComplexMatrix, qac: &ComplexMatrix, dims: [usize; 3]) -> Result<ComplexMatrix> {
    let [da, db, dc] = dims;
    let space = TensorSpace::new(dims.to_vec())?;
    let ab = TensorSpace::new(vec![da, db])?;
    let ac = TensorSpace::new(vec![da, dc])?;
    for (q, name) in [(qab, "AB"), (qac, "AC")] {
        if !q.is_hermitian(OVERLAP_TOL) {
            return Err(Error::NotHermitian(q.hermitian_deviation()));
        }
        if (q.trace().re - 1.0).abs() > OVERLAP_TOL || q.trace().im.abs() > OVERLAP_TOL {
            return Err(Error::InvalidState(format!("{name} operator does not have unit trace")));
        }
    }
    let qa = reduce(qab, &ab, &[0])?;
    let qa2 = reduce(qac, &ac, &[0])?;
    let gap = qa.max_diff(&qa2);
    if gap > OVERLAP_TOL {
        return Err(Error::InconsistentMarginals(format!("A marginals differ by {gap:.3e}")));
    }
    let mut q = embed(qab, &space, &[0, 1])?.scale_real(1.0 / dc as f64);
    q.add_scaled((1.0 / db as f64).into(), &embed(qac, &space, &[0, 2])?);
    q.add_scaled((-1.0 / (db * dc) as f64).into(), &embed(&qa, &space, &[0])?);
    Ok(q)
}

/// One marginal constraint: the reduced state on `subsystems`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub subsystems: Vec<usize>,
    pub target: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    space: TensorSpace,
    constraints: Vec<Constraint>,
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

fn positions(within: &[usize], of: &[usize]) -> Vec<usize> {
    of.iter().map(|x| within.iter().position(|y| y == x).expect("subset")).collect()
}

impl FeasibilityProblem {
    pub fn new(space: TensorSpace, constraints: Vec<Constraint>) -> Result<Self> {
        if space.total() > DIM_CAP {
            return Err(Error::CapExceeded {
                what: "feasibility dimension",
                size: space.total() as u128,
                cap: DIM_CAP as u128,
            });
        }
        for c in &constraints {
            if c.subsystems.is_empty() || c.subsystems.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidProblem(format!(
                    "subsystems {:?} must be non-empty and strictly increasing",
                    c.subsystems
                )));
            }
            let sub = space.subspace(&c.subsystems)?;
            if sub.dims() != c.target.space().dims() {
                return Err(Error::DimensionMismatch(format!(
                    "target on {:?} has dims {:?}, expected {:?}",
                    c.subsystems,
                    c.target.space().dims(),
                    sub.dims()
                )));
            }
        }
        for (i, a) in constraints.iter().enumerate() {
            for b in &constraints[i + 1..] {
                let common = intersect(&a.subsystems, &b.subsystems);
                if common.is_empty() {
                    continue;
                }
                let ra = a.target.reduce(&positions(&a.subsystems, &common))?;
                let rb = b.target.reduce(&positions(&b.subsystems, &common))?;
                let gap = ra.matrix().max_diff(rb.matrix());
                if gap > OVERLAP_TOL {
                    return Err(Error::InconsistentMarginals(format!(
                        "constraints on {:?} and {:?} differ by {gap:.3e} on {common:?}",
                        a.subsystems, b.subsystems
                    )));
                }
            }
        }
        Ok(Self { space, constraints })
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Largest entrywise deviation of a candidate's marginals from the targets.
    pub fn residual(&self, x: &ComplexMatrix) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            worst = worst.max(reduce(x, &self.space, &c.subsystems)?.max_diff(c.target.matrix()));
        }
        Ok(worst)
    }

    /// Check a candidate joining state independently of the solver.
    pub fn verify(&self, w: &ComplexMatrix, tol: f64) -> Result<bool> {
        if w.rows() != self.space.total() || !w.is_hermitian(tol) || (w.trace().re - 1.0).abs() > tol {
            return Ok(false);
        }
        Ok(self.residual(w)? <= tol && hermitian_eig(w)?.min() >= -tol)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::InvalidProblem(e.to_string()))?;
        file.into_problem()
    }

    pub fn to_json(&self) -> String {
        let file = ProblemFile {
            dims: self.space.dims().to_vec(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintFile {
                    subsystems: c.subsystems.clone(),
                    state: MatrixFile::from(c.target.matrix()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

/// Matrix as row-major real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        // adding 0.0 turns -0.0 into 0.0 so equal matrices serialize identically
        let clean = |rows: Vec<Vec<f64>>| rows.into_iter().map(|r| r.into_iter().map(|x| x + 0.0).collect()).collect();
        Self { re: clean(m.real_parts()), im: clean(m.imag_parts()) }
    }
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.im.is_empty() {
            let zeros: Vec<Vec<f64>> = self.re.iter().map(|r| vec![0.0; r.len()]).collect();
            return ComplexMatrix::from_parts(&self.re, &zeros);
        }
        ComplexMatrix::from_parts(&self.re, &self.im)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ConstraintFile {
    subsystems: Vec<usize>,
    state: MatrixFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ProblemFile {
    dims: Vec<usize>,
    constraints: Vec<ConstraintFile>,
}

impl ProblemFile {
    fn into_problem(self) -> Result<FeasibilityProblem> {
        let space = TensorSpace::new(self.dims)?;
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for c in self.constraints {
            let sub = space.subspace(&c.subsystems)?;
            let target = DensityMatrix::new(sub, c.state.to_matrix()?)?;
            constraints.push(Constraint { subsystems: c.subsystems, target });
        }
        FeasibilityProblem::new(space, constraints)
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Feasible(DensityMatrix),
    Infeasible { residual: f64 },
    Undecided { residual: f64 },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Feasible(_) => "feasible",
            Verdict::Infeasible { .. } => "infeasible",
            Verdict::Undecided { .. } => "undecided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub residual: f64,
    pub iterations: usize,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, Verdict::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.verdict, Verdict::Infeasible { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "verdict": self.verdict.name(),
            "residual": self.residual,
            "iterations": self.iterations,
        });
        if let Verdict::Feasible(w) = &self.verdict {
            v["witness"] = serde_json::to_value(MatrixFile::from(w.matrix())).expect("serializable");
        }
        v
    }
}

/// X -> X - Pi(X) + Pi(T), where Pi projects onto operators supported on
/// some neighborhood. The per-neighborhood projections commute, so their
/// join is an inclusion-exclusion sum over intersections.
struct AffineProjector {
    space: TensorSpace,
    terms: Vec<(Vec<usize>, f64)>,
    offset: ComplexMatrix,
}

impl AffineProjector {
    fn new(p: &FeasibilityProblem) -> Result<Self> {
        let k = p.constraints.len();
        if k > 20 {
            return Err(Error::CapExceeded { what: "constraint count", size: k as u128, cap: 20 });
        }
        let mut coef: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for mask in 1u32..(1 << k) {
            let mut set: Option<Vec<usize>> = None;
            for (i, c) in p.constraints.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    set = Some(match set {
                        None => c.subsystems.clone(),
                        Some(s) => intersect(&s, &c.subsystems),
                    });
                }
            }
            let sign = if mask.count_ones() % 2 == 1 { 1 } else { -1 };
            *coef.entry(set.expect("non-empty mask")).or_insert(0) += sign;
        }
        let terms: Vec<(Vec<usize>, f64)> =
            coef.into_iter().filter(|&(_, c)| c != 0).map(|(s, c)| (s, c as f64)).collect();

        let n = p.space.total();
        let mut offset = ComplexMatrix::zeros(n, n);
        for (set, c) in &terms {
            let lifted = if set.is_empty() {
                ComplexMatrix::identity(n).scale_real(1.0 / n as f64)
            } else {
                let owner = p.constraints.iter().find(|x| set.iter().all(|s| x.subsystems.contains(s))).expect("owner");
                let t = owner.target.reduce(&positions(&owner.subsystems, set))?;
                lift(t.matrix(), &p.space, set)?
            };
            offset.add_scaled((*c).into(), &lifted);
        }
        Ok(Self { space: p.space.clone(), terms, offset })
    }

    fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = x.clone();
        for (set, c) in &self.terms {
            let part = if set.is_empty() {
                ComplexMatrix::identity(x.rows()).scale_real(x.trace().re / x.rows() as f64)
            } else {
                lift(&reduce(x, &self.space, set)?, &self.space, set)?
            };
            out.add_scaled((-c).into(), &part);
        }
        out += &self.offset;
        Ok(out)
    }
}

/// op (x) I / d_rest
fn lift(op: &ComplexMatrix, space: &TensorSpace, on: &[usize]) -> Result<ComplexMatrix> {
    let rest = space.total() / op.rows();
    Ok(embed(op, space, on)?.scale_real(1.0 / rest as f64))
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Nearest trace-one PSD matrix in Frobenius norm.
fn project_states(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(&x.hermitian_part())?;
    let projected = Eigen { values: simplex_projection(&eig.values), vectors: eig.vectors };
    Ok(projected.map(|x| x))
}

/// Aitken estimate of where a residual sequence is heading.
fn extrapolated_limit(r: &[f64]) -> Option<f64> {
    let [r0, r1, r2] = r else { return None };
    let (d1, d2) = (r1 - r0, r2 - r1);
    if d1 > 0.0 || d2 > 0.0 {
        return None;
    }
    if d1 == 0.0 && d2 == 0.0 {
        return Some(*r2);
    }
    // not slowing down: no basis for a limit
    if d2 <= d1 {
        return None;
    }
    Some(r2 - d2 * d2 / (d2 - d1))
}

/// Residual samples taken once per window. A plateau is either a window
/// with negligible relative change, or two consecutive windows whose
/// extrapolated limit stays above both 100 tol and 90% of the residual,
/// which catches gaps approached sublinearly.
fn plateaued(history: &[f64], tol: f64) -> bool {
    let n = history.len();
    let r = history[n - 1];
    if r <= 100.0 * tol {
        return false;
    }
    if n >= 2 && ((history[n - 2] - r) / r).abs() < PLATEAU_REL {
        return true;
    }
    if n < 4 {
        return false;
    }
    let holds = |w: &[f64]| extrapolated_limit(w).is_some_and(|g| g > 100.0 * tol && g > 0.9 * w[2]);
    holds(&history[n - 3..]) && holds(&history[n - 4..n - 1])
}

/// Dykstra's alternating projections between the marginal-constraint set
/// and the set of states, started from the maximally mixed state.
pub fn alternating_projection(p: &FeasibilityProblem, tol: f64, max_iter: usize) -> Result<FeasibilityReport> {
    let affine = AffineProjector::new(p)?;
    let n = p.space.total();
    let mut x = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
    let mut pa = ComplexMatrix::zeros(n, n);
    let mut pb = ComplexMatrix::zeros(n, n);
    let mut history: Vec<f64> = Vec::with_capacity(max_iter / PLATEAU_WINDOW + 1);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let y = affine.project(&(&x + &pa))?;
        pa = &(&x + &pa) - &y;
        let next = project_states(&(&y + &pb))?;
        pb = &(&y + &pb) - &next;
        x = next;
        residual = p.residual(&x)?;
        if residual < tol {
            let w = DensityMatrix::from_trusted(p.space.clone(), x.hermitian_part());
            if p.verify(w.matrix(), WITNESS_TOL)? {
                return Ok(FeasibilityReport { verdict: Verdict::Feasible(w), residual, iterations: it });
            }
        }
        if it % PLATEAU_WINDOW == 0 {
            history.push(residual);
            if plateaued(&history, tol) {
                return Ok(FeasibilityReport { verdict: Verdict::Infeasible { residual }, residual, iterations: it });
            }
        }
    }
    Ok(FeasibilityReport { verdict: Verdict::Undecided { residual }, residual, iterations: max_iter })
}
