use crate::error::{Error, Result};

use super::eig::hermitian_eig;
use super::matrix::{ComplexMatrix, C64, ZERO};

/// Ordered list of subsystem dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    dims: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::ParameterOutOfRange(format!("subsystem dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    /// n copies of C^d.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: the last subsystem varies fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            out[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&k, &d)| acc * d + k)
    }

    /// Space made of the listed subsystems, in the given order.
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            self.check_index(k)?;
        }
        Ok(Self { dims: keep.iter().map(|&k| self.dims[k]).collect() })
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::SubsystemOutOfRange { index, count: self.dims.len() });
        }
        Ok(())
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a space of dimension {n}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }
}

/// Trace out the subsystems in `traced`; the result lives on the remaining
/// subsystems in their original order.
pub fn partial_trace(m: &ComplexMatrix, space: &TensorSpace, traced: &[usize]) -> Result<ComplexMatrix> {
    space.check_matrix(m)?;
    let mut is_traced = vec![false; space.len()];
    for &t in traced {
        space.check_index(t)?;
        is_traced[t] = true;
    }
    let kept: Vec<usize> = (0..space.len()).filter(|&i| !is_traced[i]).collect();
    let gone: Vec<usize> = (0..space.len()).filter(|&i| is_traced[i]).collect();
    let kept_space = TensorSpace { dims: kept.iter().map(|&i| space.dims[i]).collect() };
    let gone_space = TensorSpace { dims: gone.iter().map(|&i| space.dims[i]).collect() };

    // Group full indices by their traced part; only pairs within a group contribute.
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); gone_space.total()];
    let mut kd = vec![0; kept.len()];
    let mut gd = vec![0; gone.len()];
    for x in 0..space.total() {
        let digits = space.digits(x);
        for (slot, &i) in kd.iter_mut().zip(&kept) {
            *slot = digits[i];
        }
        for (slot, &i) in gd.iter_mut().zip(&gone) {
            *slot = digits[i];
        }
        groups[gone_space.index(&gd)].push((x, kept_space.index(&kd)));
    }
    let k = kept_space.total();
    let mut out = ComplexMatrix::zeros(k, k);
    for g in &groups {
        for &(x, kx) in g {
            for &(y, ky) in g {
                out[(kx, ky)] += m[(x, y)];
            }
        }
    }
    Ok(out)
}

/// Reduced operator on `keep` (strictly increasing), tracing out the rest.
pub fn reduce(m: &ComplexMatrix, space: &TensorSpace, keep: &[usize]) -> Result<ComplexMatrix> {
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProblem("kept subsystems must be strictly increasing".into()));
    }
    for &k in keep {
        space.check_index(k)?;
    }
    let traced: Vec<usize> = (0..space.len()).filter(|i| !keep.contains(i)).collect();
    partial_trace(m, space, &traced)
}

/// Transpose on a single tensor factor.
pub fn partial_transpose(m: &ComplexMatrix, space: &TensorSpace, subsystem: usize) -> Result<ComplexMatrix> {
    space.check_matrix(m)?;
    space.check_index(subsystem)?;
    let n = space.total();
    let stride = space.strides()[subsystem] as isize;
    let d = space.dims[subsystem];
    let digit = |x: usize| (x / stride as usize) % d;
    let mut out = ComplexMatrix::zeros(n, n);
    for x in 0..n {
        let dx = digit(x) as isize;
        for y in 0..n {
            let dy = digit(y) as isize;
            let xp = (x as isize + (dy - dx) * stride) as usize;
            let yp = (y as isize + (dx - dy) * stride) as usize;
            out[(xp, yp)] = m[(x, y)];
        }
    }
    Ok(out)
}

/// Lift an operator on the subsystems `on` (strictly increasing) to the
/// full space as `op (x) I` with the identity on the remaining factors.
pub fn embed(op: &ComplexMatrix, space: &TensorSpace, on: &[usize]) -> Result<ComplexMatrix> {
    let sub = space.subspace(on)?;
    if on.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProblem("subsystems must be strictly increasing".into()));
    }
    sub.check_matrix(op)?;
    let rest: Vec<usize> = (0..space.len()).filter(|i| !on.contains(i)).collect();
    let n = space.total();
    let mut out = ComplexMatrix::zeros(n, n);
    let all: Vec<Vec<usize>> = (0..n).map(|x| space.digits(x)).collect();
    let sub_index = |d: &[usize]| on.iter().fold(0, |acc, &i| acc * space.dims[i] + d[i]);
    for x in 0..n {
        let dx = &all[x];
        let sx = sub_index(dx);
        for y in 0..n {
            let dy = &all[y];
            if rest.iter().all(|&i| dx[i] == dy[i]) {
                let v = op[(sx, sub_index(dy))];
                if v != ZERO {
                    out[(x, y)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Validated quantum state on a tensor space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: TensorSpace,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-12;
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = 1e-9;

    /// Validate with the default tolerances.
    pub fn new(space: TensorSpace, mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(space, mat, Self::TRACE_TOL, Self::PSD_TOL)
    }

    /// Validate with a looser trace/Hermiticity tolerance, for matrices
    /// coming out of long floating-point pipelines or text input.
    pub fn with_tolerance(space: TensorSpace, mat: ComplexMatrix, tol: f64, psd_tol: f64) -> Result<Self> {
        space.check_matrix(&mat)?;
        let dev = mat.hermitian_deviation();
        if dev > tol.max(Self::HERMITIAN_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.max(Self::TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re)));
        }
        let mat = mat.hermitian_part();
        let min = hermitian_eig(&mat)?.values[0];
        if min < -psd_tol {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(Self { space, mat })
    }

    /// Skip the eigenvalue check; used internally where positivity holds by
    /// construction and the check would dominate the cost.
    pub(crate) fn from_trusted(space: TensorSpace, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(space.total(), mat.rows());
        Self { space, mat }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Reduced state on `keep` (strictly increasing).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mat = reduce(&self.mat, &self.space, keep)?;
        Ok(Self { space: self.space.subspace(keep)?, mat })
    }

    /// Tr[self * op]
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.mat.trace_product(op)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.mat).map(|e| e.values[0]).unwrap_or(f64::NAN)
    }
}
