use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64, ZERO};

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn max(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Q diag(f(lambda)) Q^dagger
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = q[(i, k)] * fv[k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * q[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Input tolerance for the Hermiticity check, relative to the largest entry.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    hermitian_eig_tol(m, HERMITIAN_INPUT_TOL)
}

/// As [`hermitian_eig`], rejecting inputs whose Hermitian deviation exceeds
/// `tol` times the largest entry.
pub fn hermitian_eig_tol(m: &ComplexMatrix, tol: f64) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let scale = m.max_abs();
    let dev = m.hermitian_deviation();
    if dev > tol * scale.max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    let mut a = m.hermitian_part().data().to_vec();
    // row k holds the k-th eigenvector, so every update touches contiguous rows
    let mut vt = ComplexMatrix::identity(n).data().to_vec();
    let total = m.hermitian_part().norm_fro();
    let target = OFF_DIAGONAL_THRESHOLD * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            off += a[p * n + p + 1..(p + 1) * n].iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let off = (2.0 * off).sqrt();
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let pc = phase.conj();
                // rows p, q of J^dagger A J away from the 2x2 block; the
                // columns follow by Hermiticity
                {
                    let (head, tail) = a.split_at_mut(q * n);
                    let row_p = &mut head[p * n..(p + 1) * n];
                    let row_q = &mut tail[..n];
                    for k in 0..n {
                        if k == p || k == q {
                            continue;
                        }
                        let (apk, aqk) = (row_p[k], row_q[k]);
                        row_p[k] = apk * c - phase * aqk * s;
                        row_q[k] = apk * s + phase * aqk * c;
                    }
                }
                for k in 0..n {
                    if k != p && k != q {
                        a[k * n + p] = a[p * n + k].conj();
                        a[k * n + q] = a[q * n + k].conj();
                    }
                }
                a[p * n + p] = C64::new(c * c * app - 2.0 * c * s * r + s * s * aqq, 0.0);
                a[q * n + q] = C64::new(s * s * app + 2.0 * c * s * r + c * c * aqq, 0.0);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                let (head, tail) = vt.split_at_mut(q * n);
                let vp = &mut head[p * n..(p + 1) * n];
                let vq = &mut tail[..n];
                for k in 0..n {
                    let (x, y) = (vp[k], vq[k]);
                    vp[k] = x * c - pc * y * s;
                    vq[k] = x * s + pc * y * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| vt[order[k] * n + i]);
    Ok(Eigen { values, vectors })
}

/// Scalars a power iteration can run over.
pub trait PowerScalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn sample(rng: &mut ChaCha8Rng) -> Self;
    fn norm_sqr(self) -> f64;
    /// Re(conj(self) * other)
    fn real_dot(self, other: Self) -> f64;
}

impl PowerScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        rng.sample(StandardNormal)
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn real_dot(self, other: Self) -> f64 {
        self * other
    }
}

impl PowerScalar for C64 {
    fn zero() -> Self {
        ZERO
    }
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }
    fn norm_sqr(self) -> f64 {
        C64::norm_sqr(&self)
    }
    fn real_dot(self, other: Self) -> f64 {
        self.re * other.re + self.im * other.im
    }
}

/// Settings for the shifted power iteration.
#[derive(Clone, Copy, Debug)]
pub struct PowerIteration {
    /// Added to the operator so that its top eigenvalue dominates in modulus;
    /// must exceed the spectral radius.
    pub shift: f64,
    /// Stop once the Rayleigh quotient moves less than this over `window` steps.
    pub tol: f64,
    pub window: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self { shift: 2.0, tol: 1e-12, window: 10, max_iter: 200_000, seed: 0x5eed }
    }
}

impl PowerIteration {
    pub fn run<T: PowerScalar>(&self, dim: usize, mut apply: impl FnMut(&[T], &mut [T])) -> Result<f64> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("empty space".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut v: Vec<T> = (0..dim).map(|_| T::sample(&mut rng)).collect();
        normalize(&mut v);
        let mut w = vec![T::zero(); dim];
        let mut history: Vec<f64> = Vec::with_capacity(self.max_iter.min(1 << 16));
        let mut estimate = f64::NAN;
        for it in 0..self.max_iter {
            apply(&v, &mut w);
            let mut rq = 0.0;
            for (wi, &vi) in w.iter_mut().zip(&v) {
                rq += vi.real_dot(*wi);
                *wi = *wi + vi * self.shift;
            }
            estimate = rq;
            history.push(rq);
            if it >= self.window && (rq - history[it - self.window]).abs() < self.tol {
                return Ok(rq);
            }
            std::mem::swap(&mut v, &mut w);
            if normalize(&mut v) == 0.0 {
                // v was an eigenvector of eigenvalue -shift; nothing above it.
                return Ok(rq);
            }
        }
        Err(Error::NotConverged { iterations: self.max_iter, estimate })
    }
}

fn normalize<T: PowerScalar>(v: &mut [T]) -> f64 {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        let inv = 1.0 / n;
        for x in v.iter_mut() {
            *x = *x * inv;
        }
    }
    n
}

/// Largest eigenvalue of a Hermitian operator given only its action, via power
/// iteration on `H + 2I` (valid when the spectral radius is below 2).
pub fn max_eig_matfree<T: PowerScalar>(
    apply: impl FnMut(&[T], &mut [T]),
    dim: usize,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    PowerIteration { tol, max_iter, ..PowerIteration::default() }.run(dim, apply)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &Eigen) -> ComplexMatrix {
        e.map(|x| x)
    }

    #[test]
    fn diagonal_sorted() {
        let e = hermitian_eig(&ComplexMatrix::diag(&[3.0, -2.0, 5.0])).unwrap();
        assert_eq!(e.values, vec![-2.0, 3.0, 5.0]);
    }

    #[test]
    fn complex_two_by_two() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)],
        )
        .unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] - 0.0).abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
        assert!(reconstruct(&e).approx_eq(&m, 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn power_iteration_reports_failure() {
        // Fewer steps than the convergence window.
        let r = max_eig_matfree::<f64>(|v, out| out.copy_from_slice(v), 3, 1e-12, 5);
        assert!(matches!(r, Err(Error::NotConverged { iterations: 5, .. })));
    }

    #[test]
    fn power_iteration_diagonal() {
        let d = [0.3, -0.9, 0.7, 0.1];
        let top = max_eig_matfree::<f64>(
            |v, out| {
                for i in 0..4 {
                    out[i] = d[i] * v[i];
                }
            },
            4,
            1e-13,
            100_000,
        )
        .unwrap();
        assert!((top - 0.7).abs() < 1e-10);
    }
}
