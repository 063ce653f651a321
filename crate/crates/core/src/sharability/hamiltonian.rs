//! H_{m,n} = -(1/mn) sum_{i in L, j in R} V_ij, applied without a matrix.

use crate::error::{Error, Result};
use crate::tensor::{max_eig_matfree, ComplexMatrix, C64};

/// Cap on d^(m+n) for matrix-free work.
pub const MATFREE_CAP: u128 = 1 << 20;
/// Cap on d^(m+n) for dense work.
pub const DENSE_CAP: u128 = 4096;

/// The sharing operator on (C^d)^(m+n); parties 0..m are L, m..m+n are R.
#[derive(Clone, Debug)]
pub struct SharingHamiltonian {
    d: usize,
    m: usize,
    n: usize,
}

fn size(d: usize, parties: usize) -> u128 {
    (d as u128).checked_pow(parties as u32).unwrap_or(u128::MAX)
}

impl SharingHamiltonian {
    pub fn new(d: usize, m: usize, n: usize) -> Result<Self> {
        if d < 2 || m == 0 || n == 0 {
            return Err(Error::ParameterOutOfRange(format!("need d >= 2 and m, n >= 1, got d={d} m={m} n={n}")));
        }
        let s = size(d, m + n);
        if s > MATFREE_CAP {
            return Err(Error::CapExceeded { what: "sharing Hamiltonian dimension", size: s, cap: MATFREE_CAP });
        }
        Ok(Self { d, m, n })
    }

    pub fn dim(&self) -> usize {
        size(self.d, self.m + self.n) as usize
    }

    fn strides(&self) -> Vec<usize> {
        let parties = self.m + self.n;
        let mut s = vec![1usize; parties];
        for i in (0..parties.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.d;
        }
        s
    }

    /// out = H v on the full space.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let parties = self.m + self.n;
        let strides = self.strides();
        let scale = -1.0 / (self.m * self.n) as f64;
        let mut digits = vec![0usize; parties];
        for (x, o) in out.iter_mut().enumerate() {
            for (k, dg) in digits.iter_mut().enumerate() {
                *dg = (x / strides[k]) % self.d;
            }
            let mut acc = 0.0;
            for i in 0..self.m {
                for j in self.m..parties {
                    let (di, dj) = (digits[i], digits[j]);
                    let y = x + dj * strides[i] + di * strides[j] - di * strides[i] - dj * strides[j];
                    acc += v[y];
                }
            }
            *o = scale * acc;
        }
    }

    /// Complex variant for generic callers.
    pub fn apply_complex(&self, v: &[C64], out: &mut [C64]) {
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im).collect();
        let mut ore = vec![0.0; v.len()];
        let mut oim = vec![0.0; v.len()];
        self.apply(&re, &mut ore);
        self.apply(&im, &mut oim);
        for (o, (a, b)) in out.iter_mut().zip(ore.into_iter().zip(oim)) {
            *o = C64::new(a, b);
        }
    }

    /// Dense matrix, for small spaces.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let s = size(self.d, self.m + self.n);
        if s > DENSE_CAP {
            return Err(Error::CapExceeded { what: "dense sharing Hamiltonian", size: s, cap: DENSE_CAP });
        }
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                m[(i, j)] = C64::new(col[i], 0.0);
            }
        }
        Ok(m)
    }

    /// H restricted to the basis strings with a balanced digit count
    /// (each digit appears floor or ceil of (m+n)/d times). H preserves digit
    /// counts, and every U(d) irrep occurring here contains that weight, so
    /// the restriction keeps every eigenvalue.
    pub fn balanced_sector(&self) -> SectorOperator {
        let parties = self.m + self.n;
        let d = self.d;
        let mut counts = vec![parties / d; d];
        for c in counts.iter_mut().take(parties % d) {
            *c += 1;
        }
        let strides = self.strides();
        let full = self.dim();
        let mut index = vec![u32::MAX; full];
        let mut states: Vec<Vec<u8>> = Vec::new();
        let mut cur = Vec::with_capacity(parties);
        enumerate_strings(&mut counts, parties, &mut cur, &mut states);
        for (k, s) in states.iter().enumerate() {
            let x: usize = s.iter().zip(&strides).map(|(&dg, &st)| dg as usize * st).sum();
            index[x] = k as u32;
        }
        let pairs = self.m * self.n;
        let mut table = Vec::with_capacity(pairs * states.len());
        for i in 0..self.m {
            for j in self.m..parties {
                for s in &states {
                    let x: usize = s.iter().zip(&strides).map(|(&dg, &st)| dg as usize * st).sum();
                    let (di, dj) = (s[i] as usize, s[j] as usize);
                    let y = x + dj * strides[i] + di * strides[j] - di * strides[i] - dj * strides[j];
                    table.push(index[y]);
                }
            }
        }
        SectorOperator { dim: states.len(), pairs, scale: -1.0 / pairs as f64, table }
    }
}

fn enumerate_strings(counts: &mut [usize], left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if left == 0 {
        out.push(cur.clone());
        return;
    }
    for dg in 0..counts.len() {
        if counts[dg] > 0 {
            counts[dg] -= 1;
            cur.push(dg as u8);
            enumerate_strings(counts, left - 1, cur, out);
            cur.pop();
            counts[dg] += 1;
        }
    }
}

/// H_{m,n} on one weight sector, as gather tables (one per L-R pair).
#[derive(Clone, Debug)]
pub struct SectorOperator {
    dim: usize,
    pairs: usize,
    scale: f64,
    table: Vec<u32>,
}

impl SectorOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for p in 0..self.pairs {
            let t = &self.table[p * self.dim..(p + 1) * self.dim];
            for (o, &y) in out.iter_mut().zip(t) {
                *o += v[y as usize];
            }
        }
        out.iter_mut().for_each(|o| *o *= self.scale);
    }
}

/// Largest eigenvalue of H_{m,n} by power iteration, without any use of
/// representation theory beyond conservation of digit counts.
pub fn max_h_eigenvalue_bruteforce(d: usize, m: usize, n: usize) -> Result<f64> {
    let h = SharingHamiltonian::new(d, m, n)?;
    let sector = h.balanced_sector();
    max_eig_matfree(|v: &[f64], out: &mut [f64]| sector.apply(v, out), sector.dim(), 1e-12, 2_000_000)
}

/// Same, on the full space with no reduction at all.
pub fn max_h_eigenvalue_full_space(d: usize, m: usize, n: usize) -> Result<f64> {
    let h = SharingHamiltonian::new(d, m, n)?;
    max_eig_matfree(|v: &[f64], out: &mut [f64]| h.apply(v, out), h.dim(), 1e-12, 2_000_000)
}
