//! Permutation operators on (C^d)^N, the three-party symmetrizer bases and
//! the twirling projections.

use std::fmt;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, partial_transpose, ComplexMatrix, DensityMatrix, TensorSpace, C64, I, ONE, ZERO};

/// Dimension cap for dense permutation matrices.
pub const DENSE_CAP: usize = 4096;
/// Dimension cap for matrix-free application.
pub const MATFREE_CAP: usize = 1 << 20;
/// Largest N for which the twirl enumerates all of S_N.
pub const TWIRL_MAX_PARTIES: usize = 5;

const GRAM_CUTOFF: f64 = 1e-9;

/// A permutation of N positions, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::ParameterOutOfRange(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        Self::cycle(n, &[a, b])
    }

    /// The cycle c0 -> c1 -> ... -> c0.
    pub fn cycle(n: usize, cycle: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for (k, &c) in cycle.iter().enumerate() {
            if c >= n {
                return Err(Error::ParameterOutOfRange(format!("cycle entry {c} >= {n}")));
            }
            images[c] = cycle[(k + 1) % cycle.len()];
        }
        Self::new(images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// self o other: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p] = i;
        }
        Self { images }
    }

    /// Cycle decomposition including fixed points, each cycle starting at
    /// its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                c.push(j);
                j = self.images[j];
            }
            out.push(c);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    pub fn sign(&self) -> i32 {
        if (self.len() - self.num_cycles()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All of S_n in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Self> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Self { images: cur.clone() }];
        while let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) {
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Self { images: cur.clone() });
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for c in nontrivial {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn check_size(d: usize, n: usize, cap: usize, what: &'static str) -> Result<usize> {
    let size = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::CapExceeded { what, size, cap: cap as u128 });
    }
    Ok(size as usize)
}

/// Image of every basis index under V_p: the factor at position i moves to
/// position p(i), so V_p V_q = V_{p o q}.
pub fn perm_index_map(p: &Permutation, d: usize) -> Result<Vec<usize>> {
    let n = p.len();
    let total = check_size(d, n, MATFREE_CAP, "permutation operator")?;
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * d;
    }
    let mut out = Vec::with_capacity(total);
    for x in 0..total {
        let mut y = 0;
        for i in 0..n {
            let digit = (x / strides[i]) % d;
            y += digit * strides[p.apply(i)];
        }
        out.push(y);
    }
    Ok(out)
}

/// Dense V_p on (C^d)^N with N = p.len().
pub fn perm_operator(p: &Permutation, d: usize) -> Result<ComplexMatrix> {
    let total = check_size(d, p.len(), DENSE_CAP, "dense permutation operator")?;
    let map = perm_index_map(p, d)?;
    let mut m = ComplexMatrix::zeros(total, total);
    for (x, &y) in map.iter().enumerate() {
        m[(y, x)] = ONE;
    }
    Ok(m)
}

/// V_p applied to a state vector without forming the matrix.
pub fn apply_perm(p: &Permutation, d: usize, v: &[C64]) -> Result<Vec<C64>> {
    let map = perm_index_map(p, d)?;
    if v.len() != map.len() {
        return Err(Error::DimensionMismatch(format!("vector of length {} for dimension {}", v.len(), map.len())));
    }
    let mut out = vec![ZERO; v.len()];
    for (x, &y) in map.iter().enumerate() {
        out[y] = v[x];
    }
    Ok(out)
}

/// Tr[V_p^dagger M] = sum_x M[V_p x, x].
fn trace_with_perm_adjoint(map: &[usize], m: &ComplexMatrix) -> C64 {
    map.iter().enumerate().map(|(x, &y)| m[(y, x)]).sum()
}

/// The six named permutations of three parties A=0, B=1, C=2.
pub mod three {
    use super::Permutation;

    pub fn id() -> Permutation {
        Permutation::identity(3)
    }
    pub fn ab() -> Permutation {
        Permutation::transposition(3, 0, 1).unwrap()
    }
    pub fn ac() -> Permutation {
        Permutation::transposition(3, 0, 2).unwrap()
    }
    pub fn bc() -> Permutation {
        Permutation::transposition(3, 1, 2).unwrap()
    }
    /// A -> B -> C -> A
    pub fn abc() -> Permutation {
        Permutation::cycle(3, &[0, 1, 2]).unwrap()
    }
    /// C -> B -> A -> C, the inverse of `abc`.
    pub fn cba() -> Permutation {
        Permutation::cycle(3, &[2, 1, 0]).unwrap()
    }
}

/// Dense three-party permutation operators for one dimension.
#[derive(Clone, Debug)]
pub struct ThreePartyOps {
    pub d: usize,
    pub id: ComplexMatrix,
    pub ab: ComplexMatrix,
    pub ac: ComplexMatrix,
    pub bc: ComplexMatrix,
    pub abc: ComplexMatrix,
    pub cba: ComplexMatrix,
}

impl ThreePartyOps {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::ParameterOutOfRange(format!("dimension {d} < 2")));
        }
        Ok(Self {
            d,
            id: perm_operator(&three::id(), d)?,
            ab: perm_operator(&three::ab(), d)?,
            ac: perm_operator(&three::ac(), d)?,
            bc: perm_operator(&three::bc(), d)?,
            abc: perm_operator(&three::abc(), d)?,
            cba: perm_operator(&three::cba(), d)?,
        })
    }

    /// The same operators, partially transposed on A.
    pub fn transposed_on_a(&self) -> Result<Self> {
        let space = TensorSpace::uniform(self.d, 3)?;
        let pt = |m: &ComplexMatrix| partial_transpose(m, &space, 0);
        Ok(Self {
            d: self.d,
            id: pt(&self.id)?,
            ab: pt(&self.ab)?,
            ac: pt(&self.ac)?,
            bc: pt(&self.bc)?,
            abc: pt(&self.abc)?,
            cba: pt(&self.cba)?,
        })
    }
}

/// sum_k coeffs[k] V_k over [id, AB, AC, BC, ABC, CBA], optionally partially
/// transposed on A, built straight from the index maps.
pub fn three_party_combination(d: usize, coeffs: &[C64; 6], transpose_a: bool) -> Result<ComplexMatrix> {
    let perms = [three::id(), three::ab(), three::ac(), three::bc(), three::abc(), three::cba()];
    let total = check_size(d, 3, DENSE_CAP, "three-party operator")?;
    let stride_a = d * d;
    let mut out = ComplexMatrix::zeros(total, total);
    for (p, &c) in perms.iter().zip(coeffs) {
        if c == ZERO {
            continue;
        }
        for (x, y) in perm_index_map(p, d)?.into_iter().enumerate() {
            if transpose_a {
                // <y|V|x> moves to <y'|V^{T_A}|x'> with the A digits exchanged
                let (xa, ya) = (x / stride_a, y / stride_a);
                let xp = x - xa * stride_a + ya * stride_a;
                let yp = y - ya * stride_a + xa * stride_a;
                out[(yp, xp)] += c;
            } else {
                out[(y, x)] += c;
            }
        }
    }
    Ok(out)
}

fn combo(terms: &[(C64, &ComplexMatrix)]) -> ComplexMatrix {
    let n = terms[0].1.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (c, m) in terms {
        out.add_scaled(*c, m);
    }
    out
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Young symmetrizers R+, R-, R0 and the traceless operators R1..R3 on the
/// support of R0, for U(x)U(x)U-invariant three-party operators.
#[derive(Clone, Debug)]
pub struct SymmetrizerBasisWerner {
    pub d: usize,
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
    pub zero: ComplexMatrix,
    pub r: [ComplexMatrix; 3],
}

impl SymmetrizerBasisWerner {
    /// [R+, R-, R0, R1, R2, R3]
    pub fn ops(&self) -> [&ComplexMatrix; 6] {
        [&self.plus, &self.minus, &self.zero, &self.r[0], &self.r[1], &self.r[2]]
    }
}

pub fn build_werner_basis(d: usize) -> Result<SymmetrizerBasisWerner> {
    let v = ThreePartyOps::new(d)?;
    Ok(werner_basis_from(&v))
}

pub(crate) fn werner_basis_from(v: &ThreePartyOps) -> SymmetrizerBasisWerner {
    let s = 1.0 / 6.0;
    let plus =
        combo(&[(re(s), &v.id), (re(s), &v.ab), (re(s), &v.bc), (re(s), &v.ac), (re(s), &v.abc), (re(s), &v.cba)]);
    let minus =
        combo(&[(re(s), &v.id), (re(-s), &v.ab), (re(-s), &v.bc), (re(-s), &v.ac), (re(s), &v.abc), (re(s), &v.cba)]);
    let t = 1.0 / 3.0;
    let zero = combo(&[(re(2.0 * t), &v.id), (re(-t), &v.abc), (re(-t), &v.cba)]);
    let r1 = combo(&[(re(2.0 * t), &v.bc), (re(-t), &v.ac), (re(-t), &v.ab)]);
    let q = 1.0 / 3f64.sqrt();
    let r2 = combo(&[(re(q), &v.ab), (re(-q), &v.ac)]);
    let r3 = combo(&[(I * q, &v.abc), (-I * q, &v.cba)]);
    SymmetrizerBasisWerner { d: v.d, plus, minus, zero, r: [r1, r2, r3] }
}

/// The analogous decomposition for U*(x)U(x)U-invariant operators, built from
/// permutation operators partially transposed on A.
#[derive(Clone, Debug)]
pub struct SymmetrizerBasisIso {
    pub d: usize,
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
    pub zero: ComplexMatrix,
    pub s: [ComplexMatrix; 3],
}

impl SymmetrizerBasisIso {
    /// [S+, S-, S0, S1, S2, S3]
    pub fn ops(&self) -> [&ComplexMatrix; 6] {
        [&self.plus, &self.minus, &self.zero, &self.s[0], &self.s[1], &self.s[2]]
    }
}

pub fn build_iso_basis(d: usize) -> Result<SymmetrizerBasisIso> {
    let v = ThreePartyOps::new(d)?;
    Ok(iso_basis_from(&v, &v.transposed_on_a()?))
}

/// `v` holds the plain operators, `t` the ones transposed on A (`V_BC` is
/// unaffected by the transpose).
pub(crate) fn iso_basis_from(v: &ThreePartyOps, t: &ThreePartyOps) -> SymmetrizerBasisIso {
    let d = v.d as f64;
    let h = 0.5;
    let p = h / (d + 1.0);
    let plus =
        combo(&[(re(h), &v.id), (re(h), &v.bc), (re(-p), &t.ab), (re(-p), &t.ac), (re(-p), &t.abc), (re(-p), &t.cba)]);
    let m = h / (d - 1.0);
    let minus =
        combo(&[(re(h), &v.id), (re(-h), &v.bc), (re(m), &t.abc), (re(m), &t.cba), (re(-m), &t.ab), (re(-m), &t.ac)]);
    let k = 1.0 / (d * d - 1.0);
    let zero = combo(&[(re(d * k), &t.ab), (re(d * k), &t.ac), (re(-k), &t.abc), (re(-k), &t.cba)]);
    let s1 = combo(&[(re(d * k), &t.abc), (re(d * k), &t.cba), (re(-k), &t.ab), (re(-k), &t.ac)]);
    let q = 1.0 / (d * d - 1.0).sqrt();
    let s2 = combo(&[(re(q), &t.ab), (re(-q), &t.ac)]);
    let s3 = combo(&[(I * q, &t.abc), (-I * q, &t.cba)]);
    SymmetrizerBasisIso { d: v.d, plus, minus, zero, s: [s1, s2, s3] }
}

fn uniform_dimension(space: &TensorSpace) -> Result<usize> {
    let d = space.dims()[0];
    if space.dims().iter().any(|&x| x != d) {
        return Err(Error::DimensionMismatch(format!(
            "twirl needs equal subsystem dimensions, got {:?}",
            space.dims()
        )));
    }
    Ok(d)
}

/// Orthogonal projection of `m` onto span{V_pi : pi in S_N}. With a density
/// matrix as input this equals the average of U^N m U^N^dagger over Haar U.
pub fn project_onto_permutations(m: &ComplexMatrix, space: &TensorSpace) -> Result<ComplexMatrix> {
    let n = space.len();
    let d = uniform_dimension(space)?;
    if n > TWIRL_MAX_PARTIES {
        return Err(Error::CapExceeded { what: "twirl party count", size: n as u128, cap: TWIRL_MAX_PARTIES as u128 });
    }
    check_size(d, n, DENSE_CAP, "twirl")?;
    if m.rows() != space.total() || !m.is_square() {
        return Err(Error::DimensionMismatch("matrix does not match the space".into()));
    }
    let perms = Permutation::all(n);
    let maps: Vec<Vec<usize>> = perms.iter().map(|p| perm_index_map(p, d)).collect::<Result<_>>()?;
    let k = perms.len();
    // b_pi = <V_pi, m> = Tr[V_pi^dagger m]
    let b: Vec<C64> = maps.iter().map(|map| trace_with_perm_adjoint(map, m)).collect();
    let gram = ComplexMatrix::from_fn(k, k, |i, j| {
        re((d as f64).powi(perms[i].inverse().compose(&perms[j]).num_cycles() as i32))
    });
    let eig = hermitian_eig(&gram)?;
    let top = eig.max();
    let pinv = eig.map(|x| if x > GRAM_CUTOFF * top { 1.0 / x } else { 0.0 });
    let c = pinv.apply(&b);
    let dim = space.total();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (map, &ci) in maps.iter().zip(&c) {
        for (x, &y) in map.iter().enumerate() {
            out[(y, x)] += ci;
        }
    }
    Ok(out)
}

/// Werner twirl of an N-party state with equal local dimensions.
pub fn twirl_werner(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = project_onto_permutations(rho.matrix(), rho.space())?;
    Ok(DensityMatrix::from_trusted(rho.space().clone(), out.hermitian_part()))
}

/// Isotropic twirl (U* on the first party, U on the rest) of a two- or
/// three-party state.
pub fn twirl_iso(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let space = rho.space();
    if !(2..=3).contains(&space.len()) {
        return Err(Error::DimensionMismatch(format!("isotropic twirl needs 2 or 3 parties, got {}", space.len())));
    }
    uniform_dimension(space)?;
    let pt = partial_transpose(rho.matrix(), space, 0)?;
    let tw = project_onto_permutations(&pt, space)?;
    let out = partial_transpose(&tw, space, 0)?;
    Ok(DensityMatrix::from_trusted(space.clone(), out.hermitian_part()))
}
