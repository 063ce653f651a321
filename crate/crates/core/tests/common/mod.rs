#![allow(dead_code)]

use qmarginal::feasibility::{Constraint, FeasibilityProblem};
use qmarginal::states::{isotropic_state, werner_state, IsotropicParam, WernerParam};
use qmarginal::tensor::{ComplexMatrix, DensityMatrix, TensorSpace, C64, ZERO};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn ket(d: usize, digits: &[usize]) -> Vec<C64> {
    let mut v = vec![ZERO; d.pow(digits.len() as u32)];
    let idx = digits.iter().fold(0, |acc, &x| acc * d + x);
    v[idx] = c(1.0);
    v
}

pub fn add(a: &[C64], b: &[C64], sb: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y * sb).collect()
}

/// |Phi+> = sum_k |kk> / sqrt(d)
pub fn phi_plus(d: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    for k in 0..d {
        v[k * d + k] = c(1.0 / (d as f64).sqrt());
    }
    v
}

/// Swap on two d-dimensional factors, built entry by entry.
pub fn swap_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, col| {
        let (i, j) = (col / d, col % d);
        if r == j * d + i {
            c(1.0)
        } else {
            ZERO
        }
    })
}

pub fn pair(d: usize, m: ComplexMatrix) -> DensityMatrix {
    DensityMatrix::new(TensorSpace::uniform(d, 2).unwrap(), m).unwrap()
}

pub fn werner(d: usize, psi: f64) -> DensityMatrix {
    werner_state(WernerParam::new(d, psi).unwrap()).unwrap()
}

pub fn iso(d: usize, phi: f64) -> DensityMatrix {
    isotropic_state(IsotropicParam::new(d, phi).unwrap()).unwrap()
}

pub fn problem(dims: Vec<usize>, cons: Vec<(Vec<usize>, DensityMatrix)>) -> FeasibilityProblem {
    let cs = cons.into_iter().map(|(subsystems, target)| Constraint { subsystems, target }).collect();
    FeasibilityProblem::new(TensorSpace::new(dims).unwrap(), cs).unwrap()
}

pub fn werner_triple_problem(d: usize, psi: [f64; 3]) -> FeasibilityProblem {
    problem(
        vec![d; 3],
        vec![(vec![0, 1], werner(d, psi[0])), (vec![0, 2], werner(d, psi[1])), (vec![1, 2], werner(d, psi[2]))],
    )
}

pub fn iso_triple_problem(d: usize, phi_ab: f64, phi_ac: f64, psi_bc: f64) -> FeasibilityProblem {
    problem(
        vec![d; 3],
        vec![(vec![0, 1], iso(d, phi_ab)), (vec![0, 2], iso(d, phi_ac)), (vec![1, 2], werner(d, psi_bc))],
    )
}

/// rho = (1/3)[(|00>+|11>)(<00|+<11|) + |10><10|]
pub fn qubit_1_2_state() -> DensityMatrix {
    let t = 1.0 / 3.0;
    let m = ComplexMatrix::from_real(4, 4, &[t, 0., 0., t, 0., 0., 0., 0., 0., 0., t, 0., t, 0., 0., t]).unwrap();
    pair(2, m)
}

/// (|000> + |101> + |110>) / sqrt(3)
pub fn qubit_1_2_sharing_vector() -> Vec<C64> {
    let s = 1.0 / 3f64.sqrt();
    let mut v = vec![ZERO; 8];
    for k in [0b000, 0b101, 0b110] {
        v[k] = c(s);
    }
    v
}

/// Largest eigenvalue of H_{m,n} from a dense matrix built here from the
/// digit-swap action, for small spaces.
pub fn dense_h_max(d: usize, m: usize, n: usize) -> f64 {
    let parties = m + n;
    let dim = d.pow(parties as u32);
    let digits = |x: usize| -> Vec<usize> { (0..parties).rev().map(|k| (x / d.pow(k as u32)) % d).collect() };
    let index = |ds: &[usize]| ds.iter().fold(0, |acc, &x| acc * d + x);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for x in 0..dim {
        let dx = digits(x);
        for i in 0..m {
            for j in m..parties {
                let mut dy = dx.clone();
                dy.swap(i, j);
                h[(index(&dy), x)] -= c(1.0 / (m * n) as f64);
            }
        }
    }
    qmarginal::tensor::hermitian_eig(&h).unwrap().max()
}

/// A-B perfectly correlated in the X basis, A-C in the Z basis.
pub fn xz_correlated_problem() -> FeasibilityProblem {
    let h = 1.0 / 2f64.sqrt();
    let plus = vec![c(h), c(h)];
    let minus = vec![c(h), c(-h)];
    let kron2 = |a: &[C64], b: &[C64]| -> Vec<C64> { a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect() };
    let mut x = ComplexMatrix::outer(&kron2(&plus, &plus)).scale_real(0.5);
    x.add_scaled(c(0.5), &ComplexMatrix::outer(&kron2(&minus, &minus)));
    let mut z = ComplexMatrix::outer(&ket(2, &[0, 0])).scale_real(0.5);
    z.add_scaled(c(0.5), &ComplexMatrix::outer(&ket(2, &[1, 1])));
    problem(vec![2; 3], vec![(vec![0, 1], pair(2, x)), (vec![0, 2], pair(2, z))])
}

/// |Phi+> on both A-B and A-C.
pub fn bell_problem() -> FeasibilityProblem {
    let b = pair(2, ComplexMatrix::outer(&phi_plus(2)));
    problem(vec![2; 3], vec![(vec![0, 1], b.clone()), (vec![0, 2], b)])
}

/// The optimal 1-2 shared qubit state on A-B1 and A-B2.
pub fn qubit_1_2_problem() -> FeasibilityProblem {
    let rho = qubit_1_2_state();
    problem(vec![2; 3], vec![(vec![0, 1], rho.clone()), (vec![0, 2], rho)])
}

/// The same state on every pair (A_i, B_j) of two left and two right parties.
pub fn qubit_2_2_problem() -> FeasibilityProblem {
    let rho = qubit_1_2_state();
    let cons = [[0, 2], [0, 3], [1, 2], [1, 3]].iter().map(|p| (p.to_vec(), rho.clone())).collect();
    problem(vec![2; 4], cons)
}

/// Barycentric membership in the hull of the vertex agreement vectors,
/// solved over every 4-subset by Cramer's rule.
pub fn in_vertex_hull(d: usize, x: [f64; 3]) -> bool {
    use qmarginal::classical::Vertex;
    let verts: Vec<[f64; 3]> =
        Vertex::ALL.iter().filter(|v| d >= 3 || **v != Vertex::AllDisagree).map(|v| v.alphas()).collect();
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let k = verts.len();
    let subsets = if k == 4 { 1 } else { k };
    for skip in 0..subsets {
        let s: Vec<[f64; 3]> =
            verts.iter().enumerate().filter(|(i, _)| k == 4 || *i != skip).map(|(_, v)| *v).collect();
        // tetrahedron s[0..4]: solve x - s0 = sum_{i>0} l_i (s_i - s0)
        let e = |i: usize| [s[i][0] - s[0][0], s[i][1] - s[0][1], s[i][2] - s[0][2]];
        let cols = [e(1), e(2), e(3)];
        let m =
            |c: [[f64; 3]; 3]| [[c[0][0], c[1][0], c[2][0]], [c[0][1], c[1][1], c[2][1]], [c[0][2], c[1][2], c[2][2]]];
        let det = det3(m(cols));
        if det.abs() < 1e-12 {
            continue;
        }
        let rhs = [x[0] - s[0][0], x[1] - s[0][1], x[2] - s[0][2]];
        let mut l = [0.0; 3];
        for i in 0..3 {
            let mut c = cols;
            c[i] = rhs;
            l[i] = det3(m(c)) / det;
        }
        let l0 = 1.0 - l.iter().sum::<f64>();
        if l.iter().chain([&l0]).all(|&v| v >= -1e-9) {
            return true;
        }
    }
    false
}
