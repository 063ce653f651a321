//! m-n sharability of Werner and isotropic states.
//!
//! A bipartite state is m-n sharable when some state on m left and n right
//! parties reduces to it on every left-right pair. For Werner states the
//! threshold on -Psi is the top eigenvalue of H_{m,n}, found exactly from
//! Young diagrams.

mod hamiltonian;
mod table;
mod young;

pub use hamiltonian::{max_h_eigenvalue_bruteforce, max_h_eigenvalue_full_space, SectorOperator, SharingHamiltonian};
pub use table::{published_table, sharing_table, TableCell, TableStatus};
pub use young::{
    block_eigenvalue, casimir_eigenvalue, enumerate_diagrams, lr_decompose, max_h_block, max_h_eigenvalue_young,
    Rational, YoungDiagram, YoungOptimum,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::random::{random_unitary, tensor_power};
use crate::states::{isotropic_parameter_of, werner_parameter_of, IsotropicParam, WernerParam};
use crate::tensor::{embed, hermitian_eig, ComplexMatrix, DensityMatrix, TensorSpace};

/// Dimension cap for states built densely in this module.
pub const STATE_CAP: usize = 4096;
/// Dimension cap for the eigendecomposition behind [`sharing_state_1n`].
pub const EIGEN_STATE_CAP: usize = 1024;

const SLACK: f64 = 1e-12;

/// Threshold of Psi- for 1-n sharing: -(d-1)/n, floored at the intrinsic -1.
pub fn werner_1n_threshold(d: usize, n: usize) -> f64 {
    (-(d as f64 - 1.0) / n as f64).max(-1.0)
}

/// Upper limit on Phi+ for 1-n sharing: 1 + (d-1)/n, capped at d.
pub fn iso_1n_threshold(d: usize, n: usize) -> f64 {
    (1.0 + (d as f64 - 1.0) / n as f64).min(d as f64)
}

pub fn sharable_1n_werner(p: WernerParam, n: usize) -> bool {
    n >= 1 && p.psi_minus() >= werner_1n_threshold(p.d(), n) - SLACK
}

pub fn sharable_1n_iso(p: IsotropicParam, n: usize) -> bool {
    n >= 1 && p.phi_plus() <= iso_1n_threshold(p.d(), n) + SLACK
}

/// m-n sharability of a Werner state via the exact Young-diagram threshold.
pub fn sharable_mn_werner(p: WernerParam, m: usize, n: usize) -> Result<bool> {
    let t = max_h_eigenvalue_young(p.d(), m, n)?;
    let t = *t.numer() as f64 / *t.denom() as f64;
    Ok(p.psi_minus() >= (-t).max(-1.0) - SLACK)
}

/// Normalized projector onto the top eigenspace of H_{1,n}: a 1-n sharing
/// state of the most entangled sharable Werner state.
pub fn sharing_state_1n(d: usize, n: usize) -> Result<DensityMatrix> {
    let h = SharingHamiltonian::new(d, 1, n)?;
    if h.dim() > EIGEN_STATE_CAP {
        return Err(Error::CapExceeded {
            what: "sharing state dimension",
            size: h.dim() as u128,
            cap: EIGEN_STATE_CAP as u128,
        });
    }
    let eig = hermitian_eig(&h.to_dense()?)?;
    let top = eig.max();
    let p = eig.map(|x| if x >= top - 1e-8 { 1.0 } else { 0.0 });
    let tr = p.trace().re;
    Ok(DensityMatrix::from_trusted(TensorSpace::uniform(d, 1 + n)?, p.scale_real(1.0 / tr)))
}

/// sum_i w_i (L_i)^m (x) (R_i)^n: an m-n sharing state of the separable
/// state sum_i w_i L_i (x) R_i.
pub fn share_separable(
    components: &[(f64, DensityMatrix, DensityMatrix)],
    m: usize,
    n: usize,
) -> Result<DensityMatrix> {
    let (_, l0, r0) = components.first().ok_or_else(|| Error::InvalidProblem("no components".into()))?;
    let (dl, dr) = (l0.dim(), r0.dim());
    let total: f64 = components.iter().map(|c| c.0).sum();
    if components.iter().any(|c| c.0 < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::ParameterOutOfRange("weights must be non-negative and sum to 1".into()));
    }
    if components.iter().any(|(_, l, r)| l.dim() != dl || r.dim() != dr) {
        return Err(Error::DimensionMismatch("components act on different spaces".into()));
    }
    let size = (dl as u128).pow(m as u32) * (dr as u128).pow(n as u32);
    if size > STATE_CAP as u128 {
        return Err(Error::CapExceeded { what: "sharing state dimension", size, cap: STATE_CAP as u128 });
    }
    let size = size as usize;
    let mut w = ComplexMatrix::zeros(size, size);
    for (wt, l, r) in components {
        let term = tensor_power(l.matrix(), m).kron(&tensor_power(r.matrix(), n));
        w.add_scaled((*wt).into(), &term);
    }
    let mut dims = vec![dl; m];
    dims.extend(std::iter::repeat(dr).take(n));
    Ok(DensityMatrix::from_trusted(TensorSpace::new(dims)?, w))
}

/// Conjugate a sharing state by U on every left party and V on every right
/// party; it then shares (U (x) V) rho (U (x) V)^dagger.
pub fn transport_sharing_state(
    w: &DensityMatrix,
    m: usize,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<DensityMatrix> {
    let n = w
        .space()
        .len()
        .checked_sub(m)
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidProblem("m must be below the party count".into()))?;
    let big = tensor_power(u, m).kron(&tensor_power(v, n));
    if big.rows() != w.dim() {
        return Err(Error::DimensionMismatch("local unitaries do not match the parties".into()));
    }
    let out = &(&big * w.matrix()) * &big.adjoint();
    Ok(DensityMatrix::from_trusted(w.space().clone(), out))
}

/// Largest n allowed by a 1-n threshold; None when every n is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwirlBounds {
    pub psi_minus: f64,
    pub phi_plus: f64,
    pub werner_max_n: Option<u64>,
    pub iso_max_n: Option<u64>,
}

fn werner_bound(d: usize, psi: f64) -> Option<u64> {
    if psi >= -SLACK {
        return None;
    }
    Some(((d as f64 - 1.0) / -psi + 1e-9).floor().max(1.0) as u64)
}

fn iso_bound(d: usize, phi: f64) -> Option<u64> {
    if phi <= 1.0 + SLACK {
        return None;
    }
    Some(((d as f64 - 1.0) / (phi - 1.0) + 1e-9).floor().max(1.0) as u64)
}

/// Upper bounds on 1-n sharability of an arbitrary two-qudit state from its
/// Werner and isotropic twirls (local rotation on the second party fixed to
/// the identity).
pub fn twirl_sharability_bounds(rho: &DensityMatrix) -> Result<TwirlBounds> {
    let d = rho.space().dims()[0];
    let psi = werner_parameter_of(rho)?;
    let phi = isotropic_parameter_of(rho)?;
    Ok(TwirlBounds { psi_minus: psi, phi_plus: phi, werner_max_n: werner_bound(d, psi), iso_max_n: iso_bound(d, phi) })
}

/// As [`twirl_sharability_bounds`] but also trying `samples` seeded random
/// local unitaries on the second party and keeping the tightest bound of
/// each family. A best-found bound, not an optimum over all unitaries.
pub fn twirl_sharability_bounds_search(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<TwirlBounds> {
    let mut best = twirl_sharability_bounds(rho)?;
    let d = rho.space().dims()[0];
    let space = rho.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tighter = |a: Option<u64>, b: Option<u64>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    };
    for _ in 0..samples {
        let v = embed(&random_unitary(d, &mut rng), space, &[1])?;
        let rotated = &(&v * rho.matrix()) * &v.adjoint();
        let b = twirl_sharability_bounds(&DensityMatrix::from_trusted(space.clone(), rotated))?;
        let wn = tighter(best.werner_max_n, b.werner_max_n);
        if wn != best.werner_max_n {
            best.psi_minus = b.psi_minus;
        }
        let inn = tighter(best.iso_max_n, b.iso_max_n);
        if inn != best.iso_max_n {
            best.phi_plus = b.phi_plus;
        }
        best.werner_max_n = wn;
        best.iso_max_n = inn;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_respect_floors() {
        assert_eq!(werner_1n_threshold(5, 2), -1.0);
        assert_eq!(werner_1n_threshold(2, 4), -0.25);
        assert_eq!(iso_1n_threshold(3, 1), 3.0);
    }

    #[test]
    fn bounds_rounding() {
        assert_eq!(iso_bound(2, 4.0 / 3.0), Some(3));
        assert_eq!(werner_bound(2, -1.0), Some(1));
        assert_eq!(werner_bound(3, 0.2), None);
        assert_eq!(iso_bound(3, 1.0), None);
    }
}
