//! Werner and isotropic two-qudit states and their parameterizations.

use crate::error::{Error, Result};
use crate::perm::{perm_operator, Permutation};
use crate::tensor::{partial_transpose, ComplexMatrix, DensityMatrix, TensorSpace, C64, ZERO};

/// Largest d for which the d-partite antisymmetric state is built.
pub const ANTISYMMETRIC_MAX_D: usize = 6;

/// Slack allowed when checking parameter ranges, so that values produced by
/// arithmetic right at an endpoint are accepted.
pub const RANGE_TOL: f64 = 1e-12;

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::ParameterOutOfRange(format!("dimension {d} < 2")));
    }
    Ok(())
}

fn check_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<f64> {
    if !x.is_finite() || x < lo - RANGE_TOL || x > hi + RANGE_TOL {
        return Err(Error::ParameterOutOfRange(format!("{name} = {x} outside [{lo}, {hi}]")));
    }
    Ok(x.clamp(lo, hi))
}

/// Werner state parameter: the expectation of the swap, Tr[V rho].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerParam {
    d: usize,
    psi_minus: f64,
}

impl WernerParam {
    pub fn new(d: usize, psi_minus: f64) -> Result<Self> {
        check_dim(d)?;
        let psi_minus = check_range("psi_minus", psi_minus, -1.0, 1.0)?;
        Ok(Self { d, psi_minus })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn psi_minus(&self) -> f64 {
        self.psi_minus
    }

    /// Probability that both parties see the same outcome in a common basis.
    pub fn alpha(&self) -> f64 {
        (self.psi_minus + 1.0) / (self.d as f64 + 1.0)
    }

    pub fn from_alpha(d: usize, alpha: f64) -> Result<Self> {
        check_dim(d)?;
        let df = d as f64;
        let alpha = check_range("alpha_w", alpha, 0.0, 2.0 / (df + 1.0))?;
        Self::new(d, alpha * (df + 1.0) - 1.0)
    }
}

/// Isotropic state parameter: Tr[V^{T_A} rho] = d times the singlet fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsotropicParam {
    d: usize,
    phi_plus: f64,
}

impl IsotropicParam {
    pub fn new(d: usize, phi_plus: f64) -> Result<Self> {
        check_dim(d)?;
        let phi_plus = check_range("phi_plus", phi_plus, 0.0, d as f64)?;
        Ok(Self { d, phi_plus })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phi_plus(&self) -> f64 {
        self.phi_plus
    }

    pub fn singlet_fraction(&self) -> f64 {
        self.phi_plus / self.d as f64
    }

    pub fn alpha(&self) -> f64 {
        (self.phi_plus + 1.0) / (self.d as f64 + 1.0)
    }

    pub fn from_alpha(d: usize, alpha: f64) -> Result<Self> {
        check_dim(d)?;
        let df = d as f64;
        let alpha = check_range("alpha_i", alpha, 1.0 / (df + 1.0), 1.0)?;
        Self::new(d, alpha * (df + 1.0) - 1.0)
    }
}

/// Swap operator on C^d (x) C^d.
pub fn swap(d: usize) -> Result<ComplexMatrix> {
    perm_operator(&Permutation::transposition(2, 0, 1)?, d)
}

/// V^{T_A} = d |Phi+><Phi+|.
pub fn swap_transposed(d: usize) -> Result<ComplexMatrix> {
    partial_transpose(&swap(d)?, &TensorSpace::uniform(d, 2)?, 0)
}

/// a I + b X with Tr = 1 and Tr[X rho] = x, where Tr X = d and Tr X^2 = d^2.
fn two_term_state(d: usize, x: f64, op: ComplexMatrix) -> Result<DensityMatrix> {
    let df = d as f64;
    let denom = df * (df * df - 1.0);
    let a = (df - x) / denom;
    let b = (x * df - 1.0) / denom;
    let mut m = op.scale_real(b);
    for i in 0..d * d {
        m[(i, i)] += C64::new(a, 0.0);
    }
    Ok(DensityMatrix::from_trusted(TensorSpace::uniform(d, 2)?, m))
}

pub fn werner_state(p: WernerParam) -> Result<DensityMatrix> {
    two_term_state(p.d, p.psi_minus, swap(p.d)?)
}

pub fn isotropic_state(p: IsotropicParam) -> Result<DensityMatrix> {
    two_term_state(p.d, p.phi_plus, swap_transposed(p.d)?)
}

/// Tr[V rho] for a two-party state.
pub fn werner_parameter_of(rho: &DensityMatrix) -> Result<f64> {
    let d = two_party_dim(rho)?;
    Ok(rho.expectation(&swap(d)?).re)
}

/// Tr[V^{T_A} rho] for a two-party state.
pub fn isotropic_parameter_of(rho: &DensityMatrix) -> Result<f64> {
    let d = two_party_dim(rho)?;
    Ok(rho.expectation(&swap_transposed(d)?).re)
}

fn two_party_dim(rho: &DensityMatrix) -> Result<usize> {
    match rho.space().dims() {
        [a, b] if a == b => Ok(*a),
        dims => Err(Error::DimensionMismatch(format!("expected two equal parties, got {dims:?}"))),
    }
}

/// Zero for psi_minus >= 0.
pub fn concurrence_werner(p: WernerParam) -> f64 {
    (-p.psi_minus).max(0.0)
}

/// Zero for phi_plus <= 1.
pub fn concurrence_iso(p: IsotropicParam) -> f64 {
    let d = p.d as f64;
    ((2.0 / (d * (d - 1.0))).sqrt() * (p.phi_plus - 1.0)).max(0.0)
}

/// C_AB^2 + C_AC^2 <= 1.
pub fn weak_ckw_holds(c_ab: f64, c_ac: f64) -> bool {
    c_ab * c_ab + c_ac * c_ac <= 1.0 + 1e-12
}

/// The d-partite fully antisymmetric state on (C^d)^d.
pub fn antisymmetric_state(d: usize) -> Result<Vec<C64>> {
    check_dim(d)?;
    if d > ANTISYMMETRIC_MAX_D {
        return Err(Error::CapExceeded {
            what: "antisymmetric state parties",
            size: d as u128,
            cap: ANTISYMMETRIC_MAX_D as u128,
        });
    }
    let space = TensorSpace::uniform(d, d)?;
    let mut v = vec![ZERO; space.total()];
    let perms = Permutation::all(d);
    let norm = 1.0 / (perms.len() as f64).sqrt();
    for p in &perms {
        v[space.index(p.images())] = C64::new(p.sign() as f64 * norm, 0.0);
    }
    Ok(v)
}
