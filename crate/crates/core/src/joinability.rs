//! Three-party joinability of Werner and isotropic states: analytic
//! predicates and explicit joining states.
//!
//! Parties are A = 0, B = 1, C = 2. A joining state for Werner pairs may be
//! taken invariant under U(x)U(x)U and hence a combination of the six
//! permutation operators; for isotropic pairs on A-B and A-C the symmetry is
//! U*(x)U(x)U and the operators are partially transposed on A.

use std::f64::consts::PI;

use crate::convex::{golden_min, in_hull_with_point};
use crate::error::{Error, Result};
use crate::perm::{three_party_combination, SymmetrizerBasisIso, SymmetrizerBasisWerner};
use crate::tensor::{ComplexMatrix, DensityMatrix, TensorSpace, C64, ZERO};

/// Points this close to an inequality boundary count as joinable.
pub const BOUNDARY_TOL: f64 = 1e-9;
const BOX_TOL: f64 = 1e-12;

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    x.is_finite() && x >= lo - BOX_TOL && x <= hi + BOX_TOL
}

fn check(name: &str, x: f64, lo: f64, hi: f64) -> Result<f64> {
    if !in_range(x, lo, hi) {
        return Err(Error::ParameterOutOfRange(format!("{name} = {x} outside [{lo}, {hi}]")));
    }
    Ok(x.clamp(lo, hi))
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::ParameterOutOfRange(format!("dimension {d} < 2")));
    }
    Ok(())
}

/// exp(2 pi i / 3)
pub fn omega() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Werner parameters Tr[w V_ij] of the three pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerTriple {
    pub d: usize,
    pub psi_ab: f64,
    pub psi_ac: f64,
    pub psi_bc: f64,
}

impl WernerTriple {
    pub fn new(d: usize, psi_ab: f64, psi_ac: f64, psi_bc: f64) -> Result<Self> {
        check_d(d)?;
        Ok(Self {
            d,
            psi_ab: check("psi_ab", psi_ab, -1.0, 1.0)?,
            psi_ac: check("psi_ac", psi_ac, -1.0, 1.0)?,
            psi_bc: check("psi_bc", psi_bc, -1.0, 1.0)?,
        })
    }

    pub fn psi_bar(&self) -> f64 {
        (self.psi_ab + self.psi_ac + self.psi_bc) / 3.0
    }

    /// psi_bc + w psi_ac + w^2 psi_ab
    pub fn z(&self) -> C64 {
        let w = omega();
        C64::new(self.psi_bc, 0.0) + w * self.psi_ac + w * w * self.psi_ab
    }
}

/// Isotropic parameters on A-B and A-C, Werner parameter on B-C.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsoTriple {
    pub d: usize,
    pub phi_ab: f64,
    pub phi_ac: f64,
    pub psi_bc: f64,
}

impl IsoTriple {
    pub fn new(d: usize, phi_ab: f64, phi_ac: f64, psi_bc: f64) -> Result<Self> {
        check_d(d)?;
        let df = d as f64;
        Ok(Self {
            d,
            phi_ab: check("phi_ab", phi_ab, 0.0, df)?,
            phi_ac: check("phi_ac", phi_ac, 0.0, df)?,
            psi_bc: check("psi_bc", psi_bc, -1.0, 1.0)?,
        })
    }

    /// e^{i theta} = sqrt((d-1)/(2d)) + i sqrt((d+1)/(2d)), a unit phase.
    pub fn phase(&self) -> C64 {
        let d = self.d as f64;
        C64::new(((d - 1.0) / (2.0 * d)).sqrt(), ((d + 1.0) / (2.0 * d)).sqrt())
    }

    /// The interval of admissible y = Tr[w (V_ABC + V_CBA)^{T_A}] over all
    /// twirled joining states, or None if empty.
    pub fn y_interval(&self) -> Option<(f64, f64)> {
        let (lo, hi) = iso_y_bounds(self.d, self.phi_ab, self.phi_ac, self.psi_bc);
        (lo <= hi + BOUNDARY_TOL).then_some((lo, hi.max(lo)))
    }
}

/// Lower and upper bounds on y for the isotropic joining problem. Empty when lo > hi.
fn iso_y_bounds(d: usize, phi_ab: f64, phi_ac: f64, psi_bc: f64) -> (f64, f64) {
    let df = d as f64;
    let x = phi_ab + phi_ac;
    let g = 2.0 * (phi_ab.max(0.0) * phi_ac.max(0.0)).sqrt();
    let from_minus = x - (df - 1.0) * (1.0 - psi_bc);
    let from_plus = (df + 1.0) * (1.0 + psi_bc) - x;
    let lo = from_minus.max(-g);
    let mut hi = from_plus.min(g);
    if d == 2 {
        // s_minus vanishes identically, which pins y
        hi = hi.min(from_minus);
    }
    (lo, hi)
}

/// Coordinates Tr[w R_k] in the Werner symmetrizer basis.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RCoords {
    pub r_plus: f64,
    pub r_minus: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// Coordinates Tr[w S_k] in the isotropic symmetrizer basis.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SCoords {
    pub s_plus: f64,
    pub s_minus: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

fn coords_violation(plus: f64, minus: f64, zero: f64, v: [f64; 3]) -> f64 {
    let sphere = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - zero;
    [-plus, -minus, -zero, sphere, (plus + minus + zero - 1.0).abs()].into_iter().fold(f64::NEG_INFINITY, f64::max)
}

impl RCoords {
    pub fn as_array(&self) -> [f64; 6] {
        [self.r_plus, self.r_minus, self.r0, self.r1, self.r2, self.r3]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self { r_plus: a[0], r_minus: a[1], r0: a[2], r1: a[3], r2: a[4], r3: a[5] }
    }

    /// Largest violation of normalization and non-negativity; <= 0 when valid.
    pub fn violation(&self) -> f64 {
        coords_violation(self.r_plus, self.r_minus, self.r0, [self.r1, self.r2, self.r3])
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.violation() <= tol
    }

    /// Tr[w R_k] for each basis element.
    pub fn measure(w: &ComplexMatrix, basis: &SymmetrizerBasisWerner) -> Self {
        let v = basis.ops().map(|op| w.trace_product(op).re);
        Self::from_array(v)
    }
}

impl SCoords {
    pub fn as_array(&self) -> [f64; 6] {
        [self.s_plus, self.s_minus, self.s0, self.s1, self.s2, self.s3]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self { s_plus: a[0], s_minus: a[1], s0: a[2], s1: a[3], s2: a[4], s3: a[5] }
    }

    pub fn violation(&self) -> f64 {
        coords_violation(self.s_plus, self.s_minus, self.s0, [self.s1, self.s2, self.s3])
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.violation() <= tol
    }

    pub fn measure(w: &ComplexMatrix, basis: &SymmetrizerBasisIso) -> Self {
        let v = basis.ops().map(|op| w.trace_product(op).re);
        Self::from_array(v)
    }
}

/// Werner triple joinability (bi-cone for d >= 3, cone for d = 2).
pub fn werner_triple_joinable(t: &WernerTriple) -> bool {
    werner_triple_violation(t) <= BOUNDARY_TOL
}

/// How far a triple lies outside the Werner joinable region in the units of
/// the defining inequalities; <= 0 inside.
pub fn werner_triple_violation(t: &WernerTriple) -> f64 {
    let m = 2.0 / 3.0 * t.z().norm();
    let pb = t.psi_bar();
    if t.d >= 3 {
        m - (1.0 - pb.abs())
    } else {
        (m - (1.0 - pb)).max(-pb)
    }
}

fn iso_cone_violation(d: usize, phase: C64, x: [f64; 3]) -> f64 {
    let df = d as f64;
    let [ab, ac, bc] = x;
    let sum = ab + ac;
    let base = sum - bc - df;
    let rhs = C64::new(df * (bc - 1.0), 0.0) + (phase * ab + phase.conj() * ac) * (2.0 * df / (df - 1.0)).sqrt();
    let side = rhs.norm() - (1.0 + sum - bc);
    let boxv = [-ab, ab - df, -ac, ac - df, -1.0 - bc, bc - 1.0].into_iter().fold(f64::NEG_INFINITY, f64::max);
    base.max(side).max(boxv)
}

/// Isotropic A-B, A-C with Werner B-C: the cone, extended for d >= 3 by its
/// convex hull with (0, 0, -1).
pub fn iso_triple_joinable(t: &IsoTriple) -> bool {
    let phase = t.phase();
    let x = [t.phi_ab, t.phi_ac, t.psi_bc];
    let v = |k: [f64; 3]| iso_cone_violation(t.d, phase, k);
    if t.d == 2 {
        return v(x) <= BOUNDARY_TOL;
    }
    let df = t.d as f64;
    let diameter = (2.0 * df * df + 4.0).sqrt();
    in_hull_with_point(x, [0.0, 0.0, -1.0], diameter, BOUNDARY_TOL, v)
}

/// Werner pairs on A-B and A-C.
pub fn werner_pair_joinable(d: usize, psi_ab: f64, psi_ac: f64) -> bool {
    if d < 2 || !in_range(psi_ab, -1.0, 1.0) || !in_range(psi_ac, -1.0, 1.0) {
        return false;
    }
    let t = BOUNDARY_TOL;
    let (a, b) = (psi_ab, psi_ac);
    let quadrant = a >= -0.5 - t && b >= -0.5 - t;
    let ellipse = (a + b).powi(2) + (a - b).powi(2) / 3.0 <= 1.0 + t;
    let low = d >= 3 && a <= 0.5 + t && b <= 0.5 + t;
    quadrant || ellipse || low
}

/// Isotropic pairs on A-B and A-C: convex hull of an ellipse and the origin.
pub fn iso_pair_joinable(d: usize, phi_ab: f64, phi_ac: f64) -> bool {
    let df = d as f64;
    if d < 2 || !in_range(phi_ab, 0.0, df) || !in_range(phi_ac, 0.0, df) {
        return false;
    }
    let ellipse = |k: [f64; 2]| {
        let e = ((k[0] + k[1] - df).powi(2) + (k[0] - k[1]).powi(2) / (df * df - 1.0)).sqrt() - 1.0;
        let boxv = [-k[0], k[0] - df, -k[1], k[1] - df].into_iter().fold(f64::NEG_INFINITY, f64::max);
        e.max(boxv)
    };
    in_hull_with_point([phi_ab, phi_ac], [0.0, 0.0], 2.0 * df, BOUNDARY_TOL, ellipse)
}

/// Isotropic A-B with Werner B-C: whether some isotropic A-C completes the
/// triple. The gap between the bounds on y is convex in phi_ac, so its
/// minimum decides.
pub fn hybrid_pair_joinable(d: usize, phi_ab: f64, psi_bc: f64) -> bool {
    hybrid_pair_witness(d, phi_ab, psi_bc).is_some()
}

/// A phi_ac that makes the hybrid pair joinable, if any.
pub fn hybrid_pair_witness(d: usize, phi_ab: f64, psi_bc: f64) -> Option<f64> {
    let df = d as f64;
    if d < 2 || !in_range(phi_ab, 0.0, df) || !in_range(psi_bc, -1.0, 1.0) {
        return None;
    }
    let gap = |phi_ac: f64| {
        let (lo, hi) = iso_y_bounds(d, phi_ab, phi_ac, psi_bc);
        lo - hi
    };
    let (arg, best) = golden_min(0.0, df, gap);
    (best <= BOUNDARY_TOL).then_some(arg)
}

/// One central party sharing isotropic states with n others.
pub fn iso_1n_joinable(d: usize, phis: &[f64]) -> bool {
    let df = d as f64;
    if d < 2 || phis.is_empty() || phis.iter().any(|&p| !in_range(p, 0.0, df)) {
        return false;
    }
    iso_1n_margin(d, phis) >= -BOUNDARY_TOL
}

/// Right side minus left side of the 1-n isotropic inequality
/// sum phi_j <= (d-1) + (sum sqrt(phi_j))^2 / (n+d-1); negative outside.
pub fn iso_1n_margin(d: usize, phis: &[f64]) -> f64 {
    let df = d as f64;
    let n = phis.len() as f64;
    let sum: f64 = phis.iter().sum();
    let roots: f64 = phis.iter().map(|p| p.max(0.0).sqrt()).sum();
    (df - 1.0) + roots * roots / (n + df - 1.0) - sum
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// w(r) as a density matrix on (C^d)^3.
pub fn assemble_w_werner(rc: &RCoords, d: usize) -> Result<DensityMatrix> {
    check_d(d)?;
    if !rc.is_valid(BOUNDARY_TOL) {
        return Err(Error::ConstraintViolation(format!("{rc:?}")));
    }
    if d == 2 && rc.r_minus.abs() > BOUNDARY_TOL {
        return Err(Error::ConstraintViolation("r_minus must vanish for d = 2".into()));
    }
    let df = d as f64;
    let ap = 6.0 * rc.r_plus / (df * (df + 1.0) * (df + 2.0));
    let am = if d > 2 { 6.0 * rc.r_minus / (df * (df - 1.0) * (df - 2.0)) } else { 0.0 };
    let c = 3.0 / (2.0 * df * (df * df - 1.0));
    let sym = (ap + am) / 6.0;
    let odd = (ap - am) / 6.0;
    let q = 1.0 / 3f64.sqrt();
    let coeffs = [
        re(sym + c * 2.0 / 3.0 * rc.r0),
        re(odd + c * (-rc.r1 / 3.0 + rc.r2 * q)),
        re(odd + c * (-rc.r1 / 3.0 - rc.r2 * q)),
        re(odd + c * (2.0 / 3.0 * rc.r1)),
        C64::new(sym - c * rc.r0 / 3.0, c * rc.r3 * q),
        C64::new(sym - c * rc.r0 / 3.0, -c * rc.r3 * q),
    ];
    let m = three_party_combination(d, &coeffs, false)?;
    Ok(DensityMatrix::from_trusted(TensorSpace::uniform(d, 3)?, m))
}

/// w(s) as a density matrix on (C^d)^3.
pub fn assemble_w_iso(sc: &SCoords, d: usize) -> Result<DensityMatrix> {
    check_d(d)?;
    if !sc.is_valid(BOUNDARY_TOL) {
        return Err(Error::ConstraintViolation(format!("{sc:?}")));
    }
    if d == 2 && sc.s_minus.abs() > BOUNDARY_TOL {
        return Err(Error::ConstraintViolation("s_minus must vanish for d = 2".into()));
    }
    let df = d as f64;
    let bp = 2.0 * sc.s_plus / (df * (df + 2.0) * (df - 1.0));
    let bm = if d > 2 { 2.0 * sc.s_minus / (df * (df - 2.0) * (df + 1.0)) } else { 0.0 };
    let e = 1.0 / (2.0 * df);
    let k = 1.0 / (df * df - 1.0);
    let q = k.sqrt();
    let pair = -bp / (2.0 * (df + 1.0)) - bm / (2.0 * (df - 1.0)) + e * k * (df * sc.s0 - sc.s1);
    let cyc = -bp / (2.0 * (df + 1.0)) + bm / (2.0 * (df - 1.0)) + e * k * (df * sc.s1 - sc.s0);
    let coeffs = [
        re(bp / 2.0 + bm / 2.0),
        re(pair + e * q * sc.s2),
        re(pair - e * q * sc.s2),
        re(bp / 2.0 - bm / 2.0),
        C64::new(cyc, e * q * sc.s3),
        C64::new(cyc, -e * q * sc.s3),
    ];
    let m = three_party_combination(d, &coeffs, true)?;
    Ok(DensityMatrix::from_trusted(TensorSpace::uniform(d, 3)?, m))
}

/// Coordinates of the twirled joining state with r3 = 0 and the given r_minus.
pub fn coords_from_triple(t: &WernerTriple, r_minus: f64) -> RCoords {
    let pb = t.psi_bar();
    let r_minus = if t.d == 2 { 0.0 } else { r_minus };
    let z = t.z() * (2.0 / 3.0);
    RCoords { r_plus: r_minus + pb, r_minus, r0: 1.0 - 2.0 * r_minus - pb, r1: z.re, r2: -z.im, r3: 0.0 }
}

/// Isotropic analogue: coordinates for a chosen y, with s3 = 0.
pub fn s_coords_from_triple(t: &IsoTriple, y: f64) -> SCoords {
    let df = t.d as f64;
    let x = t.phi_ab + t.phi_ac;
    let psi = t.psi_bc;
    let s_minus = if t.d == 2 { 0.0 } else { 0.5 * (1.0 - psi + (y - x) / (df - 1.0)) };
    SCoords {
        s_plus: 0.5 * (1.0 + psi - (x + y) / (df + 1.0)),
        s_minus,
        s0: (df * x - y) / (df * df - 1.0),
        s1: (df * y - x) / (df * df - 1.0),
        s2: (t.phi_ab - t.phi_ac) / (df * df - 1.0).sqrt(),
        s3: 0.0,
    }
}

/// Explicit joining state for a Werner triple.
pub fn construct_joining_state_werner(t: &WernerTriple) -> Result<DensityMatrix> {
    let r_minus = if t.d >= 3 { (-t.psi_bar()).max(0.0) } else { 0.0 };
    let rc = coords_from_triple(t, r_minus);
    if !rc.is_valid(BOUNDARY_TOL) {
        return Err(Error::NotJoinable);
    }
    assemble_w_werner(&clean_r(rc), t.d)
}

/// Explicit joining state for an isotropic/Werner triple.
pub fn construct_joining_state_iso(t: &IsoTriple) -> Result<DensityMatrix> {
    let (lo, hi) = t.y_interval().ok_or(Error::NotJoinable)?;
    let sc = s_coords_from_triple(t, 0.5 * (lo + hi));
    if !sc.is_valid(BOUNDARY_TOL) {
        return Err(Error::NotJoinable);
    }
    assemble_w_iso(&clean_s(sc), t.d)
}

/// Push coordinates sitting within tolerance of the boundary onto it.
fn clean_r(mut rc: RCoords) -> RCoords {
    rc.r_plus = rc.r_plus.max(0.0);
    rc.r_minus = rc.r_minus.max(0.0);
    rc.r0 = rc.r0.max(0.0);
    let norm = (rc.r1 * rc.r1 + rc.r2 * rc.r2 + rc.r3 * rc.r3).sqrt();
    if norm > rc.r0 && norm > 0.0 {
        let s = rc.r0 / norm;
        rc.r1 *= s;
        rc.r2 *= s;
        rc.r3 *= s;
    }
    rc
}

fn clean_s(sc: SCoords) -> SCoords {
    let r = clean_r(RCoords::from_array(sc.as_array()));
    SCoords::from_array(r.as_array())
}

/// Tr[w (V_ij (x) I)] for the three pairs of a three-party operator, in the
/// order (AB, AC, BC); `transposed` selects V^{T_A} for the pairs with A.
pub fn pair_expectations(w: &ComplexMatrix, d: usize, transposed: bool) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut coeffs = [ZERO; 6];
        coeffs[k + 1] = re(1.0);
        let op = three_party_combination(d, &coeffs, transposed && k < 2)?;
        *slot = w.trace_product(&op).re;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_constructors_validate() {
        assert!(WernerTriple::new(2, 1.2, 0.0, 0.0).is_err());
        assert!(WernerTriple::new(1, 0.0, 0.0, 0.0).is_err());
        assert!(IsoTriple::new(2, 2.5, 0.0, 0.0).is_err());
        assert!(IsoTriple::new(3, 0.0, 0.0, -1.5).is_err());
    }

    #[test]
    fn phase_is_unimodular() {
        for d in 2..20 {
            let t = IsoTriple::new(d, 0.0, 0.0, 0.0).unwrap();
            assert!((t.phase().norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn out_of_box_pairs_are_not_joinable() {
        assert!(!werner_pair_joinable(2, 1.5, 0.0));
        assert!(!iso_pair_joinable(2, -0.5, 0.0));
        assert!(!hybrid_pair_joinable(2, 0.0, 2.0));
        assert!(!iso_1n_joinable(2, &[]));
    }
}
