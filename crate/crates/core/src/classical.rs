//! Classical analogues of Werner and isotropic states and their three-party
//! joinability polytope.

use crate::error::{Error, Result};

const BOUNDARY_TOL: f64 = 1e-9;
const MARGINAL_TOL: f64 = 1e-12;

/// Two d-outcome variables that agree with probability alpha, uniformly
/// over the agreeing and over the disagreeing outcome pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgreementDist {
    pub d: usize,
    pub alpha: f64,
}

impl AgreementDist {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::ParameterOutOfRange(format!("outcome count {d} < 2")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::ParameterOutOfRange(format!("agreement probability {alpha} outside [0, 1]")));
        }
        Ok(Self { d, alpha })
    }

    pub fn joint(&self) -> JointDist {
        let d = self.d as f64;
        let same = self.alpha / d;
        let diff = (1.0 - self.alpha) / (d * (d - 1.0));
        let mut p = vec![diff; self.d * self.d];
        for i in 0..self.d {
            p[i * self.d + i] = same;
        }
        JointDist { d: self.d, p }
    }
}

/// Joint distribution of two d-outcome variables, row-major p[a*d + b].
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist {
    pub d: usize,
    pub p: Vec<f64>,
}

impl JointDist {
    pub fn new(d: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != d * d {
            return Err(Error::DimensionMismatch(format!("{} probabilities for {d} outcomes squared", p.len())));
        }
        check_distribution(&p)?;
        Ok(Self { d, p })
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.d + b]
    }

    pub fn first_marginal(&self) -> Vec<f64> {
        (0..self.d).map(|a| (0..self.d).map(|b| self.get(a, b)).sum()).collect()
    }

    pub fn agreement(&self) -> f64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }
}

/// Distribution over (a, b, c), stored at index (a*d + b)*d + c.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteDist {
    pub d: usize,
    pub p: Vec<f64>,
}

impl TripartiteDist {
    pub fn new(d: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != d * d * d {
            return Err(Error::DimensionMismatch(format!("{} probabilities for {d} outcomes cubed", p.len())));
        }
        check_distribution(&p)?;
        Ok(Self { d, p })
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.p[(a * self.d + b) * self.d + c]
    }

    fn marginal(&self, f: impl Fn(usize, usize, usize) -> (usize, usize)) -> JointDist {
        let d = self.d;
        let mut p = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let (x, y) = f(a, b, c);
                    p[x * d + y] += self.get(a, b, c);
                }
            }
        }
        JointDist { d, p }
    }

    pub fn marginal_ab(&self) -> JointDist {
        self.marginal(|a, b, _| (a, b))
    }

    pub fn marginal_ac(&self) -> JointDist {
        self.marginal(|a, _, c| (a, c))
    }

    pub fn marginal_bc(&self) -> JointDist {
        self.marginal(|_, b, c| (b, c))
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -MARGINAL_TOL) {
        return Err(Error::InvalidState(format!("negative or non-finite probability {x}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// The maximum-entropy joining p(a,b) p(a,c) / p(a).
pub fn classical_join_two(p_ab: &JointDist, p_ac: &JointDist) -> Result<TripartiteDist> {
    if p_ab.d != p_ac.d {
        return Err(Error::DimensionMismatch("pair distributions over different outcome counts".into()));
    }
    let d = p_ab.d;
    let ma = p_ab.first_marginal();
    let mc = p_ac.first_marginal();
    for (a, (x, y)) in ma.iter().zip(&mc).enumerate() {
        if (x - y).abs() > MARGINAL_TOL {
            return Err(Error::InconsistentMarginals(format!("p(A={a}) is {x} in one pair and {y} in the other")));
        }
    }
    let mut p = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let num = p_ab.get(a, b) * p_ac.get(a, c);
                if num == 0.0 {
                    continue;
                }
                if ma[a] <= 0.0 {
                    return Err(Error::InconsistentMarginals(format!("p(A={a}) vanishes under a nonzero joint entry")));
                }
                p[(a * d + b) * d + c] = num / ma[a];
            }
        }
    }
    Ok(TripartiteDist { d, p })
}

/// The five extremal joinings, in the order used for witness weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vertex {
    AllAgree,
    /// A and B agree, C differs.
    AbAgree,
    AcAgree,
    BcAgree,
    /// Pairwise distinct outcomes, needs d >= 3.
    AllDisagree,
}

impl Vertex {
    pub const ALL: [Vertex; 5] =
        [Vertex::AllAgree, Vertex::AbAgree, Vertex::AcAgree, Vertex::BcAgree, Vertex::AllDisagree];

    /// (alpha_AB, alpha_AC, alpha_BC) of the vertex.
    pub fn alphas(self) -> [f64; 3] {
        match self {
            Vertex::AllAgree => [1.0, 1.0, 1.0],
            Vertex::AbAgree => [1.0, 0.0, 0.0],
            Vertex::AcAgree => [0.0, 1.0, 0.0],
            Vertex::BcAgree => [0.0, 0.0, 1.0],
            Vertex::AllDisagree => [0.0, 0.0, 0.0],
        }
    }

    pub fn dist(self, d: usize) -> Result<TripartiteDist> {
        if d < 2 || (self == Vertex::AllDisagree && d < 3) {
            return Err(Error::ParameterOutOfRange(format!("{self:?} does not exist for d = {d}")));
        }
        let mut p = vec![0.0; d * d * d];
        let mut count = 0usize;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let hit = match self {
                        Vertex::AllAgree => a == b && b == c,
                        Vertex::AbAgree => a == b && b != c,
                        Vertex::AcAgree => a == c && a != b,
                        Vertex::BcAgree => b == c && a != b,
                        Vertex::AllDisagree => a != b && b != c && a != c,
                    };
                    if hit {
                        p[(a * d + b) * d + c] = 1.0;
                        count += 1;
                    }
                }
            }
        }
        let w = 1.0 / count as f64;
        p.iter_mut().for_each(|x| *x *= w);
        Ok(TripartiteDist { d, p })
    }
}

/// A joining of three agreement distributions as a convex mixture of vertices.
#[derive(Clone, Debug)]
pub struct ClassicalWitness {
    /// Indexed like [`Vertex::ALL`].
    pub weights: [f64; 5],
    pub dist: TripartiteDist,
}

/// Membership in the classical joinability polytope, by its facet
/// inequalities.
pub fn classical_triple_joinable(d: usize, ab: f64, ac: f64, bc: f64) -> bool {
    if d < 2 || [ab, ac, bc].iter().any(|x| !(-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(x)) {
        return false;
    }
    let t = BOUNDARY_TOL;
    let pair_facets = -ab + ac + bc <= 1.0 + t && ab - ac + bc <= 1.0 + t && ab + ac - bc <= 1.0 + t;
    let base = if d == 2 { ab + ac + bc >= 1.0 - t } else { ab >= -t && ac >= -t && bc >= -t };
    pair_facets && base
}

/// Explicit convex combination of vertex distributions reproducing the
/// three agreement probabilities, when one exists.
pub fn classical_triple_witness(d: usize, ab: f64, ac: f64, bc: f64) -> Option<ClassicalWitness> {
    if !classical_triple_joinable(d, ab, ac, bc) {
        return None;
    }
    let s = ab + ac + bc;
    // Above the plane through the three pair vertices: mix with all-agree.
    // Below it (d >= 3 only): mix with all-disagree.
    let mut w = if s >= 1.0 || d == 2 {
        let all = (s - 1.0) / 2.0;
        [all, ab - all, ac - all, bc - all, 0.0]
    } else {
        [0.0, ab, ac, bc, 1.0 - s]
    };
    w.iter_mut().for_each(|x| *x = x.max(0.0));
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let mut p = vec![0.0; d * d * d];
    for (v, &wi) in Vertex::ALL.iter().zip(&w) {
        if wi == 0.0 {
            continue;
        }
        let vd = v.dist(d).ok()?;
        for (x, y) in p.iter_mut().zip(&vd.p) {
            *x += wi * y;
        }
    }
    Some(ClassicalWitness { weights: w, dist: TripartiteDist { d, p } })
}
