//! One-dimensional convex minimization and convex-hull membership tests.

const GOLDEN_ITERS: usize = 200;

/// Minimum of a convex (or unimodal) function on [lo, hi] by golden-section
/// search. Returns (argmin, min).
pub fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if b - a <= f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // The endpoints matter for monotone functions.
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Whether `x` lies in the convex hull of the point `p` and the convex set
/// {k : violation(k) <= tol}, where `violation` is convex and the set is
/// contained in a ball of diameter `diameter` around `p`.
///
/// x is in the hull iff x = p or p + s (x - p) is in the set for some s >= 1.
pub fn in_hull_with_point<const N: usize>(
    x: [f64; N],
    p: [f64; N],
    diameter: f64,
    tol: f64,
    violation: impl Fn([f64; N]) -> f64,
) -> bool {
    if violation(x) <= tol {
        return true;
    }
    let dist = x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if dist < 1e-15 {
        return true;
    }
    let s_max = 1.0 + diameter / dist;
    let along = |s: f64| {
        let mut k = [0.0; N];
        for i in 0..N {
            k[i] = p[i] + s * (x[i] - p[i]);
        }
        violation(k)
    };
    golden_min(1.0, s_max, along).1 <= tol
}
