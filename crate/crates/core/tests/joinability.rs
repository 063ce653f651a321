mod common;

use common::*;
use qmarginal::feasibility::{alternating_projection, DEFAULT_MAX_ITER, DEFAULT_TOL};
use qmarginal::joinability::*;
use qmarginal::perm::{build_iso_basis, build_werner_basis};
use qmarginal::states::{
    antisymmetric_state, concurrence_werner, isotropic_parameter_of, weak_ckw_holds, werner_parameter_of, WernerParam,
};
use qmarginal::tensor::*;
use rand::Rng;

fn wt(d: usize, a: f64, b: f64, c: f64) -> WernerTriple {
    WernerTriple::new(d, a, b, c).unwrap()
}

fn it(d: usize, a: f64, b: f64, c: f64) -> IsoTriple {
    IsoTriple::new(d, a, b, c).unwrap()
}

fn reductions(w: &DensityMatrix, iso_on_a: bool) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, keep) in [[0, 1], [0, 2], [1, 2]].iter().enumerate() {
        let red = w.reduce(keep).unwrap();
        out[k] =
            if iso_on_a && k < 2 { isotropic_parameter_of(&red).unwrap() } else { werner_parameter_of(&red).unwrap() };
    }
    out
}

#[test]
fn triple_derived_quantities() {
    let t = wt(3, 0.2, -0.4, 0.9);
    assert!((t.psi_bar() - 0.7 / 3.0).abs() < 1e-15);
    let w = omega();
    assert!((w.powi(3) - c(1.0)).norm() < 1e-15);
    let z = c(0.9) + w * -0.4 + w * w * 0.2;
    assert!((t.z() - z).norm() < 1e-15);
    for d in 2..=6 {
        let p = it(d, 0.0, 0.0, 0.0).phase();
        assert!((p.norm() - 1.0).abs() < 1e-14);
        assert!((p.im - ((d + 1) as f64 / (2 * d) as f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn werner_triple_examples() {
    assert!(werner_triple_joinable(&wt(2, 0.5, 0.5, 0.5)));
    for d in 2..=5 {
        assert!(!werner_triple_joinable(&wt(d, 1.0, 1.0, 0.0)));
    }
    assert!(werner_triple_joinable(&wt(3, -1.0, -1.0, -1.0)));
    assert!(!werner_triple_joinable(&wt(2, -1.0, -1.0, -1.0)));
}

#[test]
fn iso_triple_examples() {
    // (2, 0, 1) at d = 2: the linear bound is tight, and the modulus bound
    // reads |2 (cos + i sin) * 2| = 4 > 1 + 2 - 1
    assert!(!iso_triple_joinable(&it(2, 2.0, 0.0, 1.0)));
    let report = alternating_projection(&iso_triple_problem(2, 2.0, 0.0, 1.0), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!(!report.is_feasible());
    assert!(iso_triple_joinable(&it(2, 0.5, 0.5, 0.5)));
    assert!(iso_triple_joinable(&it(3, 0.0, 0.0, -1.0)));
}

#[test]
fn pair_examples() {
    assert!(werner_pair_joinable(2, -0.5, -0.5));
    assert!(!werner_pair_joinable(2, -1.0, 0.0));
    assert!(werner_pair_joinable(3, -1.0, -1.0));
    for d in 2..=6 {
        let df = d as f64;
        assert!(iso_pair_joinable(d, 0.0, 0.0));
        assert!(!iso_pair_joinable(d, df, df));
        let b = 1.0 + (df - 1.0) / 2.0;
        assert!(iso_pair_joinable(d, b, b));
        assert!(!iso_pair_joinable(d, b + 1e-6, b + 1e-6));
        assert!(hybrid_pair_joinable(d, 0.0, 1.0));
        assert!(!hybrid_pair_joinable(d, df, 1.0));
    }
    assert!(hybrid_pair_joinable(3, 0.0, -1.0));
}

#[test]
fn iso_1n_examples() {
    for d in 2..=6 {
        let df = d as f64;
        assert!(iso_1n_joinable(d, &[df]));
        for n in 1..=8 {
            let b = 1.0 + (df - 1.0) / n as f64;
            if b > df {
                continue;
            }
            let phis = vec![b; n];
            assert!(iso_1n_margin(d, &phis).abs() < 1e-12, "d={d} n={n}");
            assert!(iso_1n_joinable(d, &phis));
            if n > 1 {
                assert!(!iso_1n_joinable(d, &vec![b + 1e-6; n]));
            }
        }
    }
    assert!(!iso_1n_joinable(2, &[2.0, 2.0]));
}

#[test]
fn coords_examples() {
    let r = coords_from_triple(&wt(2, 0.5, 0.5, 0.5), 0.0);
    let expect = [0.5, 0.0, 0.5, 0.0, 0.0, 0.0];
    assert!(r.as_array().iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-15));
    for d in 2..=4 {
        let r = coords_from_triple(&wt(d, 1.0, 1.0, 1.0), 0.0);
        assert_eq!([r.r_plus, r.r0], [1.0, 0.0]);
        assert!(r.r1.abs() < 1e-15 && r.r2.abs() < 1e-15);
    }
    let r = coords_from_triple(&wt(3, -1.0, -1.0, -1.0), 1.0);
    assert_eq!([r.r_plus, r.r_minus, r.r0], [0.0, 1.0, 0.0]);
}

#[test]
fn assemble_examples() {
    for d in 2..=4 {
        let b = build_werner_basis(d).unwrap();
        let plus = RCoords { r_plus: 1.0, ..Default::default() };
        let w = assemble_w_werner(&plus, d).unwrap();
        let tr = b.plus.trace().re;
        assert!(w.matrix().approx_eq(&b.plus.scale_real(1.0 / tr), 1e-13));

        let n = (d * d * d) as f64;
        let mixed = ComplexMatrix::identity(d * d * d).scale_real(1.0 / n);
        let measured = RCoords::measure(&mixed, &b);
        let x = 1.0 / d as f64;
        let rc = coords_from_triple(&wt(d, x, x, x), measured.r_minus);
        assert!(rc.as_array().iter().zip(measured.as_array()).all(|(a, b)| (a - b).abs() < 1e-13));
        assert!(assemble_w_werner(&rc, d).unwrap().matrix().approx_eq(&mixed, 1e-13));

        let ib = build_iso_basis(d).unwrap();
        let sp = SCoords { s_plus: 1.0, ..Default::default() };
        let w = assemble_w_iso(&sp, d).unwrap();
        let tr = ib.plus.trace().re;
        assert!(w.matrix().approx_eq(&ib.plus.scale_real(1.0 / tr), 1e-13));
    }
    assert!(assemble_w_werner(&RCoords { r_plus: 1.5, r0: -0.5, ..Default::default() }, 3).is_err());
    assert!(assemble_w_werner(&RCoords { r_minus: 1.0, ..Default::default() }, 2).is_err());
}

#[test]
fn constructor_examples() {
    let w = construct_joining_state_werner(&wt(2, 0.5, 0.5, 0.5)).unwrap();
    assert!(w.matrix().approx_eq(&ComplexMatrix::identity(8).scale_real(0.125), 1e-14));
    let w = construct_joining_state_werner(&wt(3, -1.0, -1.0, -1.0)).unwrap();
    let psi = antisymmetric_state(3).unwrap();
    assert!(w.matrix().approx_eq(&ComplexMatrix::outer(&psi), 1e-13));
    assert!(construct_joining_state_werner(&wt(2, 1.0, 1.0, 0.0)).is_err());
}

fn random_r_coords(d: usize, r: &mut impl Rng) -> RCoords {
    let mut p =
        [r.random_range(0.0..1.0), if d > 2 { r.random_range(0.0..1.0) } else { 0.0 }, r.random_range(0.0..1.0)];
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    let mut v: [f64; 3] = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
    let len: f64 = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let scale = p[2] * r.random_range(0.0..1.0) / len;
    v.iter_mut().for_each(|x| *x *= scale);
    RCoords { r_plus: p[0], r_minus: p[1], r0: p[2], r1: v[0], r2: v[1], r3: v[2] }
}

#[test]
fn assembled_states_reproduce_coordinates() {
    let mut r = rng(40);
    for d in 2..=4 {
        let wb = build_werner_basis(d).unwrap();
        let ib = build_iso_basis(d).unwrap();
        for _ in 0..30 {
            let rc = random_r_coords(d, &mut r);
            let w = assemble_w_werner(&rc, d).unwrap();
            assert!(w.min_eigenvalue() >= -1e-12);
            assert!((w.matrix().trace().re - 1.0).abs() < 1e-12);
            let back = RCoords::measure(w.matrix(), &wb);
            assert!(back.as_array().iter().zip(rc.as_array()).all(|(a, b)| (a - b).abs() < 1e-12));

            let sc = SCoords::from_array(random_r_coords(d, &mut r).as_array());
            let w = assemble_w_iso(&sc, d).unwrap();
            assert!(w.min_eigenvalue() >= -1e-12);
            let back = SCoords::measure(w.matrix(), &ib);
            assert!(back.as_array().iter().zip(sc.as_array()).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}

#[test]
fn coords_reproduce_triple() {
    let mut r = rng(41);
    for d in 2..=4 {
        for _ in 0..50 {
            let t = wt(d, r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0));
            let rm = if d > 2 { r.random_range(0.0..1.0) } else { 0.0 };
            let rc = coords_from_triple(&t, rm);
            assert!((rc.r_plus + rc.r_minus + rc.r0 - 1.0).abs() < 1e-12);
            if !rc.is_valid(0.0) {
                continue;
            }
            let w = assemble_w_werner(&rc, d).unwrap();
            let got = pair_expectations(w.matrix(), d, false).unwrap();
            assert!(got.iter().zip([t.psi_ab, t.psi_ac, t.psi_bc]).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}

#[test]
fn predicate_and_constructor_agree() {
    let mut r = rng(42);
    for d in 2..=4 {
        let df = d as f64;
        let (mut yes, mut no) = (0, 0);
        for _ in 0..500 {
            let t = wt(d, r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0));
            match construct_joining_state_werner(&t) {
                Ok(w) => {
                    assert!(werner_triple_joinable(&t), "{t:?}");
                    assert!(w.min_eigenvalue() >= -1e-10);
                    let red = reductions(&w, false);
                    assert!(red.iter().zip([t.psi_ab, t.psi_ac, t.psi_bc]).all(|(a, b)| (a - b).abs() < 1e-10));
                    yes += 1;
                }
                Err(_) => {
                    assert!(!werner_triple_joinable(&t), "{t:?}");
                    no += 1;
                }
            }
            let t = it(d, r.random_range(0.0..=df), r.random_range(0.0..=df), r.random_range(-1.0..=1.0));
            // the constructor covers the cone itself; the extra hull with
            // (0, 0, -1) for d >= 3 is checked separately
            let in_cone = t.y_interval().is_some();
            match construct_joining_state_iso(&t) {
                Ok(w) => {
                    assert!(in_cone && iso_triple_joinable(&t), "{t:?}");
                    assert!(w.min_eigenvalue() >= -1e-10);
                    let red = reductions(&w, true);
                    assert!(red.iter().zip([t.phi_ab, t.phi_ac, t.psi_bc]).all(|(a, b)| (a - b).abs() < 1e-10));
                }
                Err(_) => assert!(!in_cone),
            }
        }
        assert!(yes > 20 && no > 20);
    }
}

#[test]
fn iso_hull_points_are_joined_by_mixtures() {
    // a convex mixture of a cone state and the state at (0, 0, -1) joins the
    // mixed parameters
    let mut r = rng(43);
    for d in 3..=4 {
        let df = d as f64;
        let apex = construct_joining_state_iso(&it(d, 0.0, 0.0, -1.0)).unwrap();
        let mut tried = 0;
        while tried < 20 {
            let t = it(d, r.random_range(0.0..=df), r.random_range(0.0..=df), r.random_range(-1.0..=1.0));
            let Ok(w) = construct_joining_state_iso(&t) else { continue };
            tried += 1;
            let l: f64 = r.random_range(0.0..1.0);
            let mut m = w.matrix().scale_real(l);
            m.add_scaled(c(1.0 - l), apex.matrix());
            let mixed = it(d, l * t.phi_ab, l * t.phi_ac, l * t.psi_bc - (1.0 - l));
            assert!(iso_triple_joinable(&mixed), "{mixed:?}");
            let red = reductions(&DensityMatrix::new(TensorSpace::uniform(d, 3).unwrap(), m).unwrap(), true);
            assert!((red[0] - mixed.phi_ab).abs() < 1e-10 && (red[2] - mixed.psi_bc).abs() < 1e-10);
        }
    }
}

/// Whether the predicate is constant on a 14-point shell of radius eps.
fn stable(x: [f64; 3], lo: [f64; 3], hi: [f64; 3], eps: f64, f: &impl Fn([f64; 3]) -> bool) -> bool {
    let centre = f(x);
    let s = eps / 3f64.sqrt();
    let mut dirs: Vec<[f64; 3]> = Vec::new();
    for k in 0..3 {
        for sgn in [-1.0, 1.0] {
            let mut v = [0.0; 3];
            v[k] = sgn * eps;
            dirs.push(v);
        }
    }
    for a in [-s, s] {
        for b in [-s, s] {
            for cc in [-s, s] {
                dirs.push([a, b, cc]);
            }
        }
    }
    dirs.iter().all(|v| {
        let y = [0, 1, 2].map(|k| (x[k] + v[k]).clamp(lo[k], hi[k]));
        f(y) == centre
    })
}

/// Oracle verdict, with a longer run when the first one is undecided.
fn oracle(p: &qmarginal::feasibility::FeasibilityProblem) -> bool {
    let report = alternating_projection(p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    if report.is_feasible() || report.is_infeasible() {
        return report.is_feasible();
    }
    alternating_projection(p, DEFAULT_TOL, 20 * DEFAULT_MAX_ITER).unwrap().is_feasible()
}

#[test]
fn werner_predicate_matches_feasibility_oracle() {
    let mut r = rng(44);
    for d in [2, 3] {
        let f = |x: [f64; 3]| werner_triple_joinable(&wt(d, x[0], x[1], x[2]));
        let (mut checked, mut skipped) = (0, 0);
        for _ in 0..200 {
            let x = [r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0)];
            if !stable(x, [-1.0; 3], [1.0; 3], 1e-3, &f) {
                skipped += 1;
                continue;
            }
            assert_eq!(oracle(&werner_triple_problem(d, x)), f(x), "d={d} {x:?}");
            checked += 1;
        }
        assert!(checked > 180, "checked {checked}, skipped {skipped}");
    }
}

#[test]
fn iso_predicate_matches_feasibility_oracle() {
    let mut r = rng(45);
    for d in [2, 3] {
        let df = d as f64;
        let f = |x: [f64; 3]| iso_triple_joinable(&it(d, x[0], x[1], x[2]));
        let mut checked = 0;
        for _ in 0..60 {
            let x = [r.random_range(0.0..=df), r.random_range(0.0..=df), r.random_range(-1.0..=1.0)];
            if !stable(x, [0.0, 0.0, -1.0], [df, df, 1.0], 1e-3, &f) {
                continue;
            }
            assert_eq!(oracle(&iso_triple_problem(d, x[0], x[1], x[2])), f(x), "d={d} {x:?}");
            checked += 1;
        }
        assert!(checked > 50);
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

fn stable_2d(x: [f64; 2], lo: [f64; 2], hi: [f64; 2], eps: f64, f: &impl Fn([f64; 2]) -> bool) -> bool {
    let centre = f(x);
    (0..16).all(|k| {
        let a = std::f64::consts::PI * k as f64 / 8.0;
        let y = [(x[0] + eps * a.cos()).clamp(lo[0], hi[0]), (x[1] + eps * a.sin()).clamp(lo[1], hi[1])];
        f(y) == centre
    })
}

#[test]
fn pair_predicates_are_projections() {
    let mut r = rng(46);
    for d in [2, 3, 4] {
        let df = d as f64;
        let werner = |x: [f64; 2]| werner_pair_joinable(d, x[0], x[1]);
        let iso = |x: [f64; 2]| iso_pair_joinable(d, x[0], x[1]);
        let hybrid = |x: [f64; 2]| hybrid_pair_joinable(d, x[0], x[1]);
        for _ in 0..100 {
            let x = [r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0)];
            if stable_2d(x, [-1.0; 2], [1.0; 2], 5e-3, &werner) {
                let any = grid(-1.0, 1.0, 400).any(|bc| werner_triple_joinable(&wt(d, x[0], x[1], bc)));
                assert_eq!(werner(x), any, "werner d={d} {x:?}");
            }
            let x = [r.random_range(0.0..=df), r.random_range(0.0..=df)];
            if stable_2d(x, [0.0; 2], [df; 2], 5e-3, &iso) {
                let any = grid(-1.0, 1.0, 400).any(|bc| iso_triple_joinable(&it(d, x[0], x[1], bc)));
                assert_eq!(iso(x), any, "iso d={d} {x:?}");
            }
            let x = [r.random_range(0.0..=df), r.random_range(-1.0..=1.0)];
            if stable_2d(x, [0.0, -1.0], [df, 1.0], 5e-3, &hybrid) {
                let any = grid(0.0, df, 400).any(|ac| iso_triple_joinable(&it(d, x[0], ac, x[1])));
                assert_eq!(hybrid(x), any, "hybrid d={d} {x:?}");
            }
        }
    }
}

#[test]
fn hybrid_witness_is_joinable() {
    let mut r = rng(47);
    for d in [2, 3, 5] {
        let df = d as f64;
        for _ in 0..100 {
            let (ab, bc) = (r.random_range(0.0..=df), r.random_range(-1.0..=1.0));
            if let Some(ac) = hybrid_pair_witness(d, ab, bc) {
                assert!(iso_triple_joinable(&it(d, ab, ac, bc)));
            }
        }
    }
}

#[test]
fn weak_ckw_comparison() {
    // concurrence is a qubit measure; for d >= 3 the pair (-1, -1) is joinable
    let mut strict = 0;
    for a in grid(-1.0, 0.0, 101) {
        for b in grid(-1.0, 0.0, 101) {
            let ca = concurrence_werner(WernerParam::new(2, a).unwrap());
            let cb = concurrence_werner(WernerParam::new(2, b).unwrap());
            let ckw = weak_ckw_holds(ca, cb);
            if werner_pair_joinable(2, a, b) {
                assert!(ckw, "({a}, {b})");
            } else if ckw {
                strict += 1;
            }
        }
    }
    assert!(strict > 0);
    assert!(werner_pair_joinable(3, -1.0, -1.0));
}
