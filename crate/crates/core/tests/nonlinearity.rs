//! Closed forms checked against independent numerical oracles: central
//! differences, adaptive Simpson quadrature and bisection on sign changes.

use double_power::nonlinearity::{a_p, omega_p, Params};
use proptest::prelude::*;

const P_GRID: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 5.0];

fn omega_grid(p: f64) -> impl Iterator<Item = f64> {
    let wp = omega_p(p).unwrap();
    (1..=9).map(move |j| wp * j as f64 / 10.0)
}

fn central(g: impl Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    (g(u + h) - g(u - h)) / (2.0 * h)
}

fn simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(g, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson(g, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

fn quad(g: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fm, fb) = (g(a), g(0.5 * (a + b)), g(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&g, a, b, fa, fm, fb, whole, eps, 40)
}

/// Plain bisection on a sign change, independent of the library's root finder.
fn oracle_root(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = g(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn f_examples() {
    let pr = Params::planar(2.0, 3.0 / 16.0).unwrap();
    assert_eq!(pr.f(0.0).unwrap(), 0.0);
    // b = 1/4 and c = 3/4 solve t² − t + 3/16 = 0 with t = u.
    for u in [0.25_f64, 0.75] {
        assert!((u * u - u + 3.0 / 16.0).abs() < 1e-16);
        assert!(pr.f(u).unwrap().abs() < 1e-15);
    }
}

#[test]
fn potential_example_matches_quadrature() {
    let pr = Params::planar(2.0, 3.0 / 16.0).unwrap();
    let oracle = quad(|s| pr.f(s).unwrap(), 0.0, 0.5, 1e-14);
    assert!((oracle - 0.0026041666666666665).abs() < 1e-12, "{oracle}");
    assert!((pr.potential(0.5).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn potential_closed_form_matches_factored_and_quadrature() {
    for p in P_GRID {
        for w in omega_grid(p) {
            let pr = Params::planar(p, w).unwrap();
            let c = pr.critical_points().c.unwrap();
            let mut abs_f = 0.0;
            let mut prev = 0.0;
            for i in 1..=100 {
                let u = c * i as f64 / 101.0;
                let closed = pr.potential(u).unwrap();
                let factored = pr.potential_factored(u).unwrap();
                let scale = closed.abs().max(factored.abs()).max(1e-300);
                assert!((closed - factored).abs() / scale < 1e-12 || (closed - factored).abs() < 1e-17);

                let q = quad(|s| pr.f(s).unwrap(), 0.0, u, 1e-15);
                abs_f += quad(|s| pr.f(s).unwrap().abs(), prev, u, 1e-15);
                prev = u;
                assert!(
                    (closed - q).abs() <= 1e-9 * closed.abs().max(abs_f),
                    "p={p} w={w} u={u}: {closed} vs {q}"
                );
            }
        }
    }
}

#[test]
fn derivatives_match_central_differences() {
    for p in P_GRID {
        for w in omega_grid(p) {
            let pr = Params::planar(p, w).unwrap();
            let c = pr.critical_points().c.unwrap();
            for i in 1..=100 {
                let u = c * i as f64 / 101.0;
                let h = 1e-6 * u.max(1.0);
                let fd1 = central(|x| pr.f(x).unwrap(), u, h);
                let d1 = pr.df(u).unwrap();
                assert!((d1 - fd1).abs() / d1.abs().max(1.0) < 1e-6, "f' p={p} u={u}");
                let fd2 = central(|x| pr.df(x).unwrap(), u, h);
                let d2 = pr.d2f(u).unwrap();
                assert!((d2 - fd2).abs() / d2.abs().max(1.0) < 1e-6, "f'' p={p} u={u}");
            }
        }
    }
}

#[test]
fn df_at_alpha_examples() {
    let pr = Params::planar(2.0, 0.01).unwrap();
    let a = pr.alpha();
    let fd = central(|x| pr.f(x).unwrap(), a, 1e-6);
    assert!((pr.df(a).unwrap() - 0.323_333_333_333_333_3).abs() < 1e-12);
    assert!((fd - 0.323_333_333_333_333_3).abs() < 1e-6);
    for p in P_GRID {
        for w in omega_grid(p) {
            let pr = Params::planar(p, w).unwrap();
            let identity = -w + p * p / (4.0 * (2.0 * p - 1.0));
            let v = pr.df(pr.alpha()).unwrap();
            assert!((v - identity).abs() < 1e-12);
            assert!(v > 0.0);
        }
    }
}

#[test]
fn simple_zeros_of_f() {
    for p in P_GRID {
        for w in omega_grid(p) {
            let pr = Params::planar(p, w).unwrap();
            let cp = pr.critical_points();
            let (b, c) = (cp.b.unwrap(), cp.c.unwrap());
            let g = |x: f64| pr.f(x).unwrap();
            assert!(central(g, b, 1e-7 * b) > 0.0);
            assert!(central(g, c, 1e-7) < 0.0);
        }
    }
}

#[test]
fn critical_points_match_root_finding() {
    let pr = Params::planar(2.0, 3.0 / 16.0).unwrap();
    let cp = pr.critical_points();
    let f = |x: f64| pr.f(x).unwrap();
    let big_f = |x: f64| pr.potential(x).unwrap();
    let b = oracle_root(f, 0.1, 0.3);
    let c = oracle_root(f, 0.6, 0.9);
    let beta = oracle_root(big_f, b, c);
    assert!((cp.b.unwrap() - 0.25).abs() < 1e-15 && (b - 0.25).abs() < 1e-14);
    assert!((cp.c.unwrap() - 0.75).abs() < 1e-15 && (c - 0.75).abs() < 1e-14);
    // Root of F in (b, c): 0.4031435283193017...
    assert!((beta - 0.4031435283193017).abs() < 1e-13, "{beta}");
    assert!((cp.beta.unwrap() - beta).abs() < 1e-13);
    assert!((cp.alpha - 1.0 / 3.0).abs() < 1e-15);
    for w in [0.01, 0.1, 0.2] {
        let cp = Params::planar(2.0, w).unwrap().critical_points();
        assert!((cp.alpha - 1.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn critical_point_residuals_and_ordering() {
    for p in P_GRID {
        for w in omega_grid(p) {
            let pr = Params::planar(p, w).unwrap();
            let cp = pr.critical_points();
            assert!(cp.residuals(&pr).max() < 1e-10, "p={p} w={w} {:?}", cp.residuals(&pr));
            let (b, c, beta) = (cp.b.unwrap(), cp.c.unwrap(), cp.beta.unwrap());
            assert!(b < beta && beta < c, "p={p} w={w}");
            assert!(pr.f(beta).unwrap() > 0.0);
            for v in [cp.omega_p, cp.a_p, cp.alpha, b, c, beta] {
                assert!(v.is_finite() && v > 0.0);
            }
        }
    }
}

#[test]
fn zero_count_across_grid() {
    for p in P_GRID {
        for w in omega_grid(p) {
            assert_eq!(Params::planar(p, w).unwrap().potential_zero_count(), 2, "p={p} w={w}");
        }
        let wp = omega_p(p).unwrap();
        for w in [1.01 * wp, 0.5 * (wp + 0.25), 0.3] {
            assert_eq!(Params::planar(p, w).unwrap().potential_zero_count(), 0, "p={p} w={w}");
        }
    }
}

proptest! {
    #[test]
    fn threshold_ordering(p in 1.001f64..50.0) {
        let (a, w) = (a_p(p).unwrap(), omega_p(p).unwrap());
        prop_assert!(0.0 < a && a < w && w < 0.25);
    }

    #[test]
    fn ordering_and_residuals(p in 1.05f64..8.0, frac in 0.001f64..0.999) {
        let pr = Params::planar(p, frac * omega_p(p).unwrap()).unwrap();
        let cp = pr.critical_points();
        let (b, c, beta) = (cp.b.unwrap(), cp.c.unwrap(), cp.beta.unwrap());
        prop_assert!(b < beta && beta < c);
        prop_assert!(pr.f(beta).unwrap() > 0.0);
        prop_assert!(cp.residuals(&pr).max() < 1e-10);
    }
}
