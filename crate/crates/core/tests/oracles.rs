//! Analytic derivatives, roots and residuals checked against independent
//! implementations written here from the recurrence alone.

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratdyn::equilibria::{classify_by_lemma, classify_roots, CharQuadratic, StabilityClass};
use ratdyn::period_two::t2_jacobian;
use ratdyn::{equilibria, planar_jacobian, two_cycle, Mat2, Params};

fn f(a: C, b: C, u: C, v: C) -> C {
    (a + u) / (b * v + u)
}

/// Complex-step-free central differences of T along the real axis.
fn fd_jt(a: C, b: C, u: C, v: C, h: f64) -> [[C; 2]; 2] {
    let du = (f(a, b, u + h, v) - f(a, b, u - h, v)) / (2.0 * h);
    let dv = (f(a, b, u, v + h) - f(a, b, u, v - h)) / (2.0 * h);
    [[C::new(0.0, 0.0), C::new(1.0, 0.0)], [du, dv]]
}

fn t2(a: C, b: C, u: C, v: C) -> (C, C) {
    let w = f(a, b, u, v);
    (w, f(a, b, v, w))
}

fn fd_jt2(a: C, b: C, u: C, v: C, h: f64) -> [[C; 2]; 2] {
    let (pu, mu) = (t2(a, b, u + h, v), t2(a, b, u - h, v));
    let (pv, mv) = (t2(a, b, u, v + h), t2(a, b, u, v - h));
    [
        [(pu.0 - mu.0) / (2.0 * h), (pv.0 - mv.0) / (2.0 * h)],
        [(pu.1 - mu.1) / (2.0 * h), (pv.1 - mv.1) / (2.0 * h)],
    ]
}

fn rel_err(a: &Mat2<f64>, b: &[[C; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a.m[i][j] - b[i][j]).norm());
            scale = scale.max(b[i][j].norm());
        }
    }
    worst / scale
}

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> C {
    C::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

#[test]
fn jacobian_of_t_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut checked = 0;
    while checked < 100 {
        let (a, b, u, v) = (rand_c(&mut rng, 2.0), rand_c(&mut rng, 2.0), rand_c(&mut rng, 2.0), rand_c(&mut rng, 2.0));
        if (b * v + u).norm() < 0.2 {
            continue;
        }
        let p = Params::new(a, b);
        let jac = planar_jacobian(&p, u, v, 1e-12).unwrap();
        let err = rel_err(&jac, &fd_jt(a, b, u, v, 1e-6));
        assert!(err < 1e-6, "rel err {err:e} at a={a} b={b} u={u} v={v}");
        checked += 1;
    }
}

#[test]
fn jacobian_of_t2_at_cycles_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0;
    while checked < 100 {
        let (a, b) = (rand_c(&mut rng, 2.0), rand_c(&mut rng, 3.0));
        let p = Params::new(a, b);
        let Ok(cycle) = two_cycle(&p) else { continue };
        let (u, v) = (cycle.phi, cycle.psi);
        if (b * v + u).norm() < 0.2 || (b * u + v).norm() < 0.2 {
            continue;
        }
        let jac = t2_jacobian(&p, &cycle).unwrap();
        let err = rel_err(&jac, &fd_jt2(a, b, u, v, 1e-6));
        assert!(err < 1e-6, "rel err {err:e} at a={a} b={b}");
        checked += 1;
    }
}

#[test]
fn equilibria_are_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..1000 {
        let (a, b) = (rand_c(&mut rng, 5.0), rand_c(&mut rng, 5.0));
        let eqs = equilibria(&Params::new(a, b)).unwrap();
        for rep in [&eqs.minus, &eqs.plus] {
            if rep.spurious {
                continue;
            }
            let z = rep.value;
            let residual = (f(a, b, z, z) - z).norm();
            assert!(residual < 1e-10, "residual {residual:e} for a={a} b={b}");
        }
    }
}

#[test]
fn two_cycles_satisfy_vieta_and_map_onto_each_other() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..1000 {
        let (a, b) = (rand_c(&mut rng, 3.0), rand_c(&mut rng, 3.0));
        let Ok(c) = two_cycle(&Params::new(a, b)) else { continue };
        let prod = a / (b - 1.0);
        assert!((c.phi + c.psi - 1.0).norm() < 1e-10);
        assert!((c.phi * c.psi - prod).norm() < 1e-10 * (1.0 + prod.norm()));
        if (b * c.psi + c.phi).norm() > 1e-3 {
            assert!((f(a, b, c.phi, c.psi) - c.phi).norm() < 1e-8 * (1.0 + c.phi.norm()));
        }
    }
}

proptest! {
    // For real r and s < 1, |1 - s| = 1 - s and the lemma is the classical
    // Schur-Cohn test |r| < 1 - s < 2.
    #[test]
    fn lemma_agrees_with_roots_for_real_coefficients(r in -3.0..3.0f64, s in -3.0..1.0f64) {
        let q = CharQuadratic::from_normal_form(C::new(r, 0.0), C::new(s, 0.0));
        let lemma = classify_by_lemma(&q);
        let (roots, moduli) = classify_roots(&q);
        let clear = moduli.iter().all(|m| (m - 1.0).abs() > 1e-6);
        if clear && lemma == StabilityClass::LocallyAsymptoticallyStable {
            prop_assert_eq!(roots, StabilityClass::LocallyAsymptoticallyStable);
        }
    }

    #[test]
    fn roots_solve_the_normal_form(rr in -3.0..3.0f64, ri in -3.0..3.0f64, sr in -3.0..3.0f64, si in -3.0..3.0f64) {
        let (r, s) = (C::new(rr, ri), C::new(sr, si));
        let q = CharQuadratic::from_normal_form(r, s);
        for x in q.roots() {
            prop_assert!((x * x - r * x - s).norm() < 1e-10 * (1.0 + x.norm() * x.norm()));
        }
    }
}
