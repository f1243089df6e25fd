use num_complex::{Complex32, Complex64 as C};
use proptest::prelude::*;

use ratdyn::fixtures::period_two_rows;
use ratdyn::lyapunov::lyapunov_max;
use ratdyn::period_two::{classify_two_cycle, t2_jacobian, verify_cycle_dynamically};
use ratdyn::scan::{basin_raster, condition_check, SlicePolicy};
use ratdyn::{
    equilibria, iterate, two_cycle, Branch, GridTarget, OrbitOutcome, OrbitState, OrbitState32, Params, Params32,
    ScanGrid, StabilityClass, ToleranceConfig,
};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn single_precision_pipeline() {
    let p: Params32 = Params::new(Complex32::new(2.0, 0.0), Complex32::new(0.0, 0.0));
    let eqs = equilibria(&p).unwrap();
    assert!((eqs.plus.value - Complex32::new(2.0, 0.0)).norm() < 1e-6);
    let orbit = iterate(&p, OrbitState32::new(Complex32::new(1.5, 0.1), Complex32::new(2.5, -0.1)), &ToleranceConfig {
        eps_converge: 1e-5,
        ..Default::default()
    });
    match orbit.outcome {
        OrbitOutcome::ConvergedTo { limit } => assert!((limit - Complex32::new(2.0, 0.0)).norm() < 1e-4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn published_cycles_reproduce_and_verify() {
    let cfg = ToleranceConfig::default();
    for row in period_two_rows() {
        let cycle = two_cycle(&row.params).unwrap();
        assert!((cycle.phi - row.phi).norm() < 1e-3, "row {}", row.row);
        assert!((cycle.psi - row.psi).norm() < 1e-3, "row {}", row.row);
        let v = verify_cycle_dynamically(&row.params, &cycle, &cfg, row.row as u64);
        assert!(v.passed, "row {}: {v:?}", row.row);
        let s = classify_two_cycle(&row.params, &cycle).unwrap();
        assert_eq!(s.verdict, StabilityClass::LocallyAsymptoticallyStable);
    }
}

#[test]
fn exponent_at_stable_equilibrium_matches_eigenvalue() {
    for (a, b) in [(c(2.0, 0.0), c(0.0, 0.0)), (c(0.3, 0.4), c(0.2, -0.1)), (c(1.0, 1.0), c(0.5, 0.5))] {
        let p = Params::new(a, b);
        let eqs = equilibria(&p).unwrap();
        let stable = [Branch::Minus, Branch::Plus]
            .into_iter()
            .map(|br| eqs.get(br))
            .find(|r| r.stability() == StabilityClass::LocallyAsymptoticallyStable)
            .expect("a stable equilibrium");
        let lin = stable.linearization.as_ref().unwrap();
        let expected = lin.root_moduli[0].max(lin.root_moduli[1]).ln();
        let z = stable.value;
        let est = lyapunov_max(&p, OrbitState::new(z + c(1e-3, 0.0), z - c(0.0, 1e-3)), &ToleranceConfig::default(), 20_000)
            .unwrap();
        assert!((est.lambda_max - expected).abs() < 0.05, "a={a} b={b}: {} vs {expected}", est.lambda_max);
    }
}

#[test]
fn exponent_on_stable_cycle_matches_half_log_eigenvalue() {
    let row = period_two_rows()[0];
    let cycle = two_cycle(&row.params).unwrap();
    let eig = t2_jacobian(&row.params, &cycle).unwrap().eigenvalues();
    let expected = 0.5 * eig[0].norm().max(eig[1].norm()).ln();
    let est = lyapunov_max(
        &row.params,
        OrbitState::new(cycle.phi + c(1e-3, 0.0), cycle.psi),
        &ToleranceConfig::default(),
        20_000,
    )
    .unwrap();
    assert!((est.lambda_max - expected).abs() < 0.05, "{} vs {expected}", est.lambda_max);
}

#[test]
fn exponent_does_not_depend_on_tangent_direction() {
    let p = Params::new(c(0.096455, 0.13197), c(0.94205, 0.95613));
    let init = OrbitState::new(c(0.1, -0.2), c(0.3, 0.05));
    let cfg = ToleranceConfig::default();
    let a = ratdyn::lyapunov::lyapunov_max_from(&p, init, &cfg, 50_000, [c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let b = ratdyn::lyapunov::lyapunov_max_from(&p, init, &cfg, 50_000, [c(0.0, 0.3), c(-0.7, 0.2)]).unwrap();
    assert!((a.lambda_max - b.lambda_max).abs() < 0.02);
}

#[test]
fn converging_parameters_split_between_two_stable_equilibria() {
    let p = Params::new(
        c(0.530797553008973, 0.779167230102011),
        c(4.670053421145915, 1.299062084737301),
    );
    let eqs = equilibria(&p).unwrap();
    assert_eq!(eqs.minus.stability(), StabilityClass::LocallyAsymptoticallyStable);
    assert_eq!(eqs.plus.stability(), StabilityClass::LocallyAsymptoticallyStable);

    let grid = ScanGrid::new(c(0.0, 0.0), 1.0, 9, GridTarget::InitialConditions);
    let raster = basin_raster(&p, &grid, &ToleranceConfig::default(), SlicePolicy::Diagonal, c(0.0, 0.0)).unwrap();
    let counts = raster.label_counts();
    assert!(counts.keys().all(|k| ["equilibrium-1", "equilibrium-2", "singular"].contains(k)), "{counts:?}");
    assert!(counts["equilibrium-2"] > counts["equilibrium-1"]);
    // (0, 0) on the diagonal has a zero denominator
    assert_eq!(counts["singular"], 1);
    assert_eq!(raster.labels[4][4].name(), "singular");

    let chk = condition_check(&p);
    assert!((chk.values[0] - 4.412249115813187).abs() < 1e-9);
    assert!((chk.values[1] - 4.847366424808288).abs() < 1e-9);
    assert!(chk.beta_gt);
}

#[test]
fn raster_is_independent_of_thread_count() {
    let p = Params::new(c(0.096455, 0.13197), c(0.94205, 0.95613));
    let grid = ScanGrid::new(c(0.0, 0.0), 1.5, 12, GridTarget::InitialConditions);
    let cfg = ToleranceConfig::default().with_max_iters(4000);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| basin_raster(&p, &grid, &cfg, SlicePolicy::Diagonal, c(0.0, 0.0)).unwrap())
    };
    let serial = run(1);
    assert_eq!(serial, run(3));
    assert_eq!(serial, run(8));
}

proptest! {
    #[test]
    fn iteration_replays_exactly(ar in -2.0..2.0f64, ai in -2.0..2.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64,
                                 u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let p = Params::new(c(ar, ai), c(br, bi));
        let cfg = ToleranceConfig::default().with_max_iters(2000);
        let init = OrbitState::new(c(u, v), c(v, -u));
        let a = iterate(&p, init, &cfg);
        let b = iterate(&p, init, &cfg);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.points.len() as u64, a.iterations_used);
        prop_assert!(a.points.len() <= cfg.max_iters);
    }

    #[test]
    fn orbit_prefix_is_stable_under_longer_runs(ar in -2.0..2.0f64, ai in -2.0..2.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64) {
        let p = Params::new(c(ar, ai), c(br, bi));
        let init = OrbitState::new(c(0.1, 0.2), c(-0.3, 0.1));
        let short = iterate(&p, init, &ToleranceConfig::default().with_max_iters(1500));
        let long = iterate(&p, init, &ToleranceConfig::default().with_max_iters(3000));
        let n = short.points.len().min(long.points.len());
        prop_assert_eq!(&short.points[..n], &long.points[..n]);
    }
}
