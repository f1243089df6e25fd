//! Largest Lyapunov exponent by tangent-vector propagation.
//!
//! `T` is holomorphic away from its singular set, so tangent vectors are
//! carried as complex 2-vectors; the Euclidean norm over the four real
//! components gives the largest exponent of the real 4x4 embedding.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat2;
use crate::map::{iterate, planar_jacobian, MapError, OrbitOutcome, OrbitState, Params, ToleranceConfig};
use crate::scalar::{lit, modulus, to_f64, Scalar};

/// Default number of accumulated steps.
pub const DEFAULT_STEPS: usize = 50_000;
/// Default chaos threshold on `lambda_max`.
pub const CHAOS_THRESHOLD: f64 = 0.01;
/// Maximum number of entries kept in the running series.
const SERIES_LEN: usize = 1000;
const NORM_FLOOR: f64 = 1e-150;
const NORM_CEIL: f64 = 1e150;
/// Cauchy-Riemann agreement required of the finite-difference Jacobian.
pub const CAUCHY_RIEMANN_TOL: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("orbit died at step {step} ({reason})")]
    OrbitDied { step: u64, reason: String },
    #[error("tangent norm left [1e-150, 1e150] at step {step}")]
    NonFinite { step: u64 },
    #[error("estimate failed its drift test; cannot classify")]
    NotConverged,
    #[error("n_steps must be >= {min}, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("Cauchy-Riemann mismatch {residual:e} between real and imaginary directional derivatives")]
    CauchyRiemann { residual: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate<T> {
    /// Nats per iteration.
    pub lambda_max: T,
    pub iterations: usize,
    pub transient_discarded: usize,
    /// Running averages, one per decimation block; the last equals `lambda_max`.
    pub running_series: Vec<T>,
    /// Spread of the last quartile of `running_series` stayed below
    /// `0.05 max(1, |lambda_max|)`.
    pub converged: bool,
    pub orbit_outcome: OrbitOutcome<T>,
    /// Smallest and largest tangent norm seen before renormalization.
    pub norm_range: [T; 2],
}

/// Estimate with the default tangent direction `(1, 1) / sqrt(2)`.
pub fn lyapunov_max<T: Scalar>(
    params: &Params<T>,
    initial: OrbitState<T>,
    cfg: &ToleranceConfig,
    n_steps: usize,
) -> Result<LyapunovEstimate<T>, LyapunovError> {
    let h = T::FRAC_1_SQRT_2();
    let w0 = [Complex::new(h, T::zero()), Complex::new(h, T::zero())];
    lyapunov_max_from(params, initial, cfg, n_steps, w0)
}

/// Estimate starting from tangent vector `w0` (any nonzero vector).
pub fn lyapunov_max_from<T: Scalar>(
    params: &Params<T>,
    initial: OrbitState<T>,
    cfg: &ToleranceConfig,
    n_steps: usize,
    w0: [Complex<T>; 2],
) -> Result<LyapunovEstimate<T>, LyapunovError> {
    if n_steps < 1000 {
        return Err(LyapunovError::TooFewSteps {
            min: 1000,
            got: n_steps,
        });
    }
    let eps = lit::<T>(cfg.eps_singular);
    let radius = lit::<T>(cfg.radius_unbounded);
    let floor = lit::<T>(NORM_FLOOR);
    let ceil = lit::<T>(NORM_CEIL);
    let transient = cfg.transient_discard;
    let total = transient + n_steps;
    let block = n_steps.div_ceil(SERIES_LEN).max(1);

    let mut w = w0;
    let n0 = tangent_norm(w);
    if !(n0 > T::zero() && n0.is_finite()) {
        return Err(LyapunovError::NonFinite { step: 0 });
    }
    w = [w[0] / n0, w[1] / n0];

    let (mut u, mut v) = (initial.z_prev, initial.z_curr);
    let mut sum = T::zero();
    let mut series = Vec::with_capacity(SERIES_LEN + 1);
    let mut norm_range = [T::infinity(), T::zero()];

    for k in 0..total {
        let jac = planar_jacobian(params, u, v, eps).map_err(|_| LyapunovError::OrbitDied {
            step: k as u64,
            reason: "singular denominator".into(),
        })?;
        w = jac.apply(w);
        let norm = tangent_norm(w);
        if !(norm >= floor && norm <= ceil) {
            return Err(LyapunovError::NonFinite { step: k as u64 });
        }
        norm_range = [norm_range[0].min(norm), norm_range[1].max(norm)];
        w = [w[0] / norm, w[1] / norm];

        let next = (params.alpha + u) / params.denominator(u, v);
        if !(modulus(next) <= radius) {
            return Err(LyapunovError::OrbitDied {
                step: (k + 1) as u64,
                reason: "escaped the unbounded radius".into(),
            });
        }
        u = v;
        v = next;

        if k >= transient {
            sum = sum + norm.ln();
            let done = k + 1 - transient;
            if done % block == 0 || done == n_steps {
                series.push(sum / lit(done as f64));
            }
        }
    }

    let lambda_max = sum / lit(n_steps as f64);
    if series.last() != Some(&lambda_max) {
        series.push(lambda_max);
    }
    let converged = drift_ok(&series, lambda_max);
    let orbit_cfg = cfg.with_max_iters(total);
    let orbit_outcome = iterate(params, initial, &orbit_cfg).outcome;

    Ok(LyapunovEstimate {
        lambda_max,
        iterations: n_steps,
        transient_discarded: transient,
        running_series: series,
        converged,
        orbit_outcome,
        norm_range,
    })
}

fn tangent_norm<T: Scalar>(w: [Complex<T>; 2]) -> T {
    modulus(w[0]).hypot(modulus(w[1]))
}

fn drift_ok<T: Scalar>(series: &[T], lambda_max: T) -> bool {
    if series.len() < 4 {
        return false;
    }
    let quartile = &series[series.len() - series.len() / 4..];
    let (lo, hi) = quartile
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo < lit::<T>(0.05) * lambda_max.abs().max(T::one())
}

/// Finite-difference Jacobian of `T` with its Cauchy-Riemann residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdJacobian<T> {
    pub matrix: Mat2<T>,
    /// Max-entry relative gap between real-axis and imaginary-axis derivatives.
    pub cauchy_riemann_residual: T,
}

/// Central differences of `T` at `state` along the real axis of each
/// variable, cross-checked against the imaginary-axis derivative.
pub fn jacobian_fd<T: Scalar>(
    params: &Params<T>,
    state: &OrbitState<T>,
    step: T,
) -> Result<FdJacobian<T>, LyapunovError> {
    let (u, v) = (state.z_prev, state.z_curr);
    let den = modulus(params.denominator(u, v));
    let ten = lit::<T>(10.0);
    if !(den > ten * step) {
        return Err(MapError::Singular {
            step: state.n,
            denominator: to_f64(den),
        }
        .into());
    }
    let f = |u: Complex<T>, v: Complex<T>| params.eval(u, v);
    let two_h = step + step;
    let hr = Complex::new(step, T::zero());
    let hi = Complex::new(T::zero(), step);
    let i2h = Complex::new(T::zero(), two_h);
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());

    let real = Mat2::new(
        zero,
        one,
        (f(u + hr, v) - f(u - hr, v)) / two_h,
        (f(u, v + hr) - f(u, v - hr)) / two_h,
    );
    // the top row is the identity map's derivative, exact in both directions
    let imag = Mat2::new(
        zero,
        one,
        (f(u + hi, v) - f(u - hi, v)) / i2h,
        (f(u, v + hi) - f(u, v - hi)) / i2h,
    );
    let residual = imag.rel_error(&real);
    if !(residual < lit(CAUCHY_RIEMANN_TOL)) {
        return Err(LyapunovError::CauchyRiemann {
            residual: to_f64(residual),
        });
    }
    Ok(FdJacobian {
        matrix: real,
        cauchy_riemann_residual: residual,
    })
}

/// Chaotic when the exponent exceeds `threshold` on a bounded orbit that
/// neither converged nor settled on a cycle.
pub fn classify_chaotic<T: Scalar>(estimate: &LyapunovEstimate<T>, threshold: T) -> Result<bool, LyapunovError> {
    if !estimate.converged {
        return Err(LyapunovError::NotConverged);
    }
    Ok(estimate.lambda_max > threshold && matches!(estimate.orbit_outcome, OrbitOutcome::Undecided))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn estimate(lambda: f64, outcome: OrbitOutcome<f64>, converged: bool) -> LyapunovEstimate<f64> {
        LyapunovEstimate {
            lambda_max: lambda,
            iterations: 1000,
            transient_discarded: 0,
            running_series: vec![lambda],
            converged,
            orbit_outcome: outcome,
            norm_range: [1.0, 1.0],
        }
    }

    #[test]
    fn chaotic_classification_rules() {
        assert!(classify_chaotic(&estimate(1.32, OrbitOutcome::Undecided, true), 0.01).unwrap());
        assert!(!classify_chaotic(&estimate(-0.4, OrbitOutcome::Undecided, true), 0.01).unwrap());
        let conv = OrbitOutcome::ConvergedTo { limit: c(1.0, 0.0) };
        assert!(!classify_chaotic(&estimate(0.5, conv, true), 0.01).unwrap());
        assert_eq!(
            classify_chaotic(&estimate(0.5, OrbitOutcome::Undecided, false), 0.01),
            Err(LyapunovError::NotConverged)
        );
    }

    #[test]
    fn negative_near_attracting_equilibrium() {
        // a = 2, b = 0: z = 2 is attracting with eigenvalue modulus 1/sqrt(2)
        let params = Params::new(c(2.0, 0.0), c(0.0, 0.0));
        let est = lyapunov_max(
            &params,
            OrbitState::new(c(2.01, 0.0), c(1.99, 0.0)),
            &ToleranceConfig::default(),
            5000,
        )
        .unwrap();
        assert!(est.lambda_max < 0.0);
        assert!((est.lambda_max - 0.5f64.sqrt().ln()).abs() < 0.05, "{}", est.lambda_max);
        assert_eq!(est.running_series.last(), Some(&est.lambda_max));
    }

    #[test]
    fn too_few_steps() {
        let params = Params::new(c(2.0, 0.0), c(0.0, 0.0));
        let err = lyapunov_max(&params, OrbitState::new(c(1.0, 0.0), c(1.0, 0.0)), &ToleranceConfig::default(), 10);
        assert!(matches!(err, Err(LyapunovError::TooFewSteps { .. })));
    }

    #[test]
    fn singular_start_is_reported() {
        let params = Params::new(c(1.0, 0.0), c(2.0, 0.0));
        let err = lyapunov_max(&params, OrbitState::new(c(2.0, 0.0), c(-1.0, 0.0)), &ToleranceConfig::default(), 1000)
            .unwrap_err();
        assert!(matches!(err, LyapunovError::OrbitDied { step: 0, .. }));
    }

    #[test]
    fn fd_top_row_is_exact() {
        let params = Params::new(c(0.4, -0.2), c(1.3, 0.8));
        let fd = jacobian_fd(&params, &OrbitState::new(c(0.3, 0.4), c(-0.6, 0.2)), 1e-6).unwrap();
        assert_eq!(fd.matrix.m[0], [c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(fd.cauchy_riemann_residual < 1e-5);
    }

    #[test]
    fn fd_refuses_near_singular_set() {
        let params = Params::new(c(1.0, 0.0), c(2.0, 0.0));
        let err = jacobian_fd(&params, &OrbitState::new(c(2.0, 0.0), c(-1.0 + 1e-7, 0.0)), 1e-6).unwrap_err();
        assert!(matches!(err, LyapunovError::Map(MapError::Singular { .. })));
    }
}
