//! Prime period-two solutions `..., phi, psi, phi, psi, ...` and their
//! stability as fixed points of the second iterate `T^2`.
//!
//! A two-cycle satisfies `phi = (a + phi) / (b psi + phi)` and the mirrored
//! equation; eliminating gives `t^2 - t + a / (b - 1) = 0` for `t` in
//! `{phi, psi}`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::{classify_moduli, StabilityClass};
use crate::linalg::{quadratic_roots, Mat2};
use crate::map::{iterate, planar_jacobian, planar_map, MapError, OrbitOutcome, OrbitState, Params, ToleranceConfig};
use crate::sampling::unit_direction4;
use crate::scalar::{lit, modulus, principal_sqrt, Scalar};

/// Discriminant magnitude below which the two roots are considered equal.
pub const DOUBLE_ROOT_EPS: f64 = 1e-12;
/// Step for the central-difference oracle of `J_{T^2}`.
pub const FD_STEP: f64 = 1e-6;
/// Size of the perturbation used by [`verify_cycle_dynamically`].
pub const PERTURBATION: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodTwoError {
    #[error("b = 1 leaves a / (b - 1) undefined")]
    Degenerate,
    #[error("double root t = 1/2 (|discriminant| = {discriminant:e}); no prime period-two cycle")]
    NoDistinctCycle { discriminant: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoCycle<T> {
    /// Root with the smaller real part (ties: smaller imaginary part).
    pub phi: Complex<T>,
    pub psi: Complex<T>,
    /// Disagreement between the quadratic's roots and the explicit
    /// `0.5 -/+ 0.5 sqrt(a (4 - 4b) + (1 - b)^2) / (b - 1)` pair.
    pub closed_form_discrepancy: T,
}

impl<T: Scalar> TwoCycle<T> {
    /// Largest relative Vieta residual: `phi + psi = 1`, `phi psi = a / (b - 1)`.
    pub fn vieta_residual(&self, params: &Params<T>) -> T {
        let one = Complex::new(T::one(), T::zero());
        let product = params.alpha / (params.beta - one);
        let sum_err = modulus(self.phi + self.psi - one);
        let prod_err = modulus(self.phi * self.psi - product) / modulus(product).max(T::one());
        sum_err.max(prod_err)
    }

    /// Some denominator `b psi + phi` or `b phi + psi` vanishes.
    pub fn is_spurious(&self, params: &Params<T>, eps_singular: T) -> bool {
        modulus(params.denominator(self.phi, self.psi)) < eps_singular
            || modulus(params.denominator(self.psi, self.phi)) < eps_singular
    }

    pub fn pair(&self) -> (Complex<T>, Complex<T>) {
        (self.phi, self.psi)
    }
}

/// The two roots of `t^2 - t + a / (b - 1)`.
pub fn two_cycle<T: Scalar>(params: &Params<T>) -> Result<TwoCycle<T>, PeriodTwoError> {
    let one = Complex::new(T::one(), T::zero());
    let (a, b) = (params.alpha, params.beta);
    let b_minus_one = b - one;
    if modulus(b_minus_one) < lit(DOUBLE_ROOT_EPS) {
        return Err(PeriodTwoError::Degenerate);
    }
    let k = a / b_minus_one;
    let disc = one - k * lit::<T>(4.0);
    if modulus(disc) < lit(DOUBLE_ROOT_EPS) {
        return Err(PeriodTwoError::NoDistinctCycle {
            discriminant: crate::scalar::to_f64(modulus(disc)),
        });
    }
    let [x, y] = quadratic_roots(one, -one, k).expect("monic");
    let (phi, psi) = order_pair(x, y);

    let half = lit::<T>(0.5);
    let four = lit::<T>(4.0);
    let sq = principal_sqrt(a * (one * four - b * four) + (one - b) * (one - b));
    let (cphi, cpsi) = order_pair(one * half - sq * half / b_minus_one, one * half + sq * half / b_minus_one);
    let scale = modulus(phi).max(modulus(psi)).max(T::one());
    let closed_form_discrepancy = modulus(cphi - phi).max(modulus(cpsi - psi)) / scale;

    Ok(TwoCycle {
        phi,
        psi,
        closed_form_discrepancy,
    })
}

fn order_pair<T: Scalar>(x: Complex<T>, y: Complex<T>) -> (Complex<T>, Complex<T>) {
    if (x.re, x.im) <= (y.re, y.im) {
        (x, y)
    } else {
        (y, x)
    }
}

/// Second iterate `T^2(u, v)`.
pub fn second_iterate<T: Scalar>(
    params: &Params<T>,
    u: Complex<T>,
    v: Complex<T>,
    eps_singular: T,
) -> Result<(Complex<T>, Complex<T>), MapError> {
    let (u1, v1) = planar_map(params, u, v, eps_singular)?;
    planar_map(params, u1, v1, eps_singular)
}

/// Chain rule `J_T(psi, phi) * J_T(phi, psi)`, using `T(phi, psi) = (psi, phi)`.
pub fn t2_jacobian<T: Scalar>(params: &Params<T>, cycle: &TwoCycle<T>) -> Result<Mat2<T>, MapError> {
    let eps = lit::<T>(ToleranceConfig::default().eps_singular);
    let first = planar_jacobian(params, cycle.phi, cycle.psi, eps)?;
    let second = planar_jacobian(params, cycle.psi, cycle.phi, eps)?;
    Ok(second * first)
}

/// Central differences of `T^2` along the real axis of each variable.
pub fn t2_jacobian_fd<T: Scalar>(
    params: &Params<T>,
    u: Complex<T>,
    v: Complex<T>,
    h: T,
) -> Result<Mat2<T>, MapError> {
    let eps = lit::<T>(ToleranceConfig::default().eps_singular);
    let dh = Complex::new(h, T::zero());
    let two_h = h + h;
    let (pu, pv) = second_iterate(params, u + dh, v, eps)?;
    let (mu, mv) = second_iterate(params, u - dh, v, eps)?;
    let (qu, qv) = second_iterate(params, u, v + dh, eps)?;
    let (nu, nv) = second_iterate(params, u, v - dh, eps)?;
    Ok(Mat2::new(
        (pu - mu) / two_h,
        (qu - nu) / two_h,
        (pv - mv) / two_h,
        (qv - nv) / two_h,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoCycleStability<T> {
    pub jacobian: Mat2<T>,
    /// Trace of `J_{T^2}`.
    pub chi: Complex<T>,
    /// Determinant of `J_{T^2}`.
    pub det: Complex<T>,
    pub chi_abs: T,
    pub det_abs: T,
    /// `|chi| < 1 + |det| < 2`
    pub criterion_holds: bool,
    /// The criterion held but the eigenvalues say otherwise.
    pub criterion_contradicted: bool,
    pub verdict: StabilityClass,
    /// Larger first.
    pub eigen_moduli: [T; 2],
    /// Max-entry relative error of the chain-rule Jacobian against central
    /// differences.
    pub fd_rel_error: T,
}

/// Classifies the cycle with the trace/determinant test, falling back to (and
/// always checked against) the eigenvalue moduli of `J_{T^2}`.
pub fn classify_two_cycle<T: Scalar>(
    params: &Params<T>,
    cycle: &TwoCycle<T>,
) -> Result<TwoCycleStability<T>, MapError> {
    let jacobian = t2_jacobian(params, cycle)?;
    let fd = t2_jacobian_fd(params, cycle.phi, cycle.psi, lit(FD_STEP))?;
    let mut stability = classify_matrix(jacobian);
    stability.fd_rel_error = fd.rel_error(&jacobian);
    Ok(stability)
}

/// Classification of an arbitrary `J_{T^2}`-like matrix.
pub fn classify_matrix<T: Scalar>(jacobian: Mat2<T>) -> TwoCycleStability<T> {
    let chi = jacobian.trace();
    let det = jacobian.det();
    let (chi_abs, det_abs) = (modulus(chi), modulus(det));
    let one_plus = T::one() + det_abs;
    let criterion_holds = chi_abs < one_plus && one_plus < lit(2.0);
    let [e0, e1] = jacobian.eigenvalues();
    let eigen_moduli = [modulus(e0), modulus(e1)];
    let eigen_class = classify_moduli(eigen_moduli);
    let stable = StabilityClass::LocallyAsymptoticallyStable;
    let criterion_contradicted = criterion_holds && eigen_class != stable;
    TwoCycleStability {
        jacobian,
        chi,
        det,
        chi_abs,
        det_abs,
        criterion_holds,
        criterion_contradicted,
        verdict: eigen_class,
        eigen_moduli,
        fd_rel_error: T::zero(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleVerification {
    /// Starting on the cycle yields a period-two outcome matching it.
    pub on_cycle: bool,
    pub on_cycle_outcome: String,
    /// Only attempted when the cycle is classified stable.
    pub perturbed_return: Option<bool>,
    pub perturbed_outcome: Option<String>,
    pub passed: bool,
}

/// Runs the orbit from `(phi, psi)` and, for stable cycles, from a start
/// displaced by [`PERTURBATION`] in a seeded random direction of `C^2`.
pub fn verify_cycle_dynamically<T: Scalar>(
    params: &Params<T>,
    cycle: &TwoCycle<T>,
    cfg: &ToleranceConfig,
    seed: u64,
) -> CycleVerification {
    let eps = lit::<T>(cfg.eps_cycle);
    let matches_cycle = |outcome: &OrbitOutcome<T>| match outcome {
        OrbitOutcome::PeriodicCycle { period: 2, cycle: pts } => {
            let (p, q) = (pts[0], pts[1]);
            (modulus(p - cycle.phi) < eps && modulus(q - cycle.psi) < eps)
                || (modulus(p - cycle.psi) < eps && modulus(q - cycle.phi) < eps)
        }
        _ => false,
    };

    let orbit = iterate(params, OrbitState::new(cycle.phi, cycle.psi), cfg);
    let on_cycle = matches_cycle(&orbit.outcome);
    let on_cycle_outcome = orbit.outcome.name().to_string();

    let stable = classify_two_cycle(params, cycle)
        .map(|s| s.verdict == StabilityClass::LocallyAsymptoticallyStable)
        .unwrap_or(false);

    let (perturbed_return, perturbed_outcome) = if stable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir = unit_direction4(&mut rng);
        let scale = PERTURBATION;
        let du = Complex::new(lit::<T>(dir[0] * scale), lit::<T>(dir[1] * scale));
        let dv = Complex::new(lit::<T>(dir[2] * scale), lit::<T>(dir[3] * scale));
        let orbit = iterate(params, OrbitState::new(cycle.phi + du, cycle.psi + dv), cfg);
        (Some(matches_cycle(&orbit.outcome)), Some(orbit.outcome.name().to_string()))
    } else {
        (None, None)
    };

    CycleVerification {
        on_cycle,
        on_cycle_outcome,
        passed: on_cycle && perturbed_return.unwrap_or(true),
        perturbed_return,
        perturbed_outcome,
    }
}
