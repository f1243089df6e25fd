//! Dynamics of the rational second-order recurrence
//! `z[n+1] = (alpha + z[n-1]) / (beta z[n] + z[n-1])` over the complex numbers.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the `*64`
//! and `*32` aliases at the crate root fix the common choices.

pub mod equilibria;
pub mod fixtures;
pub mod linalg;
pub mod lyapunov;
pub mod map;
pub mod period_two;
pub mod sampling;
pub mod scalar;
pub mod scan;

pub use equilibria::{
    equilibria, linearize_at, saddle_margin, special_case_alpha_eq_beta, stability_margin, Branch,
    CharQuadratic, Equilibria, EquilibriumError, EquilibriumReport, Linearization, StabilityClass,
};
pub use linalg::{quadratic_roots, Mat2};
pub use lyapunov::{classify_chaotic, jacobian_fd, lyapunov_max, LyapunovError, LyapunovEstimate};
pub use map::{
    classify_orbit, iterate, planar_jacobian, planar_map, step, MapError, Orbit, OrbitOutcome, OrbitState,
    OutcomeLabel, Params, ToleranceConfig,
};
pub use period_two::{classify_two_cycle, two_cycle, PeriodTwoError, TwoCycle, TwoCycleStability};
pub use scalar::Scalar;
pub use scan::{condition_check, ConditionCheck, GridTarget, ScanError, ScanGrid};

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type Params64 = Params<f64>;
pub type Params32 = Params<f32>;
pub type OrbitState64 = OrbitState<f64>;
pub type OrbitState32 = OrbitState<f32>;
pub type Orbit64 = Orbit<f64>;
pub type Orbit32 = Orbit<f32>;
pub type Equilibria64 = Equilibria<f64>;
pub type Equilibria32 = Equilibria<f32>;
pub type TwoCycle64 = TwoCycle<f64>;
pub type TwoCycle32 = TwoCycle<f32>;
pub type LyapunovEstimate64 = LyapunovEstimate<f64>;
pub type LyapunovEstimate32 = LyapunovEstimate<f32>;
