//! The recurrence `z[n+1] = (a + z[n-1]) / (b z[n] + z[n-1])`, its planar
//! form `T(u, v) = (v, (a + u) / (b v + u))`, orbit iteration and outcome
//! classification.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat2;
use crate::scalar::{is_finite, lit, modulus, to_f64, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("denominator b*z[n] + z[n-1] vanished (|den| = {denominator:e}) at step {step}")]
    Singular { step: u64, denominator: f64 },
    #[error("non-finite value produced at step {step}")]
    NonFinite { step: u64 },
    #[error("cycle detection needs at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid tolerance configuration: {0}")]
    InvalidConfig(String),
}

/// Parameter pair `(a, b)`; stored exactly as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Scalar> Params<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Self {
        Self { alpha, beta }
    }

    pub fn denominator(&self, z_prev: Complex<T>, z_curr: Complex<T>) -> Complex<T> {
        self.beta * z_curr + z_prev
    }

    /// Raw recurrence value; no singularity guard.
    pub fn eval(&self, z_prev: Complex<T>, z_curr: Complex<T>) -> Complex<T> {
        (self.alpha + z_prev) / self.denominator(z_prev, z_curr)
    }
}

/// `(z[n-1], z[n])` together with the step index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitState<T> {
    pub z_prev: Complex<T>,
    pub z_curr: Complex<T>,
    pub n: u64,
}

impl<T: Scalar> OrbitState<T> {
    pub fn new(z_prev: Complex<T>, z_curr: Complex<T>) -> Self {
        Self { z_prev, z_curr, n: 0 }
    }

    pub fn advance(&self, next: Complex<T>) -> Self {
        Self {
            z_prev: self.z_curr,
            z_curr: next,
            n: self.n + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitOutcome<T> {
    ConvergedTo { limit: Complex<T> },
    PeriodicCycle { period: usize, cycle: Vec<Complex<T>> },
    Singular { step: u64 },
    Unbounded { step: u64 },
    Undecided,
}

impl<T> OrbitOutcome<T> {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitOutcome::ConvergedTo { .. } => "converged",
            OrbitOutcome::PeriodicCycle { .. } => "periodic",
            OrbitOutcome::Singular { .. } => "singular",
            OrbitOutcome::Unbounded { .. } => "unbounded",
            OrbitOutcome::Undecided => "undecided",
        }
    }

    /// True when the orbit neither hit the singular set nor escaped.
    pub fn survived(&self) -> bool {
        !matches!(self, OrbitOutcome::Singular { .. } | OrbitOutcome::Unbounded { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit<T> {
    pub params: Params<T>,
    pub initial: OrbitState<T>,
    /// `z_1 ... z_N`
    pub points: Vec<Complex<T>>,
    pub outcome: OrbitOutcome<T>,
    pub iterations_used: u64,
}

/// Numerical cutoffs for iteration and classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub eps_singular: f64,
    pub radius_unbounded: f64,
    pub eps_converge: f64,
    pub converge_window: usize,
    pub max_period: usize,
    pub eps_cycle: f64,
    pub max_iters: usize,
    pub transient_discard: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_singular: 1e-12,
            radius_unbounded: 1e8,
            eps_converge: 1e-9,
            converge_window: 20,
            max_period: 50,
            eps_cycle: 1e-6,
            max_iters: 20_000,
            transient_discard: 1_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), MapError> {
        let positive = [
            ("eps_singular", self.eps_singular),
            ("radius_unbounded", self.radius_unbounded),
            ("eps_converge", self.eps_converge),
            ("eps_cycle", self.eps_cycle),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(MapError::InvalidConfig(format!("{name} must be finite and > 0")));
            }
        }
        if self.converge_window < 2 {
            return Err(MapError::InvalidConfig("converge_window must be >= 2".into()));
        }
        if self.max_period < 2 {
            return Err(MapError::InvalidConfig("max_period must be >= 2".into()));
        }
        if self.max_iters < 1 {
            return Err(MapError::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.transient_discard >= self.max_iters {
            return Err(MapError::InvalidConfig("transient_discard must be < max_iters".into()));
        }
        if self.converge_window > self.max_iters {
            return Err(MapError::InvalidConfig("converge_window must be <= max_iters".into()));
        }
        Ok(())
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }
}

/// One application of the recurrence.
pub fn step<T: Scalar>(
    params: &Params<T>,
    state: &OrbitState<T>,
    cfg: &ToleranceConfig,
) -> Result<Complex<T>, MapError> {
    let den = params.denominator(state.z_prev, state.z_curr);
    let den_abs = modulus(den);
    if !(den_abs >= lit(cfg.eps_singular)) {
        return Err(MapError::Singular {
            step: state.n,
            denominator: to_f64(den_abs),
        });
    }
    let next = (params.alpha + state.z_prev) / den;
    if !is_finite(next) {
        return Err(MapError::NonFinite { step: state.n });
    }
    Ok(next)
}

/// Planar map `T(u, v) = (v, (a + u) / (b v + u))`.
pub fn planar_map<T: Scalar>(
    params: &Params<T>,
    u: Complex<T>,
    v: Complex<T>,
    eps_singular: T,
) -> Result<(Complex<T>, Complex<T>), MapError> {
    let den = params.denominator(u, v);
    if !(modulus(den) >= eps_singular) {
        return Err(MapError::Singular {
            step: 0,
            denominator: to_f64(modulus(den)),
        });
    }
    Ok((v, (params.alpha + u) / den))
}

/// Analytic Jacobian of `T` at `(u, v)`:
/// `[[0, 1], [(b v - a) / d^2, -b (a + u) / d^2]]` with `d = b v + u`.
pub fn planar_jacobian<T: Scalar>(
    params: &Params<T>,
    u: Complex<T>,
    v: Complex<T>,
    eps_singular: T,
) -> Result<Mat2<T>, MapError> {
    let den = params.denominator(u, v);
    if !(modulus(den) >= eps_singular) {
        return Err(MapError::Singular {
            step: 0,
            denominator: to_f64(modulus(den)),
        });
    }
    let d2 = den * den;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    Ok(Mat2::new(
        zero,
        one,
        (params.beta * v - params.alpha) / d2,
        -(params.beta * (params.alpha + u)) / d2,
    ))
}

/// Iterates up to `cfg.max_iters` steps and classifies the outcome. The first
/// rule to fire wins, in the order singular, unbounded, converged, periodic,
/// undecided.
pub fn iterate<T: Scalar>(
    params: &Params<T>,
    initial: OrbitState<T>,
    cfg: &ToleranceConfig,
) -> Orbit<T> {
    let radius = lit::<T>(cfg.radius_unbounded);
    let eps_conv = lit::<T>(cfg.eps_converge);
    let window = cfg.converge_window.max(2);
    let mut points: Vec<Complex<T>> = Vec::with_capacity(cfg.max_iters.min(1 << 20));
    let mut state = initial;
    let mut outcome = None;

    while points.len() < cfg.max_iters {
        let next = match step(params, &state, cfg) {
            Ok(z) => z,
            Err(_) => {
                outcome = Some(OrbitOutcome::Singular { step: state.n });
                break;
            }
        };
        points.push(next);
        state = state.advance(next);
        if modulus(next) > radius {
            outcome = Some(OrbitOutcome::Unbounded { step: state.n });
            break;
        }
        if points.len() >= window && converged_tail(&points[points.len() - window..], eps_conv) {
            outcome = Some(OrbitOutcome::ConvergedTo { limit: next });
            break;
        }
    }

    let outcome = outcome.unwrap_or_else(|| {
        let needed = 2 * cfg.max_period;
        if points.len() >= cfg.transient_discard + needed {
            let tail = &points[points.len() - needed..];
            match detect_cycle(tail, cfg.max_period, lit(cfg.eps_cycle)) {
                Ok(Some((period, cycle))) => OrbitOutcome::PeriodicCycle { period, cycle },
                _ => OrbitOutcome::Undecided,
            }
        } else {
            OrbitOutcome::Undecided
        }
    });

    Orbit {
        params: *params,
        initial,
        iterations_used: points.len() as u64,
        points,
        outcome,
    }
}

fn converged_tail<T: Scalar>(window: &[Complex<T>], eps: T) -> bool {
    let last = window[window.len() - 1];
    // cheap reject before scanning the whole window
    if modulus(window[window.len() - 2] - last) >= eps {
        return false;
    }
    window.iter().all(|&z| modulus(z - last) < eps)
}

/// Smallest prime period `p` in `2..=max_period` such that the tail repeats
/// with lag `p` to within `eps`. A tail that is already constant (period 1)
/// yields `None`. The returned cycle is the last `p` points of the tail.
pub fn detect_cycle<T: Scalar>(
    tail: &[Complex<T>],
    max_period: usize,
    eps: T,
) -> Result<Option<(usize, Vec<Complex<T>>)>, MapError> {
    let needed = 2 * max_period;
    if tail.len() < needed {
        return Err(MapError::InsufficientData {
            needed,
            got: tail.len(),
        });
    }
    let repeats_with_lag = |p: usize| (0..tail.len() - p).all(|k| modulus(tail[k + p] - tail[k]) < eps);
    if repeats_with_lag(1) {
        return Ok(None);
    }
    for p in 2..=max_period {
        if repeats_with_lag(p) {
            return Ok(Some((p, tail[tail.len() - p..].to_vec())));
        }
    }
    Ok(None)
}

/// Outcome refined against the known equilibria and period-two cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "kebab-case")]
pub enum OutcomeLabel {
    /// Converged to equilibrium number `index` (1 or 2).
    Equilibrium { index: u8 },
    /// Converged somewhere else; `distance` to the nearest equilibrium,
    /// absent when there are none to compare against.
    Other { distance: Option<f64> },
    KnownTwoCycle,
    OtherTwoCycle,
    HigherCycle { period: usize },
    Singular,
    Unbounded,
    Undecided,
}

impl OutcomeLabel {
    /// Every label name the classifier can emit.
    pub const NAMES: [&'static str; 10] = [
        "equilibrium-1",
        "equilibrium-2",
        "equilibrium",
        "other",
        "known-two-cycle",
        "other-two-cycle",
        "higher-cycle",
        "singular",
        "unbounded",
        "undecided",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OutcomeLabel::Equilibrium { index: 1 } => "equilibrium-1",
            OutcomeLabel::Equilibrium { index: 2 } => "equilibrium-2",
            OutcomeLabel::Equilibrium { .. } => "equilibrium",
            OutcomeLabel::Other { .. } => "other",
            OutcomeLabel::KnownTwoCycle => "known-two-cycle",
            OutcomeLabel::OtherTwoCycle => "other-two-cycle",
            OutcomeLabel::HigherCycle { .. } => "higher-cycle",
            OutcomeLabel::Singular => "singular",
            OutcomeLabel::Unbounded => "unbounded",
            OutcomeLabel::Undecided => "undecided",
        }
    }

    pub fn is_equilibrium(&self) -> bool {
        matches!(self, OutcomeLabel::Equilibrium { .. })
    }
}

/// Refines a raw outcome. `equilibria` lists the known fixed points in order
/// (index 1 first); `two_cycle` is the closed-form period-two pair if any.
pub fn classify_orbit<T: Scalar>(
    orbit: &Orbit<T>,
    equilibria: &[Complex<T>],
    two_cycle: Option<(Complex<T>, Complex<T>)>,
    eps: T,
) -> OutcomeLabel {
    match &orbit.outcome {
        OrbitOutcome::ConvergedTo { limit } => {
            let nearest = equilibria
                .iter()
                .enumerate()
                .map(|(i, &z)| (i, modulus(z - *limit)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            match nearest {
                Some((i, d)) if d < eps => OutcomeLabel::Equilibrium { index: (i + 1) as u8 },
                Some((_, d)) => OutcomeLabel::Other {
                    distance: Some(to_f64(d)),
                },
                None => OutcomeLabel::Other { distance: None },
            }
        }
        OrbitOutcome::PeriodicCycle { period: 2, cycle } => match two_cycle {
            Some((phi, psi)) if same_pair(cycle[0], cycle[1], phi, psi, eps) => OutcomeLabel::KnownTwoCycle,
            _ => OutcomeLabel::OtherTwoCycle,
        },
        OrbitOutcome::PeriodicCycle { period, .. } => OutcomeLabel::HigherCycle { period: *period },
        OrbitOutcome::Singular { .. } => OutcomeLabel::Singular,
        OrbitOutcome::Unbounded { .. } => OutcomeLabel::Unbounded,
        OrbitOutcome::Undecided => OutcomeLabel::Undecided,
    }
}

fn same_pair<T: Scalar>(a: Complex<T>, b: Complex<T>, p: Complex<T>, q: Complex<T>, eps: T) -> bool {
    let direct = modulus(a - p) < eps && modulus(b - q) < eps;
    let swapped = modulus(a - q) < eps && modulus(b - p) < eps;
    direct || swapped
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn p(a: C, b: C) -> Params<f64> {
        Params::new(a, b)
    }

    #[test]
    fn step_zero_params_is_one() {
        let cfg = ToleranceConfig::default();
        let s = OrbitState::new(c(5.0, 0.0), c(-3.0, 2.0));
        assert_eq!(step(&p(c(0.0, 0.0), c(0.0, 0.0)), &s, &cfg).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn step_fixed_point_of_beta_zero() {
        let cfg = ToleranceConfig::default();
        let s = OrbitState::new(c(2.0, 0.0), c(7.0, 0.0));
        assert_eq!(step(&p(c(2.0, 0.0), c(0.0, 0.0)), &s, &cfg).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn step_maps_two_cycle_point_to_partner() {
        let cfg = ToleranceConfig::default();
        let s = OrbitState::new(c(1.30024, 0.624811), c(-0.300243, -0.624811));
        let z = step(&p(c(1.0, 0.0), c(1.0, 1.0)), &s, &cfg).unwrap();
        assert!((z - c(1.30024, 0.624811)).norm() < 1e-4);
    }

    #[test]
    fn step_singular_denominator() {
        let cfg = ToleranceConfig::default();
        // b z + z_prev = 0 with b = 2, z = -1, z_prev = 2
        let s = OrbitState::new(c(2.0, 0.0), c(-1.0, 0.0));
        let err = step(&p(c(1.0, 0.0), c(2.0, 0.0)), &s, &cfg).unwrap_err();
        assert!(matches!(err, MapError::Singular { step: 0, .. }));
    }

    #[test]
    fn iterate_zero_params_converges_quickly() {
        let cfg = ToleranceConfig::default();
        let orbit = iterate(&p(c(0.0, 0.0), c(0.0, 0.0)), OrbitState::new(c(0.3, 0.1), c(-0.2, 0.5)), &cfg);
        assert_eq!(orbit.outcome, OrbitOutcome::ConvergedTo { limit: c(1.0, 0.0) });
        assert!(orbit.iterations_used as usize <= cfg.converge_window + 2);
    }

    #[test]
    fn iterate_reports_singular_step() {
        let cfg = ToleranceConfig::default();
        let orbit = iterate(&p(c(1.0, 0.0), c(2.0, 0.0)), OrbitState::new(c(2.0, 0.0), c(-1.0, 0.0)), &cfg);
        assert_eq!(orbit.outcome, OrbitOutcome::Singular { step: 0 });
        assert!(orbit.points.is_empty());
    }

    #[test]
    fn iterate_reports_escape() {
        // z_prev tiny and b z_curr nearly cancels it: the first iterate is huge
        let cfg = ToleranceConfig::default();
        let orbit = iterate(
            &p(c(1.0, 0.0), c(1.0, 0.0)),
            OrbitState::new(c(1.0, 0.0), c(-1.0 + 1e-10, 0.0)),
            &cfg,
        );
        assert_eq!(orbit.outcome, OrbitOutcome::Unbounded { step: 1 });
    }

    #[test]
    fn detect_cycle_alternating() {
        let (a, b) = (c(0.1, 0.2), c(0.9, -0.2));
        let tail: Vec<C> = (0..100).map(|k| if k % 2 == 0 { a } else { b }).collect();
        let (period, cycle) = detect_cycle(&tail, 50, 1e-6).unwrap().unwrap();
        assert_eq!(period, 2);
        assert_eq!(cycle, vec![a, b]);
    }

    #[test]
    fn detect_cycle_constant_is_none() {
        let tail = vec![c(0.4, 0.1); 100];
        assert_eq!(detect_cycle(&tail, 50, 1e-6).unwrap(), None);
    }

    #[test]
    fn detect_cycle_prefers_prime_period() {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
        let tail: Vec<C> = (0..100).map(|k| pts[k % 3]).collect();
        assert_eq!(detect_cycle(&tail, 50, 1e-6).unwrap().unwrap().0, 3);
    }

    #[test]
    fn detect_cycle_table_row() {
        let (phi, psi) = (c(0.03921, -0.29456), c(0.96078, 0.29456));
        let tail: Vec<C> = (0..100).map(|k| if k % 2 == 0 { phi } else { psi }).collect();
        let (period, cycle) = detect_cycle(&tail, 50, 1e-6).unwrap().unwrap();
        assert_eq!(period, 2);
        assert!(cycle.contains(&phi) && cycle.contains(&psi));
    }

    #[test]
    fn detect_cycle_short_tail() {
        let err = detect_cycle(&[c(0.0, 0.0); 10], 50, 1e-6).unwrap_err();
        assert_eq!(err, MapError::InsufficientData { needed: 100, got: 10 });
    }

    #[test]
    fn classify_labels() {
        let params = p(c(2.0, 0.0), c(0.0, 0.0));
        let mut orbit = Orbit {
            params,
            initial: OrbitState::new(c(0.0, 0.0), c(0.0, 0.0)),
            points: vec![],
            outcome: OrbitOutcome::ConvergedTo { limit: c(2.0, 1e-12) },
            iterations_used: 0,
        };
        let eqs = [c(-1.0, 0.0), c(2.0, 0.0)];
        assert_eq!(classify_orbit(&orbit, &eqs, None, 1e-6).name(), "equilibrium-2");

        orbit.outcome = OrbitOutcome::ConvergedTo { limit: c(5.0, 0.0) };
        match classify_orbit(&orbit, &eqs, None, 1e-6) {
            OutcomeLabel::Other { distance } => assert!((distance.unwrap() - 3.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }

        let (phi, psi) = (c(0.03921, -0.29456), c(0.96078, 0.29456));
        orbit.outcome = OrbitOutcome::PeriodicCycle { period: 2, cycle: vec![psi, phi] };
        assert_eq!(classify_orbit(&orbit, &eqs, Some((phi, psi)), 1e-6), OutcomeLabel::KnownTwoCycle);
        assert_eq!(classify_orbit(&orbit, &eqs, None, 1e-6), OutcomeLabel::OtherTwoCycle);
    }

    #[test]
    fn config_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig {
            transient_discard: 20_000,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ToleranceConfig {
            eps_cycle: f64::NAN,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_precision_iteration() {
        let cfg = ToleranceConfig {
            eps_converge: 1e-5,
            ..Default::default()
        };
        let params: Params<f32> = Params::new(cplx(2.0, 0.0), cplx(0.0, 0.0));
        let orbit = iterate(&params, OrbitState::new(cplx(1.5, 0.0), cplx(1.0, 0.0)), &cfg);
        match orbit.outcome {
            OrbitOutcome::ConvergedTo { limit } => assert!((limit - cplx(2.0, 0.0)).norm() < 1e-4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
