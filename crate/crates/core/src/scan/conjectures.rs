use std::collections::BTreeMap;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{condition_check, ConditionCheck, ScanError};
use crate::fixtures::chaotic_rows;
use crate::lyapunov::{classify_chaotic, lyapunov_max};
use crate::map::{classify_orbit, iterate, OrbitOutcome, OrbitState, OutcomeLabel, Params, ToleranceConfig};
use crate::period_two::two_cycle;
use crate::sampling::uniform_in_square;

/// Half-width of the square the chaos harness draws initial values from.
pub const INITIAL_HALF_WIDTH: f64 = 0.5;

/// A sample whose orbit settled on a cycle of period >= 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSample {
    pub index: usize,
    pub params: Params<f64>,
    pub initial: OrbitState<f64>,
    pub period: usize,
    pub cycle: Vec<Complex<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodHarnessReport {
    pub n_samples: usize,
    pub param_box: f64,
    pub seed: u64,
    pub max_period: usize,
    /// Samples per classified outcome label.
    pub outcome_counts: BTreeMap<String, usize>,
    /// Samples per detected period (2 included).
    pub period_counts: BTreeMap<usize, usize>,
    /// Samples with a detected period in `3..=max_period`.
    pub higher_period_total: usize,
    pub offending: Vec<PeriodSample>,
}

/// Draws `(a, b, z[-1], z[0])` uniformly from `[-param_box, param_box]^2`
/// per component, iterates, and tallies periods of 3 and above.
pub fn conjecture_p3_harness(
    n_samples: usize,
    param_box: f64,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<PeriodHarnessReport, ScanError> {
    if n_samples == 0 {
        return Err(ScanError::NoSamples);
    }
    if !(param_box.is_finite() && param_box > 0.0) {
        return Err(ScanError::InvalidDomain("param_box must be finite and > 0".into()));
    }
    cfg.validate().map_err(|e| ScanError::InvalidConfig(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(Params<f64>, OrbitState<f64>)> = (0..n_samples)
        .map(|_| {
            let a = uniform_in_square(&mut rng, param_box);
            let b = uniform_in_square(&mut rng, param_box);
            let u = uniform_in_square(&mut rng, param_box);
            let v = uniform_in_square(&mut rng, param_box);
            (Params::new(a, b), OrbitState::new(u, v))
        })
        .collect();

    let results: Vec<(OutcomeLabel, OrbitOutcome<f64>)> = samples
        .par_iter()
        .map(|(params, initial)| {
            let orbit = iterate(params, *initial, cfg);
            let eqs = crate::equilibria::equilibria(params)
                .map(|e| e.values().to_vec())
                .unwrap_or_default();
            let cycle = two_cycle(params).ok().map(|c| c.pair());
            let label = classify_orbit(&orbit, &eqs, cycle, cfg.eps_cycle);
            (label, orbit.outcome)
        })
        .collect();

    let mut outcome_counts = BTreeMap::new();
    let mut period_counts = BTreeMap::new();
    let mut offending = Vec::new();
    for (index, ((label, outcome), (params, initial))) in results.into_iter().zip(&samples).enumerate() {
        *outcome_counts.entry(label.name().to_string()).or_insert(0) += 1;
        if let OrbitOutcome::PeriodicCycle { period, cycle } = outcome {
            *period_counts.entry(period).or_insert(0) += 1;
            if period >= 3 {
                offending.push(PeriodSample {
                    index,
                    params: *params,
                    initial: *initial,
                    period,
                    cycle,
                });
            }
        }
    }
    Ok(PeriodHarnessReport {
        n_samples,
        param_box,
        seed,
        max_period: cfg.max_period,
        outcome_counts,
        period_counts,
        higher_period_total: offending.len(),
        offending,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosSample {
    pub index: usize,
    pub params: Params<f64>,
    pub initial: OrbitState<f64>,
    pub condition: ConditionCheck<f64>,
    pub lambda_max: Option<f64>,
    pub converged: bool,
    pub outcome: String,
    /// `None` when the estimate failed or its drift test did.
    pub chaotic: Option<bool>,
    pub note: Option<String>,
}

/// Samples split by `|b| < |1 + 4a|` (the "below" rows) and by chaos.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contingency {
    pub below_chaotic: usize,
    pub below_regular: usize,
    pub not_below_chaotic: usize,
    pub not_below_regular: usize,
    /// Orbit died or the estimate did not settle.
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosReport {
    pub n_samples: usize,
    pub seed: Option<u64>,
    pub threshold: f64,
    pub n_steps: usize,
    pub table: Contingency,
    pub samples: Vec<ChaosSample>,
    /// Chaotic samples with `|b| >= |1 + 4a|`.
    pub violators: Vec<ChaosSample>,
}

/// Random parameters from `[-param_box, param_box]^2`, initial values from
/// `[-0.5, 0.5]^2`.
pub fn conjecture_chaos_harness(
    n_samples: usize,
    param_box: f64,
    cfg: &ToleranceConfig,
    n_steps: usize,
    threshold: f64,
    seed: u64,
) -> Result<ChaosReport, ScanError> {
    if n_samples == 0 {
        return Err(ScanError::NoSamples);
    }
    if !(param_box.is_finite() && param_box > 0.0) {
        return Err(ScanError::InvalidDomain("param_box must be finite and > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(Params<f64>, OrbitState<f64>)> = (0..n_samples)
        .map(|_| {
            let a = uniform_in_square(&mut rng, param_box);
            let b = uniform_in_square(&mut rng, param_box);
            let u = uniform_in_square(&mut rng, INITIAL_HALF_WIDTH);
            let v = uniform_in_square(&mut rng, INITIAL_HALF_WIDTH);
            (Params::new(a, b), OrbitState::new(u, v))
        })
        .collect();
    let mut report = conjecture_chaos_on(&cases, cfg, n_steps, threshold)?;
    report.seed = Some(seed);
    Ok(report)
}

/// The chaos tally over an explicit list of cases.
pub fn conjecture_chaos_on(
    cases: &[(Params<f64>, OrbitState<f64>)],
    cfg: &ToleranceConfig,
    n_steps: usize,
    threshold: f64,
) -> Result<ChaosReport, ScanError> {
    if cases.is_empty() {
        return Err(ScanError::NoSamples);
    }
    cfg.validate().map_err(|e| ScanError::InvalidConfig(e.to_string()))?;

    let samples: Vec<ChaosSample> = cases
        .par_iter()
        .enumerate()
        .map(|(index, (params, initial))| {
            let condition = condition_check(params);
            let mut sample = ChaosSample {
                index,
                params: *params,
                initial: *initial,
                condition,
                lambda_max: None,
                converged: false,
                outcome: String::new(),
                chaotic: None,
                note: None,
            };
            match lyapunov_max(params, *initial, cfg, n_steps) {
                Ok(est) => {
                    sample.lambda_max = Some(est.lambda_max);
                    sample.converged = est.converged;
                    sample.outcome = est.orbit_outcome.name().to_string();
                    match classify_chaotic(&est, threshold) {
                        Ok(c) => sample.chaotic = Some(c),
                        Err(e) => sample.note = Some(e.to_string()),
                    }
                }
                Err(e) => {
                    sample.outcome = "died".into();
                    sample.note = Some(e.to_string());
                }
            }
            sample
        })
        .collect();

    let mut table = Contingency::default();
    for s in &samples {
        let below = s.condition.beta_lt();
        match (s.chaotic, below) {
            (None, _) => table.unresolved += 1,
            (Some(true), true) => table.below_chaotic += 1,
            (Some(false), true) => table.below_regular += 1,
            (Some(true), false) => table.not_below_chaotic += 1,
            (Some(false), false) => table.not_below_regular += 1,
        }
    }
    let violators = samples
        .iter()
        .filter(|s| s.chaotic == Some(true) && !s.condition.beta_lt())
        .cloned()
        .collect();
    Ok(ChaosReport {
        n_samples: cases.len(),
        seed: None,
        threshold,
        n_steps,
        table,
        samples,
        violators,
    })
}

/// The published chaotic parameter rows, each paired with one seeded
/// initial value from `[-0.5, 0.5]^2`.
pub fn chaotic_row_cases(seed: u64) -> Vec<(Params<f64>, OrbitState<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    chaotic_rows()
        .into_iter()
        .map(|row| {
            let u = uniform_in_square(&mut rng, INITIAL_HALF_WIDTH);
            let v = uniform_in_square(&mut rng, INITIAL_HALF_WIDTH);
            (row.params, OrbitState::new(u, v))
        })
        .collect()
}
