//! Parameter-space and initial-condition-space exploration.

mod basin;
mod conjectures;
mod extremum;

pub use basin::{basin_raster, condition_region, BasinRaster, ConditionRegion, SlicePolicy};
pub use conjectures::{
    chaotic_row_cases, conjecture_chaos_harness, conjecture_chaos_on, conjecture_p3_harness, ChaosReport,
    ChaosSample, Contingency, PeriodHarnessReport, PeriodSample,
};
pub use extremum::{find_extremum, ExtremumResult, Objective, SearchDomain, Sense};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::Params;
use crate::scalar::{lit, modulus, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("budget must be >= {min}, got {got}")]
    BudgetTooSmall { min: usize, got: usize },
    #[error("n_samples must be >= 1")]
    NoSamples,
    #[error("invalid search domain: {0}")]
    InvalidDomain(String),
    #[error("invalid tolerances: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridTarget {
    InitialConditions,
    AlphaPlane,
    BetaPlane,
}

/// Square lattice of `resolution x resolution` points centred on `center`.
/// Row 0 is the top edge (largest imaginary part), column 0 the left edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub center: Complex<f64>,
    pub half_width: f64,
    pub resolution: usize,
    pub target: GridTarget,
}

impl ScanGrid {
    pub fn new(center: Complex<f64>, half_width: f64, resolution: usize, target: GridTarget) -> Self {
        Self {
            center,
            half_width,
            resolution,
            target,
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if self.resolution < 2 {
            return Err(ScanError::InvalidGrid(format!(
                "resolution must be >= 2, got {}",
                self.resolution
            )));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(ScanError::InvalidGrid("half_width must be finite and > 0".into()));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(ScanError::InvalidGrid("center must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.resolution == 0
    }

    pub fn point(&self, row: usize, col: usize) -> Complex<f64> {
        let span = 2.0 * self.half_width / (self.resolution - 1) as f64;
        Complex::new(
            self.center.re - self.half_width + span * col as f64,
            self.center.im + self.half_width - span * row as f64,
        )
    }
}

/// Comparison of `|b|` against `|1 + 4a|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck<T> {
    /// `|b| > |1 + 4a|`.
    pub beta_gt: bool,
    /// `(|1 + 4a|, |b|)`.
    pub values: [T; 2],
}

impl<T: Scalar> ConditionCheck<T> {
    /// `|b| < |1 + 4a|`, the strict reverse comparison.
    pub fn beta_lt(&self) -> bool {
        self.values[1] < self.values[0]
    }
}

pub fn condition_check<T: Scalar>(params: &Params<T>) -> ConditionCheck<T> {
    let one = Complex::new(T::one(), T::zero());
    let lhs = modulus(one + params.alpha * lit::<T>(4.0));
    let rhs = modulus(params.beta);
    ConditionCheck {
        beta_gt: rhs > lhs,
        values: [lhs, rhs],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_at_origin() {
        let chk = condition_check(&Params::new(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)));
        assert_eq!(chk.values, [1.0, 0.0]);
        assert!(!chk.beta_gt);
        assert!(chk.beta_lt());
    }

    #[test]
    fn grid_corners() {
        let g = ScanGrid::new(Complex::new(1.0, -1.0), 0.5, 3, GridTarget::InitialConditions);
        assert_eq!(g.point(0, 0), Complex::new(0.5, -0.5));
        assert_eq!(g.point(2, 2), Complex::new(1.5, -1.5));
        assert_eq!(g.point(1, 1), Complex::new(1.0, -1.0));
    }

    #[test]
    fn grid_validation() {
        let ok = ScanGrid::new(Complex::new(0.0, 0.0), 1.0, 2, GridTarget::AlphaPlane);
        assert!(ok.validate().is_ok());
        assert!(ScanGrid { resolution: 1, ..ok }.validate().is_err());
        assert!(ScanGrid { half_width: 0.0, ..ok }.validate().is_err());
        assert!(ScanGrid { half_width: f64::NAN, ..ok }.validate().is_err());
    }
}
