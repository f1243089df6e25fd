use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{condition_check, GridTarget, ScanError, ScanGrid};
use crate::equilibria::equilibria;
use crate::map::{classify_orbit, iterate, OrbitState, OutcomeLabel, Params, ToleranceConfig};
use crate::period_two::two_cycle;
use crate::scalar::{lit, Scalar};

/// How a grid point `c` becomes an initial pair `(z[-1], z[0])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlicePolicy {
    /// `(partner, c)`
    ZPrevFixed,
    /// `(c, partner)`
    ZCurrFixed,
    /// `(c, c)`
    #[default]
    Diagonal,
}

impl SlicePolicy {
    pub fn initial<T: Scalar>(self, c: Complex<T>, partner: Complex<T>) -> OrbitState<T> {
        match self {
            SlicePolicy::ZPrevFixed => OrbitState::new(partner, c),
            SlicePolicy::ZCurrFixed => OrbitState::new(c, partner),
            SlicePolicy::Diagonal => OrbitState::new(c, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinRaster<T> {
    pub grid: ScanGrid,
    pub slice: SlicePolicy,
    pub partner: Complex<T>,
    /// `labels[row][col]`, row 0 at the top of the grid.
    pub labels: Vec<Vec<OutcomeLabel>>,
    pub params: Params<T>,
    pub config: ToleranceConfig,
}

impl<T> BasinRaster<T> {
    /// Occurrences of each label name.
    pub fn label_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for label in self.labels.iter().flatten() {
            *counts.entry(label.name()).or_insert(0) += 1;
        }
        counts
    }
}

/// Classifies the orbit from every cell of an initial-condition grid.
pub fn basin_raster<T: Scalar>(
    params: &Params<T>,
    grid: &ScanGrid,
    cfg: &ToleranceConfig,
    slice: SlicePolicy,
    partner: Complex<T>,
) -> Result<BasinRaster<T>, ScanError> {
    grid.validate()?;
    if grid.target != GridTarget::InitialConditions {
        return Err(ScanError::InvalidGrid(
            "basin rasters need an initial_conditions grid".into(),
        ));
    }
    cfg.validate().map_err(|e| ScanError::InvalidConfig(e.to_string()))?;

    let eqs: Vec<Complex<T>> = equilibria(params).map(|e| e.values().to_vec()).unwrap_or_default();
    let cycle = two_cycle(params).ok().map(|c| c.pair());
    let eps = lit::<T>(cfg.eps_cycle);
    let n = grid.resolution;

    let flat: Vec<OutcomeLabel> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let p = grid.point(k / n, k % n);
            let c = Complex::new(lit::<T>(p.re), lit::<T>(p.im));
            let orbit = iterate(params, slice.initial(c, partner), cfg);
            classify_orbit(&orbit, &eqs, cycle, eps)
        })
        .collect();
    let labels = flat.chunks(n).map(|row| row.to_vec()).collect();

    Ok(BasinRaster {
        grid: *grid,
        slice,
        partner,
        labels,
        params: *params,
        config: *cfg,
    })
}

/// Where `|b| > |1 + 4a|` holds over a parameter plane, the other
/// parameter held at `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRegion {
    pub grid: ScanGrid,
    pub fixed: Complex<f64>,
    /// `beta_gt[row][col]`.
    pub beta_gt: Vec<Vec<bool>>,
    pub fraction: f64,
}

pub fn condition_region(grid: &ScanGrid, fixed: Complex<f64>) -> Result<ConditionRegion, ScanError> {
    grid.validate()?;
    if grid.target == GridTarget::InitialConditions {
        return Err(ScanError::InvalidGrid(
            "condition regions need an alpha_plane or beta_plane grid".into(),
        ));
    }
    let n = grid.resolution;
    let beta_gt: Vec<Vec<bool>> = (0..n)
        .map(|row| {
            (0..n)
                .map(|col| {
                    let c = grid.point(row, col);
                    let params = match grid.target {
                        GridTarget::AlphaPlane => Params::new(c, fixed),
                        GridTarget::BetaPlane => Params::new(fixed, c),
                        GridTarget::InitialConditions => unreachable!("checked above"),
                    };
                    condition_check(&params).beta_gt
                })
                .collect()
        })
        .collect::<Vec<_>>();
    let hits = beta_gt.iter().flatten().filter(|&&b| b).count();
    Ok(ConditionRegion {
        grid: *grid,
        fixed,
        fraction: hits as f64 / grid.len() as f64,
        beta_gt,
    })
}
