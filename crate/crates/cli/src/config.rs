//! The JSON run configuration.

use std::path::Path;

use num_complex::Complex;
use ratdyn::scan::{Objective, SlicePolicy};
use ratdyn::{OrbitState, Params, ToleranceConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

/// Initial pair `(z[-1], z[0])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub z_prev: Complex<f64>,
    pub z_curr: Complex<f64>,
}

impl From<Initial> for OrbitState<f64> {
    fn from(i: Initial) -> Self {
        OrbitState::new(i.z_prev, i.z_curr)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovSection {
    pub n_steps: Option<usize>,
    pub threshold: Option<f64>,
    /// Where to write the running-average series as CSV.
    pub series_path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub objective: Option<Objective>,
    pub alpha_radius: Option<f64>,
    pub beta_radius: Option<f64>,
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinSection {
    pub center: Option<Complex<f64>>,
    pub half_width: Option<f64>,
    pub resolution: Option<usize>,
    pub slice: Option<SlicePolicy>,
    /// Value of the held coordinate for the `z_prev_fixed` / `z_curr_fixed` slices.
    pub partner: Option<Complex<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjectureSection {
    pub n_samples: Option<usize>,
    pub param_box: Option<f64>,
    pub n_steps: Option<usize>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<Params<f64>>,
    pub initial: Option<Initial>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    pub seed: Option<u64>,
    pub output_path: Option<String>,
    pub output_format: Option<Format>,
    pub lyapunov: Option<LyapunovSection>,
    pub scan: Option<ScanSection>,
    pub basin: Option<BasinSection>,
    pub conjectures: Option<ConjectureSection>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn require_params(&self) -> Result<Params<f64>, CliError> {
        let p = self
            .params
            .ok_or_else(|| CliError::Usage("config must set \"params\"".into()))?;
        let finite = [p.alpha, p.beta].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(CliError::Usage("params must be finite".into()));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_arrays() {
        let cfg = RunConfig::from_json(
            r#"{"params": {"alpha": [1.0, 0.5], "beta": [-2, 0]},
                "initial": {"z_prev": [0.1, 0], "z_curr": [0, 0.2]},
                "tolerances": {"max_iters": 500}}"#,
        )
        .unwrap();
        let p = cfg.require_params().unwrap();
        assert_eq!(p.alpha, Complex::new(1.0, 0.5));
        assert_eq!(cfg.tolerances.max_iters, 500);
        assert_eq!(cfg.tolerances.eps_cycle, 1e-6);
    }

    #[test]
    fn rejects_unknown_keys() {
        for text in [
            r#"{"parms": {}}"#,
            r#"{"params": {"alpha": [1, 0], "beta": [0, 0], "gamma": [0, 0]}}"#,
            r#"{"tolerances": {"max_iter": 5}}"#,
            r#"{"basin": {"resolution": 5, "zoom": 2}}"#,
        ] {
            assert!(RunConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn rejects_string_complex() {
        assert!(RunConfig::from_json(r#"{"params": {"alpha": "1+2i", "beta": [0, 0]}}"#).is_err());
    }
}
