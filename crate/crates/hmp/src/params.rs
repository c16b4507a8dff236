//! Annealing parameter files.
//!
//! Every field is optional and falls back to the solver default:
//!
//! ```toml
//! cooling_rate = 0.97
//! inner_generated_coeff = 3.0
//! inner_accepted_coeff = 6.0
//! min_accept_rate = 0.001
//! stability_count = 30
//! stability_rel_tol = 1e-4
//! initial_temp = 5000.0
//! calibration_samples = 200
//! max_evaluations = 1000000
//! seed = 7
//!
//! [penalty]
//! rate = 1e9
//! acceptance = 1e9
//! capacity = 1e9
//! ```

use hmp_core::{PenaltyWeights, SaParams};
use serde::Deserialize;

use crate::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    cooling_rate: Option<f64>,
    inner_generated_coeff: Option<f64>,
    inner_accepted_coeff: Option<f64>,
    min_accept_rate: Option<f64>,
    stability_count: Option<u32>,
    stability_rel_tol: Option<f64>,
    initial_temp: Option<f64>,
    calibration_samples: Option<u32>,
    calibration_acceptance: Option<f64>,
    max_evaluations: Option<u64>,
    seed: Option<u64>,
    penalty: Option<PenaltyFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PenaltyFile {
    rate: f64,
    acceptance: f64,
    capacity: f64,
}

/// Reads a parameter file on top of [`SaParams::default`].
pub fn parse_params(text: &str) -> Result<SaParams> {
    let f: ParamsFile = toml::from_str(text).map_err(|e| Error::from_toml(text, e))?;
    let d = SaParams::default();
    let params = SaParams {
        penalty: f.penalty.map(|p| PenaltyWeights {
            rate: p.rate,
            acceptance: p.acceptance,
            capacity: p.capacity,
        }),
        cooling_rate: f.cooling_rate.unwrap_or(d.cooling_rate),
        inner_generated_coeff: f.inner_generated_coeff.unwrap_or(d.inner_generated_coeff),
        inner_accepted_coeff: f.inner_accepted_coeff.unwrap_or(d.inner_accepted_coeff),
        min_accept_rate: f.min_accept_rate.unwrap_or(d.min_accept_rate),
        stability_count: f.stability_count.unwrap_or(d.stability_count),
        stability_rel_tol: f.stability_rel_tol.unwrap_or(d.stability_rel_tol),
        initial_temp: f.initial_temp.or(d.initial_temp),
        calibration_samples: f.calibration_samples.unwrap_or(d.calibration_samples),
        calibration_acceptance: f.calibration_acceptance.unwrap_or(d.calibration_acceptance),
        max_evaluations: f.max_evaluations.unwrap_or(d.max_evaluations),
        seed: f.seed.unwrap_or(d.seed),
        ..d
    };
    params.validate()?;
    Ok(params)
}
