//! End-to-end scenarios: validation of the estimators against simulated
//! traffic, sensitivity analysis of the single-measurement predictor, and the
//! CSV / manifest artifacts every run emits.
//!
//! Every scenario is a pure function of its configuration. All randomness is
//! derived from the configuration's master seed (see [`Seeds`]).

mod config;
mod gsa;
mod predict;
mod simulate;
mod validation;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use config::{
    GridSpec, GsaScenario, MeasurementSource, Method, ScenarioConfig, SimSettings, SimulationScenario, CONFIG_VERSION,
    DEFAULT_DURATION, DEFAULT_ESTIMATION_TTL, DEFAULT_MEASUREMENT_TTLS,
};
pub use gsa::run_gsa_experiment;
pub use predict::{fit_and_predict, Prediction};
pub use simulate::{run_simulation, simulation_noise_bound, SimulationRun};
pub use validation::{
    run_stub_validation, run_three_measurement_validation, run_two_measurement_validation, run_validation,
    write_error_csv, ErrorReport, ValidationRun, STATUS_OK,
};

use crate::estimation::EstimationError;
use crate::gsa::GsaError;
use crate::seed::{self, stream};
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Gsa(#[from] GsaError),
}

/// Seeds of every random stream of a run, derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub master: u64,
    pub population: u64,
    pub measurement: u64,
    pub truth: u64,
}

impl Seeds {
    pub fn from_master(master: u64) -> Self {
        Seeds {
            master,
            population: seed::derive(master, stream::POPULATION),
            measurement: seed::derive(master, stream::MEASUREMENT),
            truth: seed::derive(master, stream::TRUTH),
        }
    }
}

/// Record written next to every output: the configuration as run, its seeds
/// and the software version. Deliberately free of timestamps and host data so
/// that re-runs are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config_version: u32,
    pub config: serde_json::Value,
    pub seeds: Seeds,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new<C: Serialize>(command: &str, config: &C, master_seed: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_version: CONFIG_VERSION,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            seeds: Seeds::from_master(master_seed),
            outputs: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
