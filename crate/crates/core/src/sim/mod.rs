//! Heterogeneous requestor populations and Poisson traffic through TTL caches.
//!
//! Each resolver receives a Poisson stream and forwards the arrivals that find
//! no live cache entry; each full client sends a plain Poisson stream to the
//! authoritative server. The aggregate of all forwarded queries is the
//! ground-truth server load the estimators are validated against.

mod engine;
mod io;
mod population;

use thiserror::Error;

pub use engine::{
    expected_source_rates, measure_per_source_rates, simulate_authoritative_load, simulate_resolver, CacheStart,
    SimConfig, SimMode, SimResult, SourceCount, SourceKind, SourceRate,
};
pub use io::{read_population_csv, read_sim_result_csv, write_population_csv, write_sim_result_csv};
pub use population::{sample_population, zipf_rates, DistributionKind, DistributionSpec, RatePopulation};

use crate::estimation::RequestorObservation;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid distribution parameters: {0}")]
    InvalidParams(String),
    #[error("simulation duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("population is empty")]
    EmptyPopulation,
    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Csv(e.to_string())
    }
}

/// Joins per-source rates from two measurement windows into requestor
/// observations. Sources missing from either side are skipped.
pub fn pair_observations(at_tau1: &[SourceRate], at_tau2: &[SourceRate]) -> Vec<RequestorObservation> {
    let second: std::collections::HashMap<_, _> = at_tau2.iter().map(|s| (s.source_id, s.rate)).collect();
    at_tau1
        .iter()
        .filter_map(|s| {
            second.get(&s.source_id).map(|&r2| RequestorObservation {
                source_id: s.source_id,
                rate_at_tau1: s.rate,
                rate_at_tau2: r2,
            })
        })
        .collect()
}
