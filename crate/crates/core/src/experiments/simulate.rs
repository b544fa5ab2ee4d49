use super::config::SimulationScenario;
use super::{ExperimentError, Seeds};
use crate::model::TtlSeconds;
use crate::sim::{simulate_authoritative_load, RatePopulation, SimResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub seeds: Seeds,
    pub population: RatePopulation,
    pub result: SimResult,
}

/// Generates the population and simulates its load at the scenario's TTL.
pub fn run_simulation(scenario: &SimulationScenario) -> Result<SimulationRun, ExperimentError> {
    scenario.validate()?;
    let seeds = Seeds::from_master(scenario.seed);
    let population = RatePopulation::generate(
        scenario.distribution,
        scenario.n_resolvers,
        scenario.n_full_clients,
        seeds.population,
    )?;
    let ttl = TtlSeconds::new(scenario.ttl).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let result = simulate_authoritative_load(&population, ttl, &scenario.sim.to_config(seeds.measurement)?)?;
    Ok(SimulationRun { seeds, population, result })
}

/// Three-sigma relative noise of the simulated aggregate load of `population`
/// at `tau` over `duration`.
///
/// A resolver's misses form a renewal process with interval `tau + Exp(lambda)`,
/// so its count has variance about `E / (1 + lambda*tau)^2`; with a cache
/// observed in steady state the phase of the first miss adds at most 1/4.
/// Full clients are Poisson.
pub fn simulation_noise_bound(population: &RatePopulation, tau: TtlSeconds, duration: f64) -> f64 {
    let t = tau.value();
    let (mut mean, mut var) = (0.0, 0.0);
    for a in &population.resolver_rates {
        let l = a.value();
        let e = duration * l / (1.0 + l * t);
        mean += e;
        var += e / (1.0 + l * t).powi(2) + if t > 0.0 && l > 0.0 { 0.25 } else { 0.0 };
    }
    for c in &population.full_client_rates {
        mean += c.value() * duration;
        var += c.value() * duration;
    }
    if mean > 0.0 {
        3.0 * var.sqrt() / mean
    } else {
        f64::INFINITY
    }
}
