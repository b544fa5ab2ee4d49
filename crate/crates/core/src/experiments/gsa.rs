use super::config::GsaScenario;
use super::{ExperimentError, Seeds};
use crate::gsa::{
    eet_analyze, fast_analyze, prediction_gsa_model, vbsa_analyze, GsaMethod, GsaResult, PredictionModel, ScalarModel,
};
use crate::model::TtlSeconds;
use crate::seed::{self, stream};
use crate::sim::RatePopulation;

/// Builds the prediction model of the scenario and runs the selected analyzer.
pub fn run_gsa_experiment(scenario: &GsaScenario) -> Result<(GsaResult, PredictionModel), ExperimentError> {
    scenario.validate()?;
    let seeds = Seeds::from_master(scenario.seed);
    let population = RatePopulation::generate(scenario.distribution, scenario.n_resolvers, 0, seeds.population)?;
    let ttl = |v: f64| TtlSeconds::new(v).map_err(|e| ExperimentError::Config(e.to_string()));
    let model = prediction_gsa_model(
        ttl(scenario.tau0)?,
        ttl(scenario.tau_star)?,
        scenario.n_resolvers,
        &population,
        scenario.box_check,
    )?;
    let analysis_seed = seed::derive(scenario.seed, stream::SAMPLING);
    let space = model.space();
    let result = match scenario.method {
        GsaMethod::Eet => {
            GsaResult::Eet(eet_analyze(&model, space, scenario.eet_trajectories, analysis_seed, scenario.n_boot)?)
        }
        GsaMethod::Fast => GsaResult::Fast(fast_analyze(&model, space, scenario.fast_samples)?),
        GsaMethod::Vbsa => {
            GsaResult::Vbsa(vbsa_analyze(&model, space, scenario.vbsa_samples, analysis_seed, scenario.n_boot)?)
        }
    };
    debug_assert!(model.evaluate(&model.center()).is_finite());
    Ok((result, model))
}
