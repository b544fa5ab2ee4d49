use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{MeasurementSource, Method, ScenarioConfig};
use super::{ExperimentError, Seeds};
use crate::estimation::{
    classify_requestors, estimate_resolver_count, invert_single_measurement, predict_full, predict_stub_only,
    solve_three_measurement, solve_two_measurement, EstimationError, RequestorPartition, SourceId, UacEstimate,
};
use crate::model::{heterogeneous_load, MeasurementPoint, Rate, TtlSeconds};
use crate::sim::{
    expected_source_rates, measure_per_source_rates, pair_observations, simulate_authoritative_load, RatePopulation,
    SourceRate,
};

pub const STATUS_OK: &str = "ok";

/// One grid point of a validation run. Fields that could not be computed
/// because estimation failed are empty; `status` names the failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub tau_1: f64,
    pub tau_2: Option<f64>,
    pub tau_3: Option<f64>,
    pub estimation_ttl: f64,
    pub n_true: f64,
    pub d_true: f64,
    pub n_tilde: Option<f64>,
    pub a_tilde: Option<f64>,
    pub d_tilde: Option<f64>,
    pub predicted: Option<f64>,
    pub true_load: f64,
    pub relative_error: Option<f64>,
    pub absolute_error: Option<f64>,
    pub classification_accuracy: Option<f64>,
    pub status: String,
}

impl ErrorReport {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    /// The fitted parameters, when estimation succeeded.
    pub fn estimate(&self) -> Option<UacEstimate> {
        let source = match (self.tau_2, self.tau_3) {
            (None, _) => crate::estimation::EstimateSource::SingleMeasurement,
            (Some(_), None) => crate::estimation::EstimateSource::TwoMeasurement,
            _ => crate::estimation::EstimateSource::ThreeMeasurement,
        };
        Some(UacEstimate {
            n_tilde: self.n_tilde?,
            a_tilde: Rate::new(self.a_tilde?).ok()?,
            d_tilde: Rate::new(self.d_tilde?).ok()?,
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRun {
    pub method: Method,
    pub seeds: Seeds,
    pub rows: Vec<ErrorReport>,
}

/// Writes the report rows as CSV with a header.
pub fn write_error_csv<W: Write>(rows: &[ErrorReport], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

struct Observation {
    load: f64,
    per_source: Vec<SourceRate>,
}

fn ttl(v: f64) -> TtlSeconds {
    TtlSeconds::new(v).expect("validated TTL")
}

/// Observes the population at every distinct TTL once, in parallel.
fn observe_all(
    population: &RatePopulation,
    ttls: impl IntoIterator<Item = f64>,
    source: MeasurementSource,
    config: &ScenarioConfig,
    seed: u64,
    keep_sources: bool,
) -> Result<BTreeMap<u64, Observation>, ExperimentError> {
    let mut distinct: Vec<f64> = ttls.into_iter().collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let sim = config.sim.to_config(seed)?;
    distinct
        .par_iter()
        .map(|&t| {
            let obs = match source {
                MeasurementSource::Analytic => Observation {
                    load: heterogeneous_load(&population.resolver_rates, population.full_client_total(), ttl(t))
                        .value(),
                    per_source: if keep_sources { expected_source_rates(population, ttl(t)) } else { Vec::new() },
                },
                MeasurementSource::Simulated => {
                    let res = simulate_authoritative_load(population, ttl(t), &sim)?;
                    Observation {
                        load: res.aggregate_rate.value(),
                        per_source: if keep_sources { measure_per_source_rates(&res) } else { Vec::new() },
                    }
                }
            };
            Ok((t.to_bits(), obs))
        })
        .collect()
}

fn point(t: f64, load: f64) -> Result<MeasurementPoint, EstimationError> {
    MeasurementPoint::new(t, load).map_err(|_| EstimationError::NonPositiveRate)
}

fn accuracy(partition: &RequestorPartition, n_resolvers: usize) -> f64 {
    let is_resolver = |id: &SourceId| (id.0 as usize) < n_resolvers;
    let correct = partition.resolvers.iter().filter(|id| is_resolver(id)).count()
        + partition.full_clients.iter().filter(|id| !is_resolver(id)).count();
    correct as f64 / (partition.resolvers.len() + partition.full_clients.len()) as f64
}

struct Fit {
    estimate: Result<UacEstimate, EstimationError>,
    predicted: Option<f64>,
    classification_accuracy: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn report(
    taus: [Option<f64>; 3],
    estimation_ttl: f64,
    population: &RatePopulation,
    true_load: f64,
    fit: Fit,
) -> ErrorReport {
    let mut row = ErrorReport {
        tau_1: taus[0].unwrap_or(f64::NAN),
        tau_2: taus[1],
        tau_3: taus[2],
        estimation_ttl,
        n_true: population.n_resolvers() as f64,
        d_true: population.full_client_total().value(),
        n_tilde: None,
        a_tilde: None,
        d_tilde: None,
        predicted: None,
        true_load,
        relative_error: None,
        absolute_error: None,
        classification_accuracy: fit.classification_accuracy,
        status: STATUS_OK.to_string(),
    };
    match fit.estimate {
        Ok(est) => {
            let predicted = fit.predicted.expect("prediction accompanies an estimate");
            row.n_tilde = Some(est.n_tilde);
            row.a_tilde = Some(est.a_tilde.value());
            row.d_tilde = Some(est.d_tilde.value());
            row.predicted = Some(predicted);
            let abs = (predicted - true_load).abs();
            row.absolute_error = Some(abs);
            row.relative_error = (true_load > 0.0).then(|| abs / true_load);
        }
        Err(e) => row.status = e.name().to_string(),
    }
    row
}

fn check_method(config: &ScenarioConfig, method: Method) -> Result<(), ExperimentError> {
    config.validate()?;
    if config.method != method {
        return Err(ExperimentError::Config(format!("scenario method is {:?}, expected {method:?}", config.method)));
    }
    Ok(())
}

fn population(config: &ScenarioConfig, seeds: &Seeds) -> Result<RatePopulation, ExperimentError> {
    Ok(RatePopulation::generate(config.distribution, config.n_resolvers, config.n_full_clients, seeds.population)?)
}

/// Single-measurement validation over (measurement TTL, estimation TTL):
/// measure at the first, invert with the known resolver count, predict at
/// the second and compare against the load observed there.
pub fn run_stub_validation(config: &ScenarioConfig) -> Result<ValidationRun, ExperimentError> {
    check_method(config, Method::StubOnly)?;
    let seeds = Seeds::from_master(config.seed);
    let pop = population(config, &seeds)?;
    let grid = config.effective_grid();
    let measured = observe_all(&pop, grid.first.iter().copied(), config.measurement, config, seeds.measurement, false)?;
    let truth = observe_all(&pop, grid.second.iter().copied(), config.truth, config, seeds.truth, false)?;
    let n = pop.n_resolvers() as f64;

    let mut rows = Vec::new();
    for &tm in &grid.first {
        for &te in &grid.second {
            let estimate = point(tm, measured[&tm.to_bits()].load).and_then(|m| invert_single_measurement(m, n));
            let predicted = estimate.as_ref().ok().map(|e| predict_stub_only(e, ttl(te)).value());
            let fit = Fit { estimate, predicted, classification_accuracy: None };
            rows.push(report([Some(tm), None, None], te, &pop, truth[&te.to_bits()].load, fit));
        }
    }
    Ok(ValidationRun { method: Method::StubOnly, seeds, rows })
}

/// Two-measurement validation over (τ1, τ2): classify requestors from their
/// per-source rate change, count resolvers, solve for the inbound and
/// full-client rates and predict at the estimation TTL.
pub fn run_two_measurement_validation(config: &ScenarioConfig) -> Result<ValidationRun, ExperimentError> {
    check_method(config, Method::TwoMeasurement)?;
    let seeds = Seeds::from_master(config.seed);
    let pop = population(config, &seeds)?;
    let grid = config.effective_grid();
    let ttls = grid.first.iter().chain(&grid.second).copied();
    let measured = observe_all(&pop, ttls, config.measurement, config, seeds.measurement, true)?;
    let te = config.estimation_ttl;
    let true_load = observe_all(&pop, [te], config.truth, config, seeds.truth, false)?[&te.to_bits()].load;

    let pairs: Vec<(f64, f64)> = grid.first.iter().flat_map(|&a| grid.second.iter().map(move |&b| (a, b))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(t1, t2)| {
            let (o1, o2) = (&measured[&t1.to_bits()], &measured[&t2.to_bits()]);
            let mut classification_accuracy = None;
            let estimate = (|| {
                if t1 == t2 {
                    return Err(EstimationError::DegenerateTtls);
                }
                let partition = classify_requestors(&pair_observations(&o1.per_source, &o2.per_source))?;
                classification_accuracy = Some(accuracy(&partition, pop.n_resolvers()));
                let n = estimate_resolver_count(&partition)? as f64;
                solve_two_measurement(point(t1, o1.load)?, point(t2, o2.load)?, n)
            })();
            let predicted = estimate.as_ref().ok().map(|e| predict_full(e, ttl(te)).value());
            let fit = Fit { estimate, predicted, classification_accuracy };
            report([Some(t1), Some(t2), None], te, &pop, true_load, fit)
        })
        .collect();
    Ok(ValidationRun { method: Method::TwoMeasurement, seeds, rows })
}

/// Three-measurement validation over (τ2, τ3) with τ1 fixed: solve for all
/// three parameters without classification and predict at the estimation TTL.
pub fn run_three_measurement_validation(config: &ScenarioConfig) -> Result<ValidationRun, ExperimentError> {
    check_method(config, Method::ThreeMeasurement)?;
    let seeds = Seeds::from_master(config.seed);
    let pop = population(config, &seeds)?;
    let grid = config.effective_grid();
    let t1 = config.measurement_ttls[0];
    let ttls = std::iter::once(t1).chain(grid.first.iter().copied()).chain(grid.second.iter().copied());
    let measured = observe_all(&pop, ttls, config.measurement, config, seeds.measurement, false)?;
    let te = config.estimation_ttl;
    let true_load = observe_all(&pop, [te], config.truth, config, seeds.truth, false)?[&te.to_bits()].load;

    let mut rows = Vec::new();
    for &t2 in &grid.first {
        for &t3 in &grid.second {
            let load = |t: f64| measured[&t.to_bits()].load;
            let estimate =
                (|| solve_three_measurement(point(t1, load(t1))?, point(t2, load(t2))?, point(t3, load(t3))?))();
            let predicted = estimate.as_ref().ok().map(|e| predict_full(e, ttl(te)).value());
            let fit = Fit { estimate, predicted, classification_accuracy: None };
            rows.push(report([Some(t1), Some(t2), Some(t3)], te, &pop, true_load, fit));
        }
    }
    Ok(ValidationRun { method: Method::ThreeMeasurement, seeds, rows })
}

/// Dispatches on the scenario's method.
pub fn run_validation(config: &ScenarioConfig) -> Result<ValidationRun, ExperimentError> {
    match config.method {
        Method::StubOnly => run_stub_validation(config),
        Method::TwoMeasurement => run_two_measurement_validation(config),
        Method::ThreeMeasurement => run_three_measurement_validation(config),
    }
}
