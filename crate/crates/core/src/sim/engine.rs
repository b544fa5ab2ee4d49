use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RatePopulation, SimError};
use crate::estimation::SourceId;
use crate::model::{cache_output_rate, Rate, TtlSeconds};
use crate::seed::{self, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Generate every Poisson arrival and replay it against the cache.
    EventDriven,
    /// Generate the miss process directly: inter-miss times are `tau + Exp(lambda)`.
    #[default]
    RenewalFast,
}

/// Cache state at the start of the measurement window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStart {
    /// Cold cache: the first arrival always misses.
    Empty,
    /// The cache is observed in steady state: live with probability
    /// `lambda*tau / (1 + lambda*tau)`, with a uniformly distributed residual lifetime.
    #[default]
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub duration: f64,
    pub seed: u64,
    #[serde(default)]
    pub mode: SimMode,
    #[serde(default)]
    pub initial_cache: CacheStart,
}

impl SimConfig {
    pub fn new(duration: f64, seed: u64, mode: SimMode) -> Result<Self, SimError> {
        let cfg = SimConfig { duration, seed, mode, initial_cache: CacheStart::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_initial_cache(mut self, start: CacheStart) -> Self {
        self.initial_cache = start;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.duration.is_finite() && self.duration > 0.0 {
            Ok(())
        } else {
            Err(SimError::InvalidDuration(self.duration))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Resolver,
    FullClient,
}

impl SourceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Resolver => "resolver",
            SourceKind::FullClient => "full_client",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCount {
    pub source_id: SourceId,
    pub kind: SourceKind,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceRate {
    pub source_id: SourceId,
    pub kind: SourceKind,
    pub rate: Rate,
}

/// Queries received by the authoritative server during one simulated window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub ttl: TtlSeconds,
    pub duration: f64,
    /// Ordered by source id; resolvers first, then full clients.
    pub per_source_counts: Vec<SourceCount>,
    pub aggregate_rate: Rate,
}

impl SimResult {
    pub fn total_count(&self) -> u64 {
        self.per_source_counts.iter().map(|c| c.count).sum()
    }
}

fn poisson_count<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(p) => {
            let v: f64 = p.sample(rng);
            v as u64
        }
        // beyond the sampler's range the normal limit is exact to many digits
        Err(_) => {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            (mean + z * mean.sqrt()).round().max(0.0) as u64
        }
    }
}

#[inline]
fn exp_draw<R: Rng>(rng: &mut R, lambda: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / lambda
}

/// Residual lifetime of the cached entry at t = 0, if one is live.
fn initial_residual<R: Rng>(rng: &mut R, lambda: f64, tau: f64, start: CacheStart) -> Option<f64> {
    match start {
        CacheStart::Empty => None,
        CacheStart::Stationary => {
            let p_live = lambda * tau / (1.0 + lambda * tau);
            let u: f64 = rng.random();
            if u < p_live {
                let v: f64 = rng.random();
                Some(v * tau)
            } else {
                None
            }
        }
    }
}

fn event_driven<R: Rng>(rng: &mut R, lambda: f64, tau: f64, duration: f64, start: CacheStart) -> u64 {
    let mut expiry = initial_residual(rng, lambda, tau, start).unwrap_or(f64::NEG_INFINITY);
    let mut t = 0.0;
    let mut misses = 0;
    loop {
        t += exp_draw(rng, lambda);
        if t >= duration {
            return misses;
        }
        if t >= expiry {
            misses += 1;
            expiry = t + tau;
        }
    }
}

fn renewal_fast<R: Rng>(rng: &mut R, lambda: f64, tau: f64, duration: f64, start: CacheStart) -> u64 {
    if tau == 0.0 {
        // every arrival misses: the miss process is the arrival process
        return poisson_count(rng, lambda * duration);
    }
    let mut t = initial_residual(rng, lambda, tau, start).unwrap_or(0.0) + exp_draw(rng, lambda);
    let mut misses = 0;
    while t < duration {
        misses += 1;
        t += tau + exp_draw(rng, lambda);
    }
    misses
}

/// Number of cache misses (queries forwarded to the authoritative server)
/// of one resolver with Poisson inbound rate `lambda` over `[0, duration)`.
pub fn simulate_resolver(lambda: Rate, tau: TtlSeconds, config: &SimConfig) -> u64 {
    let mut rng = seed::rng(config.seed);
    resolver_misses(&mut rng, lambda, tau, config)
}

fn resolver_misses<R: Rng>(rng: &mut R, lambda: Rate, tau: TtlSeconds, config: &SimConfig) -> u64 {
    let (lambda, tau) = (lambda.value(), tau.value());
    if lambda == 0.0 {
        return 0;
    }
    match config.mode {
        SimMode::EventDriven => event_driven(rng, lambda, tau, config.duration, config.initial_cache),
        SimMode::RenewalFast => renewal_fast(rng, lambda, tau, config.duration, config.initial_cache),
    }
}

/// Simulates every resolver through its TTL cache and every full client as a
/// plain Poisson stream; each source draws from a stream keyed by
/// `(config.seed, kind, index)`, so the result does not depend on scheduling.
pub fn simulate_authoritative_load(
    population: &RatePopulation,
    tau: TtlSeconds,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    config.validate()?;
    if population.is_empty() {
        return Err(SimError::EmptyPopulation);
    }
    let n_res = population.n_resolvers();
    let resolver_seed = seed::derive(config.seed, stream::RESOLVERS);
    let client_seed = seed::derive(config.seed, stream::FULL_CLIENTS);

    let mut counts: Vec<SourceCount> = population
        .resolver_rates
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut rng = seed::rng(seed::derive(resolver_seed, i as u64));
            SourceCount {
                source_id: SourceId(i as u64),
                kind: SourceKind::Resolver,
                count: resolver_misses(&mut rng, lambda, tau, config),
            }
        })
        .collect();
    counts.par_extend(population.full_client_rates.par_iter().enumerate().map(|(j, &c)| {
        let mut rng = seed::rng(seed::derive(client_seed, j as u64));
        SourceCount {
            source_id: SourceId((n_res + j) as u64),
            kind: SourceKind::FullClient,
            count: poisson_count(&mut rng, c.value() * config.duration),
        }
    }));

    let total: u64 = counts.iter().map(|c| c.count).sum();
    Ok(SimResult {
        ttl: tau,
        duration: config.duration,
        per_source_counts: counts,
        aggregate_rate: Rate::new(total as f64 / config.duration)
            .map_err(|e| SimError::InvalidParams(e.to_string()))?,
    })
}

/// Per-source observed rate `count / duration`.
pub fn measure_per_source_rates(result: &SimResult) -> Vec<SourceRate> {
    result
        .per_source_counts
        .iter()
        .map(|c| SourceRate {
            source_id: c.source_id,
            kind: c.kind,
            rate: Rate::new(c.count as f64 / result.duration).unwrap_or(Rate::ZERO),
        })
        .collect()
}

/// Noise-free per-source rates: the cache output rate of each resolver and
/// the raw rate of each full client.
pub fn expected_source_rates(population: &RatePopulation, tau: TtlSeconds) -> Vec<SourceRate> {
    let n_res = population.n_resolvers();
    let resolvers = population.resolver_rates.iter().enumerate().map(|(i, &a)| SourceRate {
        source_id: SourceId(i as u64),
        kind: SourceKind::Resolver,
        rate: cache_output_rate(a, tau),
    });
    let clients = population.full_client_rates.iter().enumerate().map(|(j, &c)| SourceRate {
        source_id: SourceId((n_res + j) as u64),
        kind: SourceKind::FullClient,
        rate: c,
    });
    resolvers.chain(clients).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::DistributionSpec;

    fn cfg(duration: f64, seed: u64, mode: SimMode) -> SimConfig {
        SimConfig::new(duration, seed, mode).unwrap()
    }

    fn r(v: f64) -> Rate {
        Rate::new(v).unwrap()
    }

    fn t(v: f64) -> TtlSeconds {
        TtlSeconds::new(v).unwrap()
    }

    #[test]
    fn silent_resolver() {
        for mode in [SimMode::EventDriven, SimMode::RenewalFast] {
            assert_eq!(simulate_resolver(r(0.0), t(10.0), &cfg(1e5, 1, mode)), 0);
        }
    }

    #[test]
    fn zero_ttl_forwards_every_arrival() {
        for mode in [SimMode::EventDriven, SimMode::RenewalFast] {
            let n = simulate_resolver(r(1.0), t(0.0), &cfg(1e5, 2, mode)) as f64;
            assert!((n - 1e5).abs() <= 3.0 * 1e5f64.sqrt(), "{mode:?}: {n}");
        }
    }

    #[test]
    fn miss_rate_matches_renewal_mean() {
        for mode in [SimMode::EventDriven, SimMode::RenewalFast] {
            let d = 1.1e6;
            let n = simulate_resolver(r(1.0), t(10.0), &cfg(d, 3, mode)) as f64;
            let rate = n / d;
            assert!((rate - 1.0 / 11.0).abs() <= 0.02 / 11.0, "{mode:?}: {rate}");
        }
    }

    #[test]
    fn cold_start_counts_first_arrival() {
        // with a huge TTL only the very first arrival misses
        let c = cfg(1e3, 4, SimMode::EventDriven).with_initial_cache(CacheStart::Empty);
        assert_eq!(simulate_resolver(r(5.0), t(1e9), &c), 1);
        let c = cfg(1e3, 4, SimMode::RenewalFast).with_initial_cache(CacheStart::Empty);
        assert_eq!(simulate_resolver(r(5.0), t(1e9), &c), 1);
    }

    #[test]
    fn stationary_start_removes_cold_start_bias() {
        // 2,000 resolvers at lambda=1, tau=1000 over 1e5 s: a cold cache sees 100
        // misses where the steady-state rate predicts 99.9.
        let pop = RatePopulation::generate(DistributionSpec::Constant { rate: 1.0 }, 2000, 0, 0).unwrap();
        let expected = 2000.0 / 1001.0;
        let warm = simulate_authoritative_load(&pop, t(1000.0), &cfg(1e5, 5, SimMode::RenewalFast)).unwrap();
        let cold_cfg = cfg(1e5, 5, SimMode::RenewalFast).with_initial_cache(CacheStart::Empty);
        let cold = simulate_authoritative_load(&pop, t(1000.0), &cold_cfg).unwrap();
        let warm_bias = warm.aggregate_rate.value() / expected - 1.0;
        let cold_bias = cold.aggregate_rate.value() / expected - 1.0;
        assert!(warm_bias.abs() < 3e-4, "warm bias {warm_bias}");
        assert!(cold_bias > 5e-4, "cold bias {cold_bias}");
    }

    #[test]
    fn authoritative_load_examples() {
        let one = RatePopulation::generate(DistributionSpec::Constant { rate: 1.0 }, 1, 0, 0).unwrap();
        let res = simulate_authoritative_load(&one, t(0.0), &cfg(1e5, 6, SimMode::RenewalFast)).unwrap();
        assert!((res.aggregate_rate.value() - 1.0).abs() < 3.0 / 1e5f64.sqrt());

        let homog = RatePopulation::generate(DistributionSpec::Constant { rate: 1.0 }, 10_000, 0, 0).unwrap();
        let res = simulate_authoritative_load(&homog, t(1000.0), &cfg(1e5, 7, SimMode::RenewalFast)).unwrap();
        let want = 10_000.0 / 1001.0;
        assert!((res.aggregate_rate.value() / want - 1.0).abs() < 0.02);

        let rd1 = RatePopulation::generate(DistributionSpec::Constant { rate: 1.0 }, 10_000, 10_000, 0).unwrap();
        let res = simulate_authoritative_load(&rd1, t(1800.0), &cfg(1e5, 8, SimMode::RenewalFast)).unwrap();
        let want = 10_000.0 / 1801.0 + 10_000.0;
        assert!((res.aggregate_rate.value() / want - 1.0).abs() < 0.02);
        assert_eq!(res.per_source_counts.len(), 20_000);
        assert_eq!(res.total_count() as f64 / 1e5, res.aggregate_rate.value());
    }

    #[test]
    fn empty_population_and_bad_duration_rejected() {
        let pop = RatePopulation {
            resolver_rates: vec![],
            full_client_rates: vec![],
            spec: DistributionSpec::Constant { rate: 1.0 },
            seed: 0,
        };
        let c = cfg(10.0, 0, SimMode::RenewalFast);
        assert!(matches!(simulate_authoritative_load(&pop, t(1.0), &c), Err(SimError::EmptyPopulation)));
        assert!(SimConfig::new(0.0, 0, SimMode::RenewalFast).is_err());
        assert!(SimConfig::new(f64::NAN, 0, SimMode::RenewalFast).is_err());
    }

    #[test]
    fn per_source_rates() {
        let res = SimResult {
            ttl: t(1.0),
            duration: 100.0,
            per_source_counts: [10, 0, 990]
                .iter()
                .enumerate()
                .map(|(i, &count)| SourceCount { source_id: SourceId(i as u64), kind: SourceKind::Resolver, count })
                .collect(),
            aggregate_rate: r(10.0),
        };
        let rates: Vec<f64> = measure_per_source_rates(&res).iter().map(|s| s.rate.value()).collect();
        assert_eq!(rates, vec![0.1, 0.0, 9.9]);

        let single = SimResult {
            ttl: t(1.0),
            duration: 1000.0,
            per_source_counts: vec![SourceCount { source_id: SourceId(0), kind: SourceKind::Resolver, count: 500 }],
            aggregate_rate: r(0.5),
        };
        assert_eq!(measure_per_source_rates(&single)[0].rate.value(), 0.5);

        let empty = SimResult { per_source_counts: vec![], ..single };
        assert!(measure_per_source_rates(&empty).is_empty());
    }

    #[test]
    fn deterministic_regardless_of_thread_count() {
        let pop = RatePopulation::generate(DistributionSpec::Exponential { mean: 1.0 }, 3000, 1000, 11).unwrap();
        let c = cfg(1e4, 12, SimMode::RenewalFast);
        let a = simulate_authoritative_load(&pop, t(60.0), &c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_authoritative_load(&pop, t(60.0), &c).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn full_clients_ignore_ttl() {
        // with the same seed the full-client streams are identical at any TTL
        let pop = RatePopulation::generate(DistributionSpec::Exponential { mean: 1.0 }, 100, 100, 13).unwrap();
        let c = cfg(1e4, 14, SimMode::RenewalFast);
        let a = simulate_authoritative_load(&pop, t(10.0), &c).unwrap();
        let b = simulate_authoritative_load(&pop, t(3600.0), &c).unwrap();
        let clients = |r: &SimResult| -> Vec<u64> {
            r.per_source_counts.iter().filter(|c| c.kind == SourceKind::FullClient).map(|c| c.count).collect()
        };
        assert_eq!(clients(&a), clients(&b));
    }
}
