use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::gsa::{BoxCheck, GsaMethod};
use crate::model::TtlSeconds;
use crate::sim::{CacheStart, DistributionSpec, SimConfig, SimMode};

/// Schema version accepted in the `version` field of every configuration.
pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_DURATION: f64 = 1e5;
pub const DEFAULT_ESTIMATION_TTL: f64 = 1800.0;
pub const DEFAULT_MEASUREMENT_TTLS: [f64; 5] = [0.0, 60.0, 300.0, 1000.0, 3600.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    StubOnly,
    TwoMeasurement,
    ThreeMeasurement,
}

impl Method {
    pub fn measurement_count(self) -> usize {
        match self {
            Method::StubOnly => 1,
            Method::TwoMeasurement => 2,
            Method::ThreeMeasurement => 3,
        }
    }
}

/// Where measured loads (or ground truth) come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementSource {
    /// Counted from simulated Poisson traffic.
    #[default]
    Simulated,
    /// Exact expected rates: each resolver's cache output rate, summed.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default)]
    pub mode: SimMode,
    #[serde(default)]
    pub initial_cache: CacheStart,
}

fn default_duration() -> f64 {
    DEFAULT_DURATION
}

fn default_estimation_ttl() -> f64 {
    DEFAULT_ESTIMATION_TTL
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings { duration: DEFAULT_DURATION, mode: SimMode::default(), initial_cache: CacheStart::default() }
    }
}

impl SimSettings {
    pub fn to_config(&self, seed: u64) -> Result<SimConfig, ExperimentError> {
        Ok(SimConfig::new(self.duration, seed, self.mode)?.with_initial_cache(self.initial_cache))
    }
}

/// Two TTL axes swept as a full cross product. Their meaning depends on the method:
///
/// | method | `first` | `second` |
/// |---|---|---|
/// | stub-only | measurement TTL | estimation TTL |
/// | two-measurement | τ1 | τ2 |
/// | three-measurement | τ2 | τ3 (τ1 is `measurement_ttls[0]`) |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl GridSpec {
    /// Default sweep around the base point of a method.
    pub fn default_for(method: Method) -> Self {
        let sweep = DEFAULT_MEASUREMENT_TTLS.to_vec();
        match method {
            Method::StubOnly => GridSpec { first: sweep, second: vec![DEFAULT_ESTIMATION_TTL] },
            Method::TwoMeasurement => GridSpec { first: vec![0.0, 60.0, 300.0, 1000.0], second: vec![3600.0] },
            Method::ThreeMeasurement => GridSpec { first: vec![0.0, 60.0, 300.0], second: vec![3600.0] },
        }
    }
}

/// A validation scenario, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub seed: u64,
    pub method: Method,
    pub distribution: DistributionSpec,
    pub n_resolvers: usize,
    #[serde(default)]
    pub n_full_clients: usize,
    /// Base measurement TTLs, one per measurement the method takes.
    pub measurement_ttls: Vec<f64>,
    #[serde(default = "default_estimation_ttl")]
    pub estimation_ttl: f64,
    #[serde(default)]
    pub sim: SimSettings,
    /// Sweep; without it the base point alone is evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub measurement: MeasurementSource,
    #[serde(default)]
    pub truth: MeasurementSource,
}

fn check_ttl(what: &str, v: f64) -> Result<(), ExperimentError> {
    TtlSeconds::new(v).map(|_| ()).map_err(|e| ExperimentError::Config(format!("{what}: {e}")))
}

fn check_version(v: u32) -> Result<(), ExperimentError> {
    if v == CONFIG_VERSION {
        Ok(())
    } else {
        Err(ExperimentError::Config(format!("unsupported config version {v}, expected {CONFIG_VERSION}")))
    }
}

impl ScenarioConfig {
    /// A scenario with default simulation settings and no sweep.
    pub fn new(
        method: Method,
        distribution: DistributionSpec,
        n_resolvers: usize,
        n_full_clients: usize,
        measurement_ttls: Vec<f64>,
        seed: u64,
    ) -> Self {
        ScenarioConfig {
            version: CONFIG_VERSION,
            seed,
            method,
            distribution,
            n_resolvers,
            n_full_clients,
            measurement_ttls,
            estimation_ttl: DEFAULT_ESTIMATION_TTL,
            sim: SimSettings::default(),
            grid: None,
            measurement: MeasurementSource::Simulated,
            truth: MeasurementSource::Simulated,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_version(self.version)?;
        self.distribution.validate()?;
        if self.n_resolvers == 0 {
            return Err(ExperimentError::Config("n_resolvers must be at least 1".into()));
        }
        if self.method == Method::StubOnly && self.n_full_clients > 0 {
            return Err(ExperimentError::Config("the stub-only method assumes no full clients".into()));
        }
        let k = self.method.measurement_count();
        if self.measurement_ttls.len() != k {
            return Err(ExperimentError::Config(format!(
                "method {:?} takes {k} measurement TTLs, got {}",
                self.method,
                self.measurement_ttls.len()
            )));
        }
        for &t in &self.measurement_ttls {
            check_ttl("measurement TTL", t)?;
        }
        check_ttl("estimation TTL", self.estimation_ttl)?;
        if let Some(g) = &self.grid {
            if g.first.is_empty() || g.second.is_empty() {
                return Err(ExperimentError::Config("grid axes must be non-empty".into()));
            }
            for &t in g.first.iter().chain(&g.second) {
                check_ttl("grid TTL", t)?;
            }
        }
        self.sim.to_config(0).map(|_| ())
    }

    /// The swept axes, or the base point as a one-by-one grid.
    pub fn effective_grid(&self) -> GridSpec {
        if let Some(g) = &self.grid {
            return g.clone();
        }
        let t = &self.measurement_ttls;
        match self.method {
            Method::StubOnly => GridSpec { first: vec![t[0]], second: vec![self.estimation_ttl] },
            Method::TwoMeasurement => GridSpec { first: vec![t[0]], second: vec![t[1]] },
            Method::ThreeMeasurement => GridSpec { first: vec![t[1]], second: vec![t[2]] },
        }
    }
}

/// One forward simulation of a population at a single TTL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationScenario {
    pub version: u32,
    pub seed: u64,
    pub distribution: DistributionSpec,
    pub n_resolvers: usize,
    #[serde(default)]
    pub n_full_clients: usize,
    pub ttl: f64,
    #[serde(default)]
    pub sim: SimSettings,
}

impl SimulationScenario {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: SimulationScenario = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_version(self.version)?;
        self.distribution.validate()?;
        if self.n_resolvers + self.n_full_clients == 0 {
            return Err(ExperimentError::Config("population is empty".into()));
        }
        check_ttl("ttl", self.ttl)?;
        self.sim.to_config(0).map(|_| ())
    }
}

fn default_gsa_resolvers() -> usize {
    100_000
}
fn default_gsa_distribution() -> DistributionSpec {
    DistributionSpec::Zipf { alpha: 1.0 }
}
fn default_tau0() -> f64 {
    1800.0
}
fn default_tau_star() -> f64 {
    3600.0
}
fn default_box_check() -> BoxCheck {
    BoxCheck::ClosedForm
}
fn default_eet_trajectories() -> usize {
    6000
}
fn default_fast_samples() -> usize {
    3185
}
fn default_vbsa_samples() -> usize {
    6000
}
fn default_n_boot() -> usize {
    1000
}

/// Sensitivity analysis of the single-measurement predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsaScenario {
    pub version: u32,
    pub seed: u64,
    pub method: GsaMethod,
    #[serde(default = "default_gsa_distribution")]
    pub distribution: DistributionSpec,
    #[serde(default = "default_gsa_resolvers")]
    pub n_resolvers: usize,
    #[serde(default = "default_tau0")]
    pub tau0: f64,
    #[serde(default = "default_tau_star")]
    pub tau_star: f64,
    #[serde(default = "default_box_check")]
    pub box_check: BoxCheck,
    #[serde(default = "default_eet_trajectories")]
    pub eet_trajectories: usize,
    #[serde(default = "default_fast_samples")]
    pub fast_samples: usize,
    #[serde(default = "default_vbsa_samples")]
    pub vbsa_samples: usize,
    #[serde(default = "default_n_boot")]
    pub n_boot: usize,
}

impl GsaScenario {
    /// 100,000 Zipf resolvers, ±10% box, 6,000 / 3,185 / 6,000 base samples
    /// and 1,000 bootstrap replicates.
    pub fn standard(method: GsaMethod, seed: u64) -> Self {
        GsaScenario {
            version: CONFIG_VERSION,
            seed,
            method,
            distribution: default_gsa_distribution(),
            n_resolvers: default_gsa_resolvers(),
            tau0: default_tau0(),
            tau_star: default_tau_star(),
            box_check: default_box_check(),
            eet_trajectories: default_eet_trajectories(),
            fast_samples: default_fast_samples(),
            vbsa_samples: default_vbsa_samples(),
            n_boot: default_n_boot(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: GsaScenario = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_version(self.version)?;
        self.distribution.validate()?;
        if self.n_resolvers == 0 {
            return Err(ExperimentError::Config("n_resolvers must be at least 1".into()));
        }
        check_ttl("tau0", self.tau0)?;
        check_ttl("tau_star", self.tau_star)
    }
}
