use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Uniform, Weibull};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::model::{compensated_sum, Rate};
use crate::seed::{self, stream};

/// Distribution of per-source mean query rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Exponential {
        mean: f64,
    },
    Uniform {
        lower: f64,
        upper: f64,
    },
    Lognormal {
        mu: f64,
        sigma: f64,
    },
    Weibull {
        scale: f64,
        shape: f64,
    },
    /// Rank-based rates `C·i^(−alpha)` normalised to a mean of 1 qps.
    Zipf {
        alpha: f64,
    },
    /// Every source has the same rate (homogeneous population).
    Constant {
        rate: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Exponential,
    Uniform,
    Lognormal,
    Weibull,
    Zipf,
    Constant,
}

impl DistributionKind {
    pub const MEAN_ONE_KINDS: [DistributionKind; 5] = [
        DistributionKind::Exponential,
        DistributionKind::Uniform,
        DistributionKind::Lognormal,
        DistributionKind::Weibull,
        DistributionKind::Zipf,
    ];
}

impl DistributionSpec {
    /// Parameterisation with a population mean of 1 qps.
    pub fn mean_one(kind: DistributionKind) -> Self {
        match kind {
            DistributionKind::Exponential => DistributionSpec::Exponential { mean: 1.0 },
            DistributionKind::Uniform => DistributionSpec::Uniform { lower: 0.0, upper: 2.0 },
            DistributionKind::Lognormal => DistributionSpec::Lognormal { mu: -0.5493, sigma: 1.0481 },
            DistributionKind::Weibull => DistributionSpec::Weibull { scale: 1.09, shape: 5.0 },
            DistributionKind::Zipf => DistributionSpec::Zipf { alpha: 1.0 },
            DistributionKind::Constant => DistributionSpec::Constant { rate: 1.0 },
        }
    }

    pub fn kind(&self) -> DistributionKind {
        match self {
            DistributionSpec::Exponential { .. } => DistributionKind::Exponential,
            DistributionSpec::Uniform { .. } => DistributionKind::Uniform,
            DistributionSpec::Lognormal { .. } => DistributionKind::Lognormal,
            DistributionSpec::Weibull { .. } => DistributionKind::Weibull,
            DistributionSpec::Zipf { .. } => DistributionKind::Zipf,
            DistributionSpec::Constant { .. } => DistributionKind::Constant,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::InvalidParams(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            DistributionSpec::Exponential { mean } => positive("mean", mean),
            DistributionSpec::Uniform { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite() && lower >= 0.0 && lower < upper) {
                    return Err(SimError::InvalidParams(format!(
                        "uniform bounds must satisfy 0 <= lower < upper, got ({lower}, {upper})"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Lognormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(SimError::InvalidParams(format!("mu must be finite, got {mu}")));
                }
                positive("sigma", sigma)
            }
            DistributionSpec::Weibull { scale, shape } => positive("scale", scale).and(positive("shape", shape)),
            DistributionSpec::Zipf { alpha } => positive("alpha", alpha),
            DistributionSpec::Constant { rate } => {
                if rate.is_finite() && rate >= 0.0 {
                    Ok(())
                } else {
                    Err(SimError::InvalidParams(format!("rate must be non-negative, got {rate}")))
                }
            }
        }
    }
}

/// Draws `n` per-source rates. Continuous kinds are sampled i.i.d. from a
/// ChaCha stream keyed by `seed`; Zipf and Constant are deterministic.
pub fn sample_population(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<Rate>, SimError> {
    if n == 0 {
        return Err(SimError::InvalidParams("population size must be at least 1".into()));
    }
    sample_any(spec, n, seed)
}

fn sample_any(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<Rate>, SimError> {
    spec.validate()?;
    let mut rng = seed::rng(seed);
    let bad = |e: &dyn std::fmt::Display| SimError::InvalidParams(e.to_string());
    let raw: Vec<f64> = match *spec {
        DistributionSpec::Exponential { mean } => {
            let d = Exp::new(1.0 / mean).map_err(|e| bad(&e))?;
            draw(&d, &mut rng, n)
        }
        DistributionSpec::Uniform { lower, upper } => {
            let d = Uniform::new(lower, upper).map_err(|e| bad(&e))?;
            draw(&d, &mut rng, n)
        }
        DistributionSpec::Lognormal { mu, sigma } => {
            let d = LogNormal::new(mu, sigma).map_err(|e| bad(&e))?;
            draw(&d, &mut rng, n)
        }
        DistributionSpec::Weibull { scale, shape } => {
            let d = Weibull::new(scale, shape).map_err(|e| bad(&e))?;
            draw(&d, &mut rng, n)
        }
        DistributionSpec::Zipf { alpha } => return Ok(zipf_rates(n, alpha)),
        DistributionSpec::Constant { rate } => vec![rate; n],
    };
    raw.into_iter().map(|v| Rate::new(v).map_err(|e| bad(&e))).collect()
}

fn draw<D: Distribution<f64>, R: Rng>(d: &D, rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Rank-based Zipf rates `C·i^(−alpha)` for `i = 1..=n`, with
/// `C = n / Σ i^(−alpha)` so that the mean rate is exactly 1 qps.
pub fn zipf_rates(n: usize, alpha: f64) -> Vec<Rate> {
    if n == 0 {
        return Vec::new();
    }
    let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-alpha)).collect();
    let c = n as f64 / compensated_sum(weights.iter().copied());
    weights.into_iter().map(|w| Rate::new(c * w).unwrap_or(Rate::ZERO)).collect()
}

/// Per-source mean rates of a resolver population and its full clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePopulation {
    pub resolver_rates: Vec<Rate>,
    pub full_client_rates: Vec<Rate>,
    pub spec: DistributionSpec,
    pub seed: u64,
}

impl RatePopulation {
    /// Draws both groups from `spec`, each from its own stream below `seed`.
    pub fn generate(
        spec: DistributionSpec,
        n_resolvers: usize,
        n_full_clients: usize,
        seed: u64,
    ) -> Result<Self, SimError> {
        let resolver_rates = sample_population(&spec, n_resolvers, seed::derive(seed, stream::RESOLVERS))?;
        let full_client_rates = if n_full_clients == 0 {
            Vec::new()
        } else {
            sample_any(&spec, n_full_clients, seed::derive(seed, stream::FULL_CLIENTS))?
        };
        Ok(RatePopulation { resolver_rates, full_client_rates, spec, seed })
    }

    pub fn n_resolvers(&self) -> usize {
        self.resolver_rates.len()
    }

    pub fn n_full_clients(&self) -> usize {
        self.full_client_rates.len()
    }

    pub fn len(&self) -> usize {
        self.n_resolvers() + self.n_full_clients()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn full_client_total(&self) -> Rate {
        crate::model::aggregate_full_client_rate(&self.full_client_rates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(v: &[Rate]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().map(|r| r.value()).sum::<f64>() / n;
        let var = v.iter().map(|r| (r.value() - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, var)
    }

    #[test]
    fn exponential_mean() {
        let v = sample_population(&DistributionSpec::mean_one(DistributionKind::Exponential), 100_000, 3).unwrap();
        let (m, _) = mean_var(&v);
        assert!((m - 1.0).abs() < 0.01, "mean {m}");
    }

    #[test]
    fn lognormal_mean_and_variance() {
        let v = sample_population(&DistributionSpec::mean_one(DistributionKind::Lognormal), 200_000, 5).unwrap();
        let (m, var) = mean_var(&v);
        assert!((m - 1.0).abs() < 0.05, "mean {m}");
        assert!((var - 2.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn weibull_mean() {
        let expected = 1.09 * statrs::function::gamma::gamma(1.2);
        assert!((expected - 1.0008).abs() < 1e-4);
        let v = sample_population(&DistributionSpec::mean_one(DistributionKind::Weibull), 100_000, 9).unwrap();
        let (m, _) = mean_var(&v);
        assert!((m - expected).abs() < 0.01 * expected, "mean {m}");
    }

    #[test]
    fn uniform_mean_and_bounds() {
        let v = sample_population(&DistributionSpec::mean_one(DistributionKind::Uniform), 100_000, 1).unwrap();
        assert!(v.iter().all(|r| (0.0..2.0).contains(&r.value())));
        let (m, _) = mean_var(&v);
        assert!((m - 1.0).abs() < 0.011, "mean {m}");
    }

    #[test]
    fn zipf_examples() {
        assert_eq!(zipf_rates(1, 0.7), vec![Rate::new(1.0).unwrap()]);
        let three: Vec<f64> = zipf_rates(3, 1.0).iter().map(|r| r.value()).collect();
        for (got, want) in three.iter().zip([18.0 / 11.0, 9.0 / 11.0, 6.0 / 11.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let big = zipf_rates(100_000, 1.0);
        let mean = compensated_sum(big.iter().map(|r| r.value())) / 100_000.0;
        assert!((mean - 1.0).abs() < 1e-12);
        assert!(big.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn invalid_params() {
        for spec in [
            DistributionSpec::Exponential { mean: 0.0 },
            DistributionSpec::Uniform { lower: 2.0, upper: 1.0 },
            DistributionSpec::Uniform { lower: -1.0, upper: 1.0 },
            DistributionSpec::Lognormal { mu: 0.0, sigma: -1.0 },
            DistributionSpec::Weibull { scale: 1.0, shape: 0.0 },
            DistributionSpec::Zipf { alpha: 0.0 },
            DistributionSpec::Constant { rate: -1.0 },
        ] {
            assert!(matches!(sample_population(&spec, 10, 0), Err(SimError::InvalidParams(_))), "{spec:?}");
        }
        assert!(sample_population(&DistributionSpec::Zipf { alpha: 1.0 }, 0, 0).is_err());
    }

    #[test]
    fn reproducible_from_seed() {
        let spec = DistributionSpec::mean_one(DistributionKind::Lognormal);
        let a = RatePopulation::generate(spec, 1000, 500, 77).unwrap();
        let b = RatePopulation::generate(spec, 1000, 500, 77).unwrap();
        assert_eq!(a, b);
        let c = RatePopulation::generate(spec, 1000, 500, 78).unwrap();
        assert_ne!(a.resolver_rates, c.resolver_rates);
        assert_ne!(a.resolver_rates[..500], a.full_client_rates[..]);
    }

    #[test]
    fn serde_shape() {
        let spec: DistributionSpec = serde_json::from_str(r#"{"kind":"weibull","scale":1.09,"shape":5}"#).unwrap();
        assert_eq!(spec, DistributionSpec::mean_one(DistributionKind::Weibull));
        assert!(serde_json::from_str::<DistributionSpec>(r#"{"kind":"weibull","scale":1.0}"#).is_err());
    }
}
