//! Closed-form load formulas of the uniform aggregate caching (UAC) model.
//!
//! A caching resolver that receives a Poisson stream of rate `a` and honours
//! a TTL of `tau` seconds forwards `a / (1 + a * tau)` queries per second to
//! the authoritative server. The UAC model replaces the heterogeneous
//! per-resolver rates by a single equivalent rate shared by all `N`
//! resolvers, optionally adding a TTL-independent full-client rate `D`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("TTL must be a finite non-negative number of seconds, got {0}")]
    InvalidTtl(f64),
    #[error("rate must be a finite non-negative number of queries per second, got {0}")]
    InvalidRate(f64),
    #[error("resolver count must be positive, got {0}")]
    InvalidResolverCount(f64),
    #[error("equivalent inbound rate must be positive, got {0}")]
    NonPositiveInboundRate(f64),
}

/// Record TTL in seconds. Zero disables caching.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TtlSeconds(f64);

impl TtlSeconds {
    pub const ZERO: TtlSeconds = TtlSeconds(0.0);

    pub fn new(seconds: f64) -> Result<Self, ModelError> {
        if seconds.is_finite() && seconds >= 0.0 {
            Ok(TtlSeconds(seconds))
        } else {
            Err(ModelError::InvalidTtl(seconds))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TtlSeconds {
    type Error = ModelError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        TtlSeconds::new(v)
    }
}

impl From<TtlSeconds> for f64 {
    fn from(t: TtlSeconds) -> f64 {
        t.0
    }
}

/// Query rate in queries per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Rate(f64);

impl Rate {
    pub const ZERO: Rate = Rate(0.0);

    pub fn new(qps: f64) -> Result<Self, ModelError> {
        if qps.is_finite() && qps >= 0.0 {
            Ok(Rate(qps))
        } else {
            Err(ModelError::InvalidRate(qps))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Rate {
    type Error = ModelError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Rate::new(v)
    }
}

impl From<Rate> for f64 {
    fn from(r: Rate) -> f64 {
        r.0
    }
}

/// Parameters of the stub-client-only model: `N` resolvers sharing the
/// equivalent inbound rate `a_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StubOnlyParams {
    n_resolvers: u64,
    a_tilde: Rate,
}

impl StubOnlyParams {
    pub fn new(n_resolvers: u64, a_tilde: Rate) -> Result<Self, ModelError> {
        if n_resolvers == 0 {
            return Err(ModelError::InvalidResolverCount(0.0));
        }
        if a_tilde.value() <= 0.0 {
            return Err(ModelError::NonPositiveInboundRate(a_tilde.value()));
        }
        Ok(StubOnlyParams { n_resolvers, a_tilde })
    }

    pub fn n_resolvers(&self) -> u64 {
        self.n_resolvers
    }

    pub fn a_tilde(&self) -> Rate {
        self.a_tilde
    }
}

/// Parameters of the stub-client plus full-client model. The resolver count
/// is real valued because the three-measurement fit does not produce an
/// integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullModelParams {
    n_resolvers: f64,
    a_tilde: Rate,
    d_full: Rate,
}

impl FullModelParams {
    pub fn new(n_resolvers: f64, a_tilde: Rate, d_full: Rate) -> Result<Self, ModelError> {
        if !(n_resolvers.is_finite() && n_resolvers > 0.0) {
            return Err(ModelError::InvalidResolverCount(n_resolvers));
        }
        if a_tilde.value() <= 0.0 {
            return Err(ModelError::NonPositiveInboundRate(a_tilde.value()));
        }
        Ok(FullModelParams { n_resolvers, a_tilde, d_full })
    }

    pub fn n_resolvers(&self) -> f64 {
        self.n_resolvers
    }

    pub fn a_tilde(&self) -> Rate {
        self.a_tilde
    }

    pub fn d_full(&self) -> Rate {
        self.d_full
    }
}

/// An observed `(TTL, aggregate inbound rate)` pair at the authoritative server.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPoint {
    pub ttl: TtlSeconds,
    pub observed_rate: Rate,
}

impl MeasurementPoint {
    pub fn new(ttl: f64, observed_rate: f64) -> Result<Self, ModelError> {
        Ok(MeasurementPoint { ttl: TtlSeconds::new(ttl)?, observed_rate: Rate::new(observed_rate)? })
    }
}

/// Compensated (Neumaier) summation; the sum of many tiny per-client rates
/// stays accurate to a few ulps.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Total inbound rate of one caching resolver from the rates of its stub clients.
pub fn aggregate_incoming_rate(client_rates: &[Rate]) -> Rate {
    Rate(compensated_sum(client_rates.iter().map(|r| r.0)))
}

/// Total rate of the full clients that bypass the caches.
pub fn aggregate_full_client_rate(client_rates: &[Rate]) -> Rate {
    aggregate_incoming_rate(client_rates)
}

/// Outbound (cache-miss) rate of a resolver with inbound rate `a` and TTL `tau`.
#[inline]
pub fn cache_output_rate(a: Rate, tau: TtlSeconds) -> Rate {
    Rate(a.0 / (1.0 + a.0 * tau.0))
}

/// Authoritative load of the stub-only UAC model.
#[inline]
pub fn stub_only_load(params: &StubOnlyParams, tau: TtlSeconds) -> Rate {
    Rate(params.n_resolvers as f64 * cache_output_rate(params.a_tilde, tau).0)
}

/// Authoritative load of the UAC model with full clients.
#[inline]
pub fn full_model_load(params: &FullModelParams, tau: TtlSeconds) -> Rate {
    Rate(params.n_resolvers * cache_output_rate(params.a_tilde, tau).0 + params.d_full.0)
}

/// Exact aggregate miss rate of a heterogeneous resolver population plus the
/// full-client total, i.e. the sum of the per-resolver cache output rates.
pub fn heterogeneous_load(resolver_rates: &[Rate], full_client_total: Rate, tau: TtlSeconds) -> Rate {
    let stub = compensated_sum(resolver_rates.iter().map(|a| cache_output_rate(*a, tau).0));
    Rate(stub + full_client_total.0)
}
