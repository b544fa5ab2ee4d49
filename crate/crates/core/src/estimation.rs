//! Inversion of the UAC model from authoritative-side measurements.
//!
//! One measurement plus a known resolver count fixes the equivalent inbound
//! rate. Two measurements plus a resolver count fix the inbound rate and the
//! full-client rate; the resolver count itself comes from clustering the
//! requestors by how strongly their rate reacts to a TTL change. Three
//! measurements fix all three parameters without clustering.
//!
//! All systems are solved in closed form after eliminating the full-client
//! term by differencing.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{cache_output_rate, MeasurementPoint, Rate, TtlSeconds};

/// Guards the relative-change metric against division by zero, in qps.
pub const CHANGE_EPSILON: f64 = 1e-9;
/// Minimum relative gap between the two cluster centroids.
pub const MIN_CENTROID_SEPARATION: f64 = 0.10;
/// Tolerance, relative to the largest measured load, under which a slightly
/// negative full-client rate is attributed to noise and clamped to zero.
pub const NEGATIVE_D_TOLERANCE: f64 = 1e-6;
/// Relative size under which a load difference is treated as zero.
const ZERO_DIFFERENCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("observed rate {observed} at TTL {ttl} s exceeds the saturation ceiling N/TTL of {n} resolvers")]
    InfeasibleMeasurement { ttl: f64, observed: f64, n: f64 },
    #[error("observed rates must be positive")]
    NonPositiveRate,
    #[error("resolver count must be positive, got {0}")]
    InvalidResolverCount(f64),
    #[error("measurement TTLs must be pairwise distinct")]
    DegenerateTtls,
    #[error("no root with positive inbound rate and non-negative full-client rate")]
    NoFeasibleRoot,
    #[error("two admissible roots: {first:?} and {second:?}")]
    AmbiguousSolution { first: Box<UacEstimate>, second: Box<UacEstimate> },
    #[error("measurements are inconsistent with the model (N={n}, A={a}, D={d})")]
    InconsistentMeasurements { n: f64, a: f64, d: f64 },
    #[error("load does not change with TTL; cannot separate caching and full-client traffic")]
    ZeroDifference,
    #[error("requestor clusters are not separable (centroids {low} and {high})")]
    UnseparableClusters { low: f64, high: f64 },
    #[error("at least two requestor observations are required")]
    TooFewObservations,
    #[error("no requestor was classified as a caching resolver")]
    ZeroResolvers,
}

impl EstimationError {
    /// Variant name, stable across releases; used in reports and messages.
    pub fn name(&self) -> &'static str {
        match self {
            EstimationError::InfeasibleMeasurement { .. } => "InfeasibleMeasurement",
            EstimationError::NonPositiveRate => "NonPositiveRate",
            EstimationError::InvalidResolverCount(_) => "InvalidResolverCount",
            EstimationError::DegenerateTtls => "DegenerateTtls",
            EstimationError::NoFeasibleRoot => "NoFeasibleRoot",
            EstimationError::AmbiguousSolution { .. } => "AmbiguousSolution",
            EstimationError::InconsistentMeasurements { .. } => "InconsistentMeasurements",
            EstimationError::ZeroDifference => "ZeroDifference",
            EstimationError::UnseparableClusters { .. } => "UnseparableClusters",
            EstimationError::TooFewObservations => "TooFewObservations",
            EstimationError::ZeroResolvers => "ZeroResolvers",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateSource {
    SingleMeasurement,
    TwoMeasurement,
    ThreeMeasurement,
}

/// Fitted UAC parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UacEstimate {
    pub n_tilde: f64,
    pub a_tilde: Rate,
    pub d_tilde: Rate,
    pub source: EstimateSource,
}

impl UacEstimate {
    /// Load predicted at `tau` by the fitted model.
    pub fn predict(&self, tau: TtlSeconds) -> Rate {
        predict_full(self, tau)
    }
}

/// Identifier of a requestor (resolver or full client) as seen by the server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceId(pub u64);

impl std::fmt::Display for SourceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Rates of one requestor measured under two different TTLs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequestorObservation {
    pub source_id: SourceId,
    pub rate_at_tau1: Rate,
    pub rate_at_tau2: Rate,
}

impl RequestorObservation {
    /// Relative rate change between the two TTLs.
    pub fn relative_change(&self) -> f64 {
        let (r1, r2) = (self.rate_at_tau1.value(), self.rate_at_tau2.value());
        (r1 - r2).abs() / r1.max(r2).max(CHANGE_EPSILON)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RequestorPartition {
    pub resolvers: BTreeSet<SourceId>,
    pub full_clients: BTreeSet<SourceId>,
}

/// Equivalent inbound rate from one measurement and a known resolver count.
pub fn invert_single_measurement(m: MeasurementPoint, n_resolvers: f64) -> Result<UacEstimate, EstimationError> {
    if !(n_resolvers.is_finite() && n_resolvers > 0.0) {
        return Err(EstimationError::InvalidResolverCount(n_resolvers));
    }
    let b = m.observed_rate.value();
    if b <= 0.0 {
        return Err(EstimationError::NonPositiveRate);
    }
    let tau0 = m.ttl.value();
    let denom = n_resolvers - b * tau0;
    if denom <= 0.0 {
        return Err(EstimationError::InfeasibleMeasurement { ttl: tau0, observed: b, n: n_resolvers });
    }
    Ok(UacEstimate {
        n_tilde: n_resolvers,
        a_tilde: Rate::new(b / denom).map_err(|_| EstimationError::NoFeasibleRoot)?,
        d_tilde: Rate::ZERO,
        source: EstimateSource::SingleMeasurement,
    })
}

/// Stub-only prediction; the full-client term of the estimate is ignored.
pub fn predict_stub_only(estimate: &UacEstimate, tau_star: TtlSeconds) -> Rate {
    Rate::new(estimate.n_tilde * cache_output_rate(estimate.a_tilde, tau_star).value()).unwrap_or(Rate::ZERO)
}

/// Prediction of the full model.
pub fn predict_full(estimate: &UacEstimate, tau_star: TtlSeconds) -> Rate {
    let stub = estimate.n_tilde * cache_output_rate(estimate.a_tilde, tau_star).value();
    Rate::new(stub + estimate.d_tilde.value()).unwrap_or(Rate::ZERO)
}

fn sorted_by_ttl<const K: usize>(mut ms: [MeasurementPoint; K]) -> Result<[MeasurementPoint; K], EstimationError> {
    ms.sort_by(|a, b| a.ttl.value().total_cmp(&b.ttl.value()));
    if ms.windows(2).any(|w| w[0].ttl.value() == w[1].ttl.value()) {
        return Err(EstimationError::DegenerateTtls);
    }
    if ms.iter().any(|m| m.observed_rate.value() <= 0.0) {
        return Err(EstimationError::NonPositiveRate);
    }
    Ok(ms)
}

fn stub_term(n: f64, a: f64, tau: f64) -> f64 {
    n * a / (1.0 + a * tau)
}

/// Clamp noise-level negative full-client rates to zero; reject anything larger.
fn admissible_d(d: f64, scale: f64) -> Option<f64> {
    if d >= 0.0 {
        Some(d)
    } else if d >= -NEGATIVE_D_TOLERANCE * scale {
        Some(0.0)
    } else {
        None
    }
}

/// Solve for `(A, D)` given two measurements and a resolver count.
///
/// Differencing the two load equations removes `D` and leaves
/// `[Δ·τ1·τ2 − N(τ2−τ1)]·A² + Δ(τ1+τ2)·A + Δ = 0` with `Δ = B(τ1) − B(τ2)`.
pub fn solve_two_measurement(
    m1: MeasurementPoint,
    m2: MeasurementPoint,
    n_resolvers: f64,
) -> Result<UacEstimate, EstimationError> {
    if !(n_resolvers.is_finite() && n_resolvers > 0.0) {
        return Err(EstimationError::InvalidResolverCount(n_resolvers));
    }
    let [p1, p2] = sorted_by_ttl([m1, m2])?;
    let (t1, t2) = (p1.ttl.value(), p2.ttl.value());
    let (b1, b2) = (p1.observed_rate.value(), p2.observed_rate.value());
    let scale = b1.max(b2);
    let delta = b1 - b2;
    if delta <= ZERO_DIFFERENCE_TOLERANCE * scale {
        // load must strictly drop as the TTL grows
        return Err(EstimationError::NoFeasibleRoot);
    }

    let qa = delta * t1 * t2 - n_resolvers * (t2 - t1);
    let qb = delta * (t1 + t2);
    let qc = delta;

    let mut roots = Vec::with_capacity(2);
    if qa == 0.0 {
        if qb != 0.0 {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            // numerically stable pair of roots
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            if q != 0.0 {
                roots.push(q / qa);
                roots.push(qc / q);
            } else {
                roots.push(0.0);
            }
        }
    }

    let mut admissible: Vec<(UacEstimate, f64)> = Vec::new();
    for a in roots.into_iter().filter(|a| a.is_finite() && *a > 0.0) {
        // recover D from the equation with the smaller stub term
        let d_raw = b2 - stub_term(n_resolvers, a, t2);
        let Some(d) = admissible_d(d_raw, scale) else { continue };
        let residual =
            (stub_term(n_resolvers, a, t1) + d - b1).powi(2) + (stub_term(n_resolvers, a, t2) + d - b2).powi(2);
        let est = UacEstimate {
            n_tilde: n_resolvers,
            a_tilde: Rate::new(a).map_err(|_| EstimationError::NoFeasibleRoot)?,
            d_tilde: Rate::new(d).map_err(|_| EstimationError::NoFeasibleRoot)?,
            source: EstimateSource::TwoMeasurement,
        };
        admissible.push((est, residual));
    }

    match admissible.len() {
        0 => Err(EstimationError::NoFeasibleRoot),
        1 => Ok(admissible[0].0),
        _ => {
            admissible.sort_by(|x, y| x.1.total_cmp(&y.1));
            let tol = 1e-18 * scale * scale;
            if admissible[1].1 - admissible[0].1 > tol {
                Ok(admissible[0].0)
            } else {
                Err(EstimationError::AmbiguousSolution {
                    first: Box::new(admissible[0].0),
                    second: Box::new(admissible[1].0),
                })
            }
        }
    }
}

/// Solve for `(N, A, D)` from three measurements at distinct TTLs.
///
/// With `Δ1j = B(τ1) − B(τj)` and `R = Δ12/Δ13`, the system reduces to
/// `A·[R(τ3−τ1)τ2 − (τ2−τ1)τ3] = (τ2−τ1) − R(τ3−τ1)`.
pub fn solve_three_measurement(
    m1: MeasurementPoint,
    m2: MeasurementPoint,
    m3: MeasurementPoint,
) -> Result<UacEstimate, EstimationError> {
    let [p1, p2, p3] = sorted_by_ttl([m1, m2, m3])?;
    let (t1, t2, t3) = (p1.ttl.value(), p2.ttl.value(), p3.ttl.value());
    let (b1, b2, b3) = (p1.observed_rate.value(), p2.observed_rate.value(), p3.observed_rate.value());
    let scale = b1.max(b2).max(b3);
    let d12 = b1 - b2;
    let d13 = b1 - b3;
    if d12.abs() <= ZERO_DIFFERENCE_TOLERANCE * scale || d13.abs() <= ZERO_DIFFERENCE_TOLERANCE * scale {
        return Err(EstimationError::ZeroDifference);
    }
    let ratio = d12 / d13;
    let coeff = ratio * (t3 - t1) * t2 - (t2 - t1) * t3;
    let rhs = (t2 - t1) - ratio * (t3 - t1);
    let a = rhs / coeff;
    let n = d12 * (1.0 + a * t1) * (1.0 + a * t2) / (a * a * (t2 - t1));
    let inconsistent = |d: f64| EstimationError::InconsistentMeasurements { n, a, d };
    if !(a.is_finite() && a > 0.0 && n.is_finite() && n > 0.0) {
        return Err(inconsistent(f64::NAN));
    }
    let d_raw = b3 - stub_term(n, a, t3);
    let d = admissible_d(d_raw, scale).ok_or_else(|| inconsistent(d_raw))?;
    Ok(UacEstimate {
        n_tilde: n,
        a_tilde: Rate::new(a).map_err(|_| inconsistent(d))?,
        d_tilde: Rate::new(d).map_err(|_| inconsistent(d))?,
        source: EstimateSource::ThreeMeasurement,
    })
}

/// Split requestors into caching resolvers and full clients by 2-means
/// clustering of their relative rate change between two TTLs.
///
/// The cluster with the larger centroid is the resolver cluster. Centroids
/// start at the minimum and maximum change and are iterated to a fixed point.
pub fn classify_requestors(observations: &[RequestorObservation]) -> Result<RequestorPartition, EstimationError> {
    if observations.len() < 2 {
        return Err(EstimationError::TooFewObservations);
    }
    // sort so that the centroid sums do not depend on the input order
    let mut points: Vec<(f64, SourceId)> = observations.iter().map(|o| (o.relative_change(), o.source_id)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut low = points[0].0;
    let mut high = points[points.len() - 1].0;
    if high - low < MIN_CENTROID_SEPARATION * high || high == low {
        return Err(EstimationError::UnseparableClusters { low, high });
    }

    // In 1-D the clusters are a prefix and a suffix of the sorted points;
    // `split` is the index of the first point assigned to the high cluster.
    let mut split = points.len();
    for _ in 0..points.len() + 1 {
        let threshold = 0.5 * (low + high);
        let new_split = points.partition_point(|p| p.0 <= threshold);
        if new_split == 0 || new_split == points.len() {
            break;
        }
        low = mean(points[..new_split].iter().map(|p| p.0));
        high = mean(points[new_split..].iter().map(|p| p.0));
        if new_split == split {
            break;
        }
        split = new_split;
    }
    if split == 0 || split == points.len() || high - low < MIN_CENTROID_SEPARATION * high {
        return Err(EstimationError::UnseparableClusters { low, high });
    }

    Ok(RequestorPartition {
        full_clients: points[..split].iter().map(|p| p.1).collect(),
        resolvers: points[split..].iter().map(|p| p.1).collect(),
    })
}

fn mean<I: ExactSizeIterator<Item = f64>>(values: I) -> f64 {
    let n = values.len() as f64;
    crate::model::compensated_sum(values) / n
}

/// Number of caching resolvers: requestors left after removing the full clients.
pub fn estimate_resolver_count(partition: &RequestorPartition) -> Result<u64, EstimationError> {
    match partition.resolvers.len() {
        0 => Err(EstimationError::ZeroResolvers),
        n => Ok(n as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{full_model_load, stub_only_load, FullModelParams, StubOnlyParams};

    fn mp(ttl: f64, rate: f64) -> MeasurementPoint {
        MeasurementPoint::new(ttl, rate).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    fn obs(id: u64, r1: f64, r2: f64) -> RequestorObservation {
        RequestorObservation {
            source_id: SourceId(id),
            rate_at_tau1: Rate::new(r1).unwrap(),
            rate_at_tau2: Rate::new(r2).unwrap(),
        }
    }

    #[test]
    fn single_measurement_examples() {
        let m = mp(10.0, 200.0 / 21.0);
        let est = invert_single_measurement(m, 100.0).unwrap();
        assert!(rel(est.a_tilde.value(), 2.0) < 1e-12);
        assert_eq!(est.d_tilde.value(), 0.0);
        assert_eq!(est.source, EstimateSource::SingleMeasurement);

        let est = invert_single_measurement(mp(0.0, 7.0), 7.0).unwrap();
        assert_eq!(est.a_tilde.value(), 1.0);

        let err = invert_single_measurement(mp(100.0, 2.0), 100.0).unwrap_err();
        assert!(matches!(err, EstimationError::InfeasibleMeasurement { .. }));
        // exactly on the ceiling is infeasible too
        assert!(invert_single_measurement(mp(100.0, 1.0), 100.0).is_err());
        assert_eq!(invert_single_measurement(mp(1.0, 0.0), 10.0).unwrap_err(), EstimationError::NonPositiveRate);
    }

    #[test]
    fn single_measurement_roundtrip() {
        let p = StubOnlyParams::new(10_000, Rate::new(0.37).unwrap()).unwrap();
        let tau0 = TtlSeconds::new(1000.0).unwrap();
        let b = stub_only_load(&p, tau0).value();
        let est = invert_single_measurement(mp(1000.0, b), 10_000.0).unwrap();
        assert!(rel(predict_stub_only(&est, tau0).value(), b) <= 1e-12);
    }

    #[test]
    fn stub_prediction_examples() {
        let est = UacEstimate {
            n_tilde: 100.0,
            a_tilde: Rate::new(2.0).unwrap(),
            d_tilde: Rate::ZERO,
            source: EstimateSource::SingleMeasurement,
        };
        let p10 = predict_stub_only(&est, TtlSeconds::new(10.0).unwrap()).value();
        assert!(rel(p10, 200.0 / 21.0) < 1e-12);
        assert_eq!(predict_stub_only(&est, TtlSeconds::ZERO).value(), 200.0);
    }

    #[test]
    fn two_measurement_examples() {
        let est = solve_two_measurement(mp(0.0, 15.0), mp(1.0, 10.0), 10.0).unwrap();
        assert!(rel(est.a_tilde.value(), 1.0) < 1e-12);
        assert!(rel(est.d_tilde.value(), 5.0) < 1e-12);

        let est = solve_two_measurement(mp(0.0, 10.0), mp(1.0, 5.0), 10.0).unwrap();
        assert!(rel(est.a_tilde.value(), 1.0) < 1e-12);
        assert!(est.d_tilde.value().abs() < 1e-12);

        // argument order does not matter
        let swapped = solve_two_measurement(mp(1.0, 10.0), mp(0.0, 15.0), 10.0).unwrap();
        assert!(rel(swapped.a_tilde.value(), 1.0) < 1e-12);

        assert_eq!(
            solve_two_measurement(mp(5.0, 3.0), mp(5.0, 4.0), 10.0).unwrap_err(),
            EstimationError::DegenerateTtls
        );
    }

    #[test]
    fn two_measurement_rejects_inconsistent_data() {
        // load rising with TTL
        assert_eq!(
            solve_two_measurement(mp(0.0, 5.0), mp(10.0, 6.0), 10.0).unwrap_err(),
            EstimationError::NoFeasibleRoot
        );
        // drop too large for the caching term of 10 resolvers: D would be negative
        assert_eq!(
            solve_two_measurement(mp(0.0, 100.0), mp(1.0, 1.0), 10.0).unwrap_err(),
            EstimationError::NoFeasibleRoot
        );
    }

    #[test]
    fn two_measurement_clamps_noise_level_negative_d() {
        let p = FullModelParams::new(10.0, Rate::new(1.0).unwrap(), Rate::ZERO).unwrap();
        let b1 = full_model_load(&p, TtlSeconds::new(0.0).unwrap()).value();
        let b2 = full_model_load(&p, TtlSeconds::new(1.0).unwrap()).value() * (1.0 - 1e-9);
        let est = solve_two_measurement(mp(0.0, b1), mp(1.0, b2), 10.0).unwrap();
        assert_eq!(est.d_tilde.value(), 0.0);
    }

    #[test]
    fn three_measurement_examples() {
        let est = solve_three_measurement(mp(0.0, 15.0), mp(1.0, 10.0), mp(3.0, 7.5)).unwrap();
        assert!(rel(est.n_tilde, 10.0) < 1e-12);
        assert!(rel(est.a_tilde.value(), 1.0) < 1e-12);
        assert!(rel(est.d_tilde.value(), 5.0) < 1e-12);
        assert_eq!(est.source, EstimateSource::ThreeMeasurement);

        let est = solve_three_measurement(mp(0.0, 10.0), mp(1.0, 5.0), mp(3.0, 2.5)).unwrap();
        assert!(rel(est.n_tilde, 10.0) < 1e-12);
        assert!(rel(est.a_tilde.value(), 1.0) < 1e-12);
        assert!(est.d_tilde.value().abs() < 1e-12);

        assert_eq!(
            solve_three_measurement(mp(0.0, 5.0), mp(100.0, 5.0), mp(200.0, 5.0)).unwrap_err(),
            EstimationError::ZeroDifference
        );
        assert_eq!(
            solve_three_measurement(mp(1000.0, 5.0), mp(200.0, 6.0), mp(1000.0, 5.0)).unwrap_err(),
            EstimationError::DegenerateTtls
        );
    }

    #[test]
    fn three_measurement_rejects_convex_violations() {
        // a load curve bending the wrong way has no positive inbound rate
        let err = solve_three_measurement(mp(0.0, 10.0), mp(1.0, 9.9), mp(2.0, 1.0)).unwrap_err();
        assert!(matches!(err, EstimationError::InconsistentMeasurements { .. }));
    }

    #[test]
    fn full_prediction_examples() {
        let est = UacEstimate {
            n_tilde: 10.0,
            a_tilde: Rate::new(1.0).unwrap(),
            d_tilde: Rate::new(5.0).unwrap(),
            source: EstimateSource::ThreeMeasurement,
        };
        assert!(rel(predict_full(&est, TtlSeconds::new(3.0).unwrap()).value(), 7.5) < 1e-12);
        let far = predict_full(&est, TtlSeconds::new(1e9).unwrap()).value();
        assert!((far - 5.0).abs() < 1e-7);
        assert!(far > 5.0);

        let fitted = solve_three_measurement(mp(0.0, 15.0), mp(1.0, 10.0), mp(3.0, 7.5)).unwrap();
        for (tau, b) in [(0.0, 15.0), (1.0, 10.0), (3.0, 7.5)] {
            assert!(rel(predict_full(&fitted, TtlSeconds::new(tau).unwrap()).value(), b) <= 1e-9);
        }
    }

    #[test]
    fn classification_examples() {
        let mut o: Vec<_> = (0..5).map(|i| obs(i, 1.0, 0.5)).collect();
        o.extend((5..10).map(|i| obs(i, 1.0, 1.0)));
        let part = classify_requestors(&o).unwrap();
        assert_eq!(part.resolvers, (0..5).map(SourceId).collect());
        assert_eq!(part.full_clients, (5..10).map(SourceId).collect());
        assert_eq!(estimate_resolver_count(&part).unwrap(), 5);

        let same: Vec<_> = (0..6).map(|i| obs(i, 2.0, 1.0)).collect();
        assert!(matches!(classify_requestors(&same), Err(EstimationError::UnseparableClusters { .. })));

        let resolver = obs(1, 2.0, 0.19);
        assert!((resolver.relative_change() - 0.905).abs() < 1e-12);
        let client = obs(2, 1.0, 0.97);
        assert!((client.relative_change() - 0.03).abs() < 1e-12);
        let part = classify_requestors(&[resolver, client]).unwrap();
        assert!(part.resolvers.contains(&SourceId(1)));
        assert!(part.full_clients.contains(&SourceId(2)));

        assert_eq!(classify_requestors(&[client]).unwrap_err(), EstimationError::TooFewObservations);
    }

    #[test]
    fn close_centroids_are_unseparable() {
        let o = vec![obs(0, 1.0, 0.50), obs(1, 1.0, 0.48), obs(2, 1.0, 0.49)];
        assert!(matches!(classify_requestors(&o), Err(EstimationError::UnseparableClusters { .. })));
    }

    #[test]
    fn zero_rates_are_full_clients() {
        let o = vec![obs(0, 0.0, 0.0), obs(1, 1.0, 0.1)];
        let part = classify_requestors(&o).unwrap();
        assert!(part.full_clients.contains(&SourceId(0)));
    }

    #[test]
    fn resolver_count_from_partition() {
        let part = RequestorPartition {
            resolvers: (0..7).map(SourceId).collect(),
            full_clients: (7..10).map(SourceId).collect(),
        };
        assert_eq!(estimate_resolver_count(&part).unwrap(), 7);
        let empty = RequestorPartition { resolvers: BTreeSet::new(), full_clients: part.full_clients.clone() };
        assert_eq!(estimate_resolver_count(&empty).unwrap_err(), EstimationError::ZeroResolvers);
    }
}
