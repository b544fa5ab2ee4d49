//! CSV schemas.
//!
//! Population: `source_id,kind,rate_qps`. Simulation result:
//! `source_id,kind,count`. `kind` is `resolver` or `full_client`; resolvers
//! come first and ids are dense from 0.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{DistributionSpec, RatePopulation, SimError, SimResult, SourceCount, SourceKind};
use crate::estimation::SourceId;
use crate::model::{Rate, TtlSeconds};

#[derive(Debug, Serialize, Deserialize)]
struct PopulationRow {
    source_id: u64,
    kind: SourceKind,
    rate_qps: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CountRow {
    source_id: u64,
    kind: SourceKind,
    count: u64,
}

pub fn write_population_csv<W: Write>(population: &RatePopulation, out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    let n_res = population.n_resolvers();
    for (i, r) in population.resolver_rates.iter().enumerate() {
        w.serialize(PopulationRow { source_id: i as u64, kind: SourceKind::Resolver, rate_qps: r.value() })?;
    }
    for (j, r) in population.full_client_rates.iter().enumerate() {
        w.serialize(PopulationRow {
            source_id: (n_res + j) as u64,
            kind: SourceKind::FullClient,
            rate_qps: r.value(),
        })?;
    }
    w.flush().map_err(|e| SimError::Csv(e.to_string()))?;
    Ok(())
}

/// Reads a population back. The distribution spec and seed are not part of
/// the CSV and are supplied by the caller.
pub fn read_population_csv<R: Read>(input: R, spec: DistributionSpec, seed: u64) -> Result<RatePopulation, SimError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut resolver_rates = Vec::new();
    let mut full_client_rates = Vec::new();
    for row in rdr.deserialize() {
        let row: PopulationRow = row?;
        let expected = (resolver_rates.len() + full_client_rates.len()) as u64;
        if row.source_id != expected {
            return Err(SimError::Csv(format!("expected source_id {expected}, got {}", row.source_id)));
        }
        let rate = Rate::new(row.rate_qps).map_err(|e| SimError::Csv(e.to_string()))?;
        match row.kind {
            SourceKind::Resolver if full_client_rates.is_empty() => resolver_rates.push(rate),
            SourceKind::Resolver => return Err(SimError::Csv("resolver listed after a full client".into())),
            SourceKind::FullClient => full_client_rates.push(rate),
        }
    }
    Ok(RatePopulation { resolver_rates, full_client_rates, spec, seed })
}

pub fn write_sim_result_csv<W: Write>(result: &SimResult, out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    for c in &result.per_source_counts {
        w.serialize(CountRow { source_id: c.source_id.0, kind: c.kind, count: c.count })?;
    }
    w.flush().map_err(|e| SimError::Csv(e.to_string()))?;
    Ok(())
}

/// Reads per-source counts back; TTL and duration are supplied by the caller.
pub fn read_sim_result_csv<R: Read>(input: R, ttl: TtlSeconds, duration: f64) -> Result<SimResult, SimError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut per_source_counts = Vec::new();
    for row in rdr.deserialize() {
        let row: CountRow = row?;
        per_source_counts.push(SourceCount { source_id: SourceId(row.source_id), kind: row.kind, count: row.count });
    }
    let total: u64 = per_source_counts.iter().map(|c| c.count).sum();
    let aggregate_rate = Rate::new(total as f64 / duration).map_err(|e| SimError::Csv(e.to_string()))?;
    Ok(SimResult { ttl, duration, per_source_counts, aggregate_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_authoritative_load, SimConfig, SimMode};
    use proptest::prelude::*;

    #[test]
    fn header_and_kinds() {
        let pop = RatePopulation::generate(DistributionSpec::Constant { rate: 0.5 }, 2, 1, 0).unwrap();
        let mut buf = Vec::new();
        write_population_csv(&pop, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "source_id,kind,rate_qps\n0,resolver,0.5\n1,resolver,0.5\n2,full_client,0.5\n");
    }

    #[test]
    fn rejects_out_of_order_ids() {
        let text = "source_id,kind,rate_qps\n1,resolver,0.5\n";
        assert!(read_population_csv(text.as_bytes(), DistributionSpec::Constant { rate: 0.5 }, 0).is_err());
        let text = "source_id,kind,rate_qps\n0,resolver,-0.5\n";
        assert!(read_population_csv(text.as_bytes(), DistributionSpec::Constant { rate: 0.5 }, 0).is_err());
    }

    proptest! {
        #[test]
        fn population_and_result_roundtrip(n_res in 1usize..40, n_fc in 0usize..40, seed in any::<u64>()) {
            let spec = DistributionSpec::Lognormal { mu: -0.5493, sigma: 1.0481 };
            let pop = RatePopulation::generate(spec, n_res, n_fc, seed).unwrap();
            let mut buf = Vec::new();
            write_population_csv(&pop, &mut buf).unwrap();
            prop_assert_eq!(&read_population_csv(buf.as_slice(), spec, seed).unwrap(), &pop);

            let ttl = TtlSeconds::new(30.0).unwrap();
            let res = simulate_authoritative_load(&pop, ttl, &SimConfig::new(500.0, seed, SimMode::RenewalFast).unwrap()).unwrap();
            let mut buf = Vec::new();
            write_sim_result_csv(&res, &mut buf).unwrap();
            prop_assert_eq!(read_sim_result_csv(buf.as_slice(), ttl, 500.0).unwrap(), res);
        }
    }
}
