//! Global sensitivity analysis of deterministic scalar models over boxes of
//! independent uniform inputs.
//!
//! Three analyzers are provided: the elementary effects test over
//! one-at-a-time trajectories ([`eet_analyze`]), the classical Fourier
//! amplitude sensitivity test ([`fast_analyze`]) and variance-based analysis
//! with Saltelli sampling ([`vbsa_analyze`]). [`prediction_gsa_model`] wraps
//! the single-measurement load predictor as a two-input model.

mod bootstrap;
mod eet;
mod fast;
mod lhs;
mod prediction;
mod vbsa;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bootstrap::{percentile_interval, ConfidenceInterval, CONFIDENCE_LEVEL};
pub use eet::{eet_analyze, EetInput, EetResult, EET_STEP};
pub use fast::{fast_analyze, fast_frequencies, FastInput, FastResult, FAST_HARMONICS};
pub use lhs::{lhs_sample, lhs_unit};
pub use prediction::{prediction_gsa_model, BoxCheck, PredictionModel, INPUT_UNCERTAINTY};
pub use vbsa::{vbsa_analyze, VbsaInput, VbsaResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GsaError {
    #[error("input space needs at least one input")]
    EmptySpace,
    #[error("input {name}: lower bound {lower} must be below upper bound {upper}")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("at least 2 trajectories are required, got {0}")]
    InsufficientTrajectories(usize),
    #[error("sample size {n} is below the minimum of {min}")]
    InsufficientSamples { n: usize, min: usize },
    #[error("FAST needs at least {min} samples for frequency {max_frequency} and {harmonics} harmonics, got {n}")]
    NyquistViolation { n: usize, min: usize, max_frequency: u64, harmonics: u64 },
    #[error("no interference-free frequency set is tabulated for {0} inputs")]
    UnsupportedDimension(usize),
    #[error("input box is infeasible for the single-measurement estimator: {0}")]
    InfeasibleBox(String),
    #[error("invalid prediction model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRange {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Independent uniform inputs on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpace {
    inputs: Vec<InputRange>,
}

impl InputSpace {
    pub fn new(inputs: Vec<InputRange>) -> Result<Self, GsaError> {
        if inputs.is_empty() {
            return Err(GsaError::EmptySpace);
        }
        for r in &inputs {
            if !(r.lower.is_finite() && r.upper.is_finite() && r.lower < r.upper) {
                return Err(GsaError::InvalidBounds { name: r.name.clone(), lower: r.lower, upper: r.upper });
            }
        }
        Ok(InputSpace { inputs })
    }

    /// `d` inputs named `x1..xd` on `[lower, upper]`.
    pub fn uniform(d: usize, lower: f64, upper: f64) -> Result<Self, GsaError> {
        InputSpace::new((1..=d).map(|i| InputRange { name: format!("x{i}"), lower, upper }).collect())
    }

    pub fn dim(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[InputRange] {
        &self.inputs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.inputs.iter().map(|r| r.name.as_str())
    }

    /// Maps a point of the unit cube onto the box.
    pub fn to_physical(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter().zip(&self.inputs).map(|(u, r)| r.lower + u * (r.upper - r.lower)).collect()
    }
}

/// A deterministic map from an input vector to one real output. Must be safe
/// to evaluate concurrently.
pub trait ScalarModel: Sync {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> ScalarModel for F
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Evaluates the model at unit-cube points, in parallel, preserving order.
pub(crate) fn evaluate_unit<M: ScalarModel + ?Sized>(model: &M, space: &InputSpace, points: &[Vec<f64>]) -> Vec<f64> {
    points.par_iter().map(|u| model.evaluate(&space.to_physical(u))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GsaMethod {
    Eet,
    Fast,
    Vbsa,
}

impl GsaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            GsaMethod::Eet => "EET",
            GsaMethod::Fast => "FAST",
            GsaMethod::Vbsa => "VBSA",
        }
    }
}

/// One row of the GSA CSV: `input,method,index_name,estimate,ci_low,ci_high`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub input: String,
    pub method: String,
    pub index_name: String,
    pub estimate: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method")]
pub enum GsaResult {
    #[serde(rename = "EET")]
    Eet(EetResult),
    #[serde(rename = "FAST")]
    Fast(FastResult),
    #[serde(rename = "VBSA")]
    Vbsa(VbsaResult),
}

impl GsaResult {
    pub fn method(&self) -> GsaMethod {
        match self {
            GsaResult::Eet(_) => GsaMethod::Eet,
            GsaResult::Fast(_) => GsaMethod::Fast,
            GsaResult::Vbsa(_) => GsaMethod::Vbsa,
        }
    }

    pub fn rows(&self) -> Vec<IndexRow> {
        let method = self.method().as_str().to_string();
        let row = |input: &str, index_name: &str, estimate: f64, ci: Option<ConfidenceInterval>| IndexRow {
            input: input.to_string(),
            method: method.clone(),
            index_name: index_name.to_string(),
            estimate,
            ci_low: ci.map(|c| c.low),
            ci_high: ci.map(|c| c.high),
        };
        let mut rows = Vec::new();
        match self {
            GsaResult::Eet(r) => {
                for i in &r.inputs {
                    rows.push(row(&i.name, "mi", i.mi, Some(i.ci_mi)));
                    rows.push(row(&i.name, "mi_star", i.mi_star, Some(i.ci_mi_star)));
                    rows.push(row(&i.name, "sigma", i.sigma, Some(i.ci_sigma)));
                }
            }
            GsaResult::Fast(r) => {
                for i in &r.inputs {
                    rows.push(row(&i.name, "first_order", i.first_order, None));
                }
            }
            GsaResult::Vbsa(r) => {
                for i in &r.inputs {
                    rows.push(row(&i.name, "main_effect", i.main_effect, Some(i.ci_main)));
                    rows.push(row(&i.name, "total_effect", i.total_effect, Some(i.ci_total)));
                }
            }
        }
        rows
    }
}

pub fn write_gsa_csv<W: Write>(rows: &[IndexRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_validation() {
        assert_eq!(InputSpace::new(vec![]).unwrap_err(), GsaError::EmptySpace);
        let bad = InputRange { name: "a".into(), lower: 1.0, upper: 1.0 };
        assert!(matches!(InputSpace::new(vec![bad]), Err(GsaError::InvalidBounds { .. })));
        let s = InputSpace::uniform(2, -1.0, 3.0).unwrap();
        assert_eq!(s.to_physical(&[0.0, 0.5]), vec![-1.0, 1.0]);
        assert_eq!(s.names().collect::<Vec<_>>(), vec!["x1", "x2"]);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            IndexRow {
                input: "N".into(),
                method: "FAST".into(),
                index_name: "first_order".into(),
                estimate: 0.5,
                ci_low: None,
                ci_high: None,
            },
            IndexRow {
                input: "B".into(),
                method: "VBSA".into(),
                index_name: "main_effect".into(),
                estimate: 0.25,
                ci_low: Some(0.2),
                ci_high: Some(0.3),
            },
        ];
        let mut buf = Vec::new();
        write_gsa_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "input,method,index_name,estimate,ci_low,ci_high\nN,FAST,first_order,0.5,,\nB,VBSA,main_effect,0.25,0.2,0.3\n"
        );
    }
}
