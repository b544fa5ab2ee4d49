use serde::Serialize;

use super::ExperimentError;
use crate::estimation::{
    invert_single_measurement, predict_full, solve_three_measurement, solve_two_measurement, UacEstimate,
};
use crate::model::{MeasurementPoint, Rate, TtlSeconds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub estimate: UacEstimate,
    pub tau_star: TtlSeconds,
    pub predicted: Rate,
}

/// Fits the model to one, two or three measurements and predicts the load at
/// `tau_star`. One and two measurements need the resolver count; with three
/// it is estimated and any given count is ignored.
pub fn fit_and_predict(
    measurements: &[MeasurementPoint],
    n_resolvers: Option<f64>,
    tau_star: TtlSeconds,
) -> Result<Prediction, ExperimentError> {
    let need_n = || n_resolvers.ok_or_else(|| ExperimentError::Config("the resolver count is required".into()));
    let estimate = match *measurements {
        [m] => invert_single_measurement(m, need_n()?)?,
        [m1, m2] => solve_two_measurement(m1, m2, need_n()?)?,
        [m1, m2, m3] => solve_three_measurement(m1, m2, m3)?,
        _ => {
            return Err(ExperimentError::Config(format!("expected 1 to 3 measurements, got {}", measurements.len())));
        }
    };
    Ok(Prediction { estimate, tau_star, predicted: predict_full(&estimate, tau_star) })
}
