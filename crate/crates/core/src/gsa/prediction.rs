use serde::{Deserialize, Serialize};

use super::{GsaError, InputRange, InputSpace, ScalarModel};
use crate::estimation::{invert_single_measurement, predict_stub_only};
use crate::model::{heterogeneous_load, MeasurementPoint, Rate, TtlSeconds};
use crate::sim::RatePopulation;

/// Relative half-width of the box around the true inputs.
pub const INPUT_UNCERTAINTY: f64 = 0.10;

/// How the input box is validated and the model evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxCheck {
    /// Every corner must be a feasible single measurement (`N > B * tau0`);
    /// the model runs the inversion followed by the prediction.
    #[default]
    Strict,
    /// The inversion and prediction compose to `N B / (N + B (tau* - tau0))`,
    /// which stays finite beyond the saturation ceiling of the measurement.
    /// Only corners where that denominator vanishes are rejected.
    ClosedForm,
}

/// Predicted load at `tau_star` as a function of the resolver count and the
/// load measured at `tau0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionModel {
    pub tau0: TtlSeconds,
    pub tau_star: TtlSeconds,
    pub n_true: f64,
    pub b_true: Rate,
    pub check: BoxCheck,
    space: InputSpace,
}

impl PredictionModel {
    /// Inputs `N` and `B` on `[0.9, 1.1]` times their true values.
    pub fn space(&self) -> &InputSpace {
        &self.space
    }

    pub fn center(&self) -> [f64; 2] {
        [self.n_true, self.b_true.value()]
    }

    pub fn closed_form(&self, n: f64, b: f64) -> f64 {
        n * b / (n + b * (self.tau_star.value() - self.tau0.value()))
    }
}

impl ScalarModel for PredictionModel {
    fn evaluate(&self, x: &[f64]) -> f64 {
        let (n, b) = (x[0], x[1]);
        match self.check {
            BoxCheck::Strict => MeasurementPoint::new(self.tau0.value(), b)
                .ok()
                .and_then(|m| invert_single_measurement(m, n).ok())
                .map_or(f64::NAN, |est| predict_stub_only(&est, self.tau_star).value()),
            BoxCheck::ClosedForm => self.closed_form(n, b),
        }
    }
}

/// Builds the two-input prediction model around the population's exact load
/// at `tau0`, validating the box under the given policy.
pub fn prediction_gsa_model(
    tau0: TtlSeconds,
    tau_star: TtlSeconds,
    n_true: usize,
    population: &RatePopulation,
    check: BoxCheck,
) -> Result<PredictionModel, GsaError> {
    if n_true == 0 || population.resolver_rates.is_empty() {
        return Err(GsaError::InvalidModel("the resolver count must be positive".into()));
    }
    let b_true = heterogeneous_load(&population.resolver_rates, Rate::ZERO, tau0);
    if b_true.value() <= 0.0 {
        return Err(GsaError::InvalidModel("the true load must be positive".into()));
    }
    let n = n_true as f64;
    let (lo, hi) = (1.0 - INPUT_UNCERTAINTY, 1.0 + INPUT_UNCERTAINTY);
    let space = InputSpace::new(vec![
        InputRange { name: "N".into(), lower: lo * n, upper: hi * n },
        InputRange { name: "B".into(), lower: lo * b_true.value(), upper: hi * b_true.value() },
    ])?;
    let model = PredictionModel { tau0, tau_star, n_true: n, b_true, check, space };

    let r = model.space.inputs();
    for &cn in &[r[0].lower, r[0].upper] {
        for &cb in &[r[1].lower, r[1].upper] {
            let margin = match check {
                BoxCheck::Strict => cn - cb * tau0.value(),
                BoxCheck::ClosedForm => cn + cb * (tau_star.value() - tau0.value()),
            };
            if margin <= 0.0 {
                return Err(GsaError::InfeasibleBox(format!(
                    "corner N={cn}, B={cb} at tau0={} s ({check:?} check, margin {margin})",
                    tau0.value()
                )));
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::DistributionSpec;

    fn ttl(v: f64) -> TtlSeconds {
        TtlSeconds::new(v).unwrap()
    }

    fn constant(n: usize, rate: f64) -> RatePopulation {
        RatePopulation::generate(DistributionSpec::Constant { rate }, n, 0, 0).unwrap()
    }

    #[test]
    fn center_reproduces_exact_prediction() {
        // Homogeneous population: the model is exact, so the center predicts the true load.
        let pop = constant(1000, 1e-3);
        let m = prediction_gsa_model(ttl(100.0), ttl(500.0), 1000, &pop, BoxCheck::Strict).unwrap();
        let want = heterogeneous_load(&pop.resolver_rates, Rate::ZERO, ttl(500.0)).value();
        let got = m.evaluate(&m.center());
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
        assert!((m.evaluate(&m.center()) - m.closed_form(m.n_true, m.b_true.value())).abs() < 1e-12 * want);
    }

    #[test]
    fn same_ttl_returns_the_measurement() {
        let pop = constant(500, 2e-3);
        let m = prediction_gsa_model(ttl(60.0), ttl(60.0), 500, &pop, BoxCheck::Strict).unwrap();
        let x = [520.0, m.b_true.value() * 0.95];
        assert!((m.evaluate(&x) - x[1]).abs() < 1e-12 * x[1]);
    }

    #[test]
    fn degree_one_homogeneous() {
        let pop = constant(2000, 1e-3);
        for check in [BoxCheck::Strict, BoxCheck::ClosedForm] {
            let m = prediction_gsa_model(ttl(300.0), ttl(1800.0), 2000, &pop, check).unwrap();
            let x = [1900.0, m.b_true.value() * 1.05];
            for k in [0.5, 1.5, 3.0] {
                let scaled = m.evaluate(&[k * x[0], k * x[1]]);
                assert!((scaled - k * m.evaluate(&x)).abs() < 1e-12 * scaled, "{check:?} k={k}");
            }
        }
    }

    #[test]
    fn box_validation() {
        // lambda tau0 = 10: the measured load sits at 91% of N / tau0, so the
        // (0.9 N, 1.1 B) corner is beyond the saturation ceiling.
        let pop = constant(1000, 0.01);
        let strict = prediction_gsa_model(ttl(1000.0), ttl(1800.0), 1000, &pop, BoxCheck::Strict);
        assert!(matches!(strict, Err(GsaError::InfeasibleBox(_))));
        let m = prediction_gsa_model(ttl(1000.0), ttl(1800.0), 1000, &pop, BoxCheck::ClosedForm).unwrap();
        let r = m.space().inputs();
        assert!(m.evaluate(&[r[0].lower, r[1].upper]).is_finite());
        // Predicting at a shorter TTL can make the closed form blow up too.
        let pop = constant(1000, 1.0);
        let back = prediction_gsa_model(ttl(1000.0), ttl(0.0), 1000, &pop, BoxCheck::ClosedForm);
        assert!(matches!(back, Err(GsaError::InfeasibleBox(_))));
    }

    #[test]
    fn invalid_inputs() {
        let pop = constant(10, 1.0);
        assert!(matches!(
            prediction_gsa_model(ttl(1.0), ttl(2.0), 0, &pop, BoxCheck::Strict),
            Err(GsaError::InvalidModel(_))
        ));
    }
}
