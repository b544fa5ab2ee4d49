use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::{percentile_interval, ConfidenceInterval};
use super::lhs::lhs_unit;
use super::{evaluate_unit, GsaError, InputSpace, ScalarModel};
use crate::seed::{self, stream};

/// One-at-a-time step, in standardized coordinates.
pub const EET_STEP: f64 = 0.5;

// Base points are snapped to multiples of 2^-24 so that steps and the inputs
// they produce are exact; a linear model then yields bit-identical effects.
const GRID: f64 = (1u64 << 24) as f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EetInput {
    pub name: String,
    /// Mean of the signed elementary effects.
    pub mi: f64,
    /// Mean of the absolute elementary effects.
    pub mi_star: f64,
    pub sigma: f64,
    pub ci_mi: ConfidenceInterval,
    pub ci_mi_star: ConfidenceInterval,
    pub ci_sigma: ConfidenceInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EetResult {
    pub inputs: Vec<EetInput>,
    pub trajectories: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    mean: f64,
    mean_abs: f64,
    std: f64,
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> Moments {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let mean_abs = values.clone().map(f64::abs).sum::<f64>() / n;
    let ss: f64 = values.map(|v| (v - mean).powi(2)).sum();
    Moments { mean, mean_abs, std: (ss / (n - 1.0)).sqrt() }
}

/// Elementary effects test over `r` one-at-a-time trajectories started from
/// Latin hypercube base points. Each trajectory visits the inputs in a random
/// order and moves each one by ±[`EET_STEP`], whichever stays inside the cube.
pub fn eet_analyze<M: ScalarModel + ?Sized>(
    model: &M,
    space: &InputSpace,
    r: usize,
    seed: u64,
    n_boot: usize,
) -> Result<EetResult, GsaError> {
    if r < 2 {
        return Err(GsaError::InsufficientTrajectories(r));
    }
    let d = space.dim();
    let mut rng = seed::rng(seed::derive(seed, stream::SAMPLING));
    let base = lhs_unit(d, r, &mut rng);

    // Trajectory t occupies points t*(d+1) .. (t+1)*(d+1); order[t][k] is the
    // input moved between points k and k+1.
    let mut points = Vec::with_capacity(r * (d + 1));
    let mut orders = Vec::with_capacity(r);
    for mut x0 in base {
        for v in x0.iter_mut() {
            *v = ((*v * GRID).floor() / GRID).min(1.0 - 1.0 / GRID);
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.shuffle(&mut rng);
        let mut x = x0;
        points.push(x.clone());
        for &i in &order {
            x[i] = if x[i] + EET_STEP <= 1.0 { x[i] + EET_STEP } else { x[i] - EET_STEP };
            points.push(x.clone());
        }
        orders.push(order);
    }
    let y = evaluate_unit(model, space, &points);

    // ee[i][t]: effect of input i in trajectory t.
    let mut ee = vec![vec![0.0; r]; d];
    for (t, order) in orders.iter().enumerate() {
        let off = t * (d + 1);
        for (k, &i) in order.iter().enumerate() {
            let range = space.inputs()[i].upper - space.inputs()[i].lower;
            let p0 = space.to_physical(&points[off + k]);
            let p1 = space.to_physical(&points[off + k + 1]);
            let step = (p1[i] - p0[i]) / range;
            ee[i][t] = (y[off + k + 1] - y[off + k]) / step;
        }
    }

    let mut brng = seed::rng(seed::derive(seed, stream::BOOTSTRAP));
    let resamples: Vec<Vec<usize>> = (0..n_boot).map(|_| (0..r).map(|_| brng.random_range(0..r)).collect()).collect();

    let inputs = space
        .inputs()
        .iter()
        .zip(&ee)
        .map(|(range, e)| {
            let est = moments(e.iter().copied());
            let reps: Vec<Moments> = resamples.par_iter().map(|idx| moments(idx.iter().map(|&t| e[t]))).collect();
            let pick = |f: fn(&Moments) -> f64| reps.iter().map(f).collect::<Vec<_>>();
            EetInput {
                name: range.name.clone(),
                mi: est.mean,
                mi_star: est.mean_abs,
                sigma: est.std,
                ci_mi: percentile_interval(&pick(|m| m.mean), est.mean),
                ci_mi_star: percentile_interval(&pick(|m| m.mean_abs), est.mean_abs),
                ci_sigma: percentile_interval(&pick(|m| m.std), est.std),
            }
        })
        .collect();
    Ok(EetResult { inputs, trajectories: r, evaluations: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit2() -> InputSpace {
        InputSpace::uniform(2, 0.0, 1.0).unwrap()
    }

    #[test]
    fn single_input_linear_model() {
        let res = eet_analyze(&|x: &[f64]| x[0], &unit2(), 100, 1, 200).unwrap();
        let (a, b) = (&res.inputs[0], &res.inputs[1]);
        assert_eq!((a.mi, a.sigma, b.mi, b.sigma), (1.0, 0.0, 0.0, 0.0));
        assert_eq!(res.evaluations, 300);
    }

    #[test]
    fn additive_linear_model_equal_means() {
        let res = eet_analyze(&|x: &[f64]| x[0] + x[1], &unit2(), 200, 2, 0).unwrap();
        assert!((res.inputs[0].mi - res.inputs[1].mi).abs() < 1e-12);
        assert!(res.inputs.iter().all(|i| i.sigma == 0.0));
    }

    #[test]
    fn linear_model_on_scaled_box_has_zero_spread() {
        let space = InputSpace::uniform(3, -7.0, 13.0).unwrap();
        let res = eet_analyze(&|x: &[f64]| 3.0 * x[0] - x[1] + 0.5 * x[2], &space, 50, 3, 0).unwrap();
        for (i, coef) in res.inputs.iter().zip([3.0, -1.0, 0.5]) {
            assert_eq!(i.mi, coef * 20.0);
            assert_eq!(i.sigma, 0.0);
        }
    }

    #[test]
    fn interaction_shows_as_spread() {
        let res = eet_analyze(&|x: &[f64]| x[0] * x[1], &unit2(), 500, 4, 500).unwrap();
        for i in &res.inputs {
            assert!(i.sigma > 0.1, "{i:?}");
            assert!(i.ci_sigma.low < i.ci_sigma.high);
            assert!(i.ci_mi.contains(i.mi) && i.ci_sigma.contains(i.sigma) && i.ci_mi_star.contains(i.mi_star));
        }
    }

    #[test]
    fn signed_and_absolute_means_differ_for_non_monotone_model() {
        let res = eet_analyze(&|x: &[f64]| (x[0] - 0.5).powi(2), &unit2(), 400, 5, 0).unwrap();
        assert!(res.inputs[0].mi.abs() < res.inputs[0].mi_star);
    }

    #[test]
    fn rejects_single_trajectory() {
        assert_eq!(
            eet_analyze(&|x: &[f64]| x[0], &unit2(), 1, 0, 0).unwrap_err(),
            GsaError::InsufficientTrajectories(1)
        );
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[1] * x[1];
        let a = eet_analyze(&f, &unit2(), 300, 11, 100).unwrap();
        let b = eet_analyze(&f, &unit2(), 300, 11, 100).unwrap();
        assert_eq!(a, b);
    }
}
