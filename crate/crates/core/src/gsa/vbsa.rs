use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::{percentile_interval, ConfidenceInterval};
use super::lhs::lhs_unit;
use super::{evaluate_unit, GsaError, InputSpace, ScalarModel};
use crate::seed::{self, stream};

const MIN_BASE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VbsaInput {
    pub name: String,
    pub main_effect: f64,
    pub total_effect: f64,
    pub ci_main: ConfidenceInterval,
    pub ci_total: ConfidenceInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VbsaResult {
    pub inputs: Vec<VbsaInput>,
    pub n_base: usize,
    pub evaluations: usize,
}

struct Outputs {
    a: Vec<f64>,
    b: Vec<f64>,
    /// `ab[i]`: outputs on A with column i taken from B.
    ab: Vec<Vec<f64>>,
}

impl Outputs {
    /// Main and total effect of every input over the given rows.
    fn indices(&self, rows: &[usize]) -> Vec<(f64, f64)> {
        let n = rows.len() as f64;
        let mean = rows.iter().map(|&j| self.a[j] + self.b[j]).sum::<f64>() / (2.0 * n);
        let var =
            rows.iter().map(|&j| (self.a[j] - mean).powi(2) + (self.b[j] - mean).powi(2)).sum::<f64>() / (2.0 * n);
        self.ab
            .iter()
            .map(|ab| {
                if var <= 0.0 {
                    return (0.0, 0.0);
                }
                // centering leaves the estimator unbiased and removes its dependence on the output mean
                let main = rows.iter().map(|&j| (self.b[j] - mean) * (ab[j] - self.a[j])).sum::<f64>() / n / var;
                let total = rows.iter().map(|&j| (self.a[j] - ab[j]).powi(2)).sum::<f64>() / (2.0 * n) / var;
                (main, total)
            })
            .collect()
    }
}

/// Variance-based main and total effects from two independent Latin
/// hypercube matrices and their column hybrids, `n_base * (d + 2)` model runs.
pub fn vbsa_analyze<M: ScalarModel + ?Sized>(
    model: &M,
    space: &InputSpace,
    n_base: usize,
    seed: u64,
    n_boot: usize,
) -> Result<VbsaResult, GsaError> {
    if n_base < MIN_BASE {
        return Err(GsaError::InsufficientSamples { n: n_base, min: MIN_BASE });
    }
    let d = space.dim();
    let mut rng = seed::rng(seed::derive(seed, stream::SAMPLING));
    let a = lhs_unit(d, n_base, &mut rng);
    let b = lhs_unit(d, n_base, &mut rng);
    let mut points = Vec::with_capacity(n_base * (d + 2));
    points.extend(a.iter().cloned());
    points.extend(b.iter().cloned());
    for i in 0..d {
        points.extend(a.iter().zip(&b).map(|(ra, rb)| {
            let mut p = ra.clone();
            p[i] = rb[i];
            p
        }));
    }
    let y = evaluate_unit(model, space, &points);
    let chunk = |k: usize| y[k * n_base..(k + 1) * n_base].to_vec();
    let out = Outputs { a: chunk(0), b: chunk(1), ab: (0..d).map(|i| chunk(2 + i)).collect() };

    let all: Vec<usize> = (0..n_base).collect();
    let est = out.indices(&all);
    let mut brng = seed::rng(seed::derive(seed, stream::BOOTSTRAP));
    let resamples: Vec<Vec<usize>> =
        (0..n_boot).map(|_| (0..n_base).map(|_| brng.random_range(0..n_base)).collect()).collect();
    let reps: Vec<Vec<(f64, f64)>> = resamples.par_iter().map(|rows| out.indices(rows)).collect();

    let inputs = space
        .inputs()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (main, total) = est[i];
            let mains: Vec<f64> = reps.iter().map(|rep| rep[i].0).collect();
            let totals: Vec<f64> = reps.iter().map(|rep| rep[i].1).collect();
            VbsaInput {
                name: r.name.clone(),
                main_effect: main,
                total_effect: total,
                ci_main: percentile_interval(&mains, main),
                ci_total: percentile_interval(&totals, total),
            }
        })
        .collect();
    Ok(VbsaResult { inputs, n_base, evaluations: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ishigami(x: &[f64]) -> f64 {
        x[0].sin() + 7.0 * x[1].sin().powi(2) + 0.1 * x[2].powi(4) * x[0].sin()
    }

    fn effects(res: &VbsaResult) -> (Vec<f64>, Vec<f64>) {
        (res.inputs.iter().map(|i| i.main_effect).collect(), res.inputs.iter().map(|i| i.total_effect).collect())
    }

    #[test]
    fn additive_model() {
        let res =
            vbsa_analyze(&|x: &[f64]| x[0] + x[1], &InputSpace::uniform(2, 0.0, 1.0).unwrap(), 6000, 1, 0).unwrap();
        let (m, t) = effects(&res);
        for v in m.iter().chain(&t) {
            assert!((v - 0.5).abs() < 0.03, "{m:?} {t:?}");
        }
        assert_eq!(res.evaluations, 6000 * 4);
    }

    #[test]
    fn inert_input() {
        let res = vbsa_analyze(&|x: &[f64]| x[0], &InputSpace::uniform(2, 0.0, 1.0).unwrap(), 6000, 2, 0).unwrap();
        let (m, t) = effects(&res);
        assert!((m[0] - 1.0).abs() < 0.03 && (t[0] - 1.0).abs() < 0.03, "{m:?} {t:?}");
        assert!(m[1].abs() < 0.03 && t[1] == 0.0);
    }

    #[test]
    fn ishigami_indices() {
        let (a, b) = (7.0_f64, 0.1_f64);
        let v = a * a / 8.0 + b * PI.powi(4) / 5.0 + b * b * PI.powi(8) / 18.0 + 0.5;
        let s1 = 0.5 * (1.0 + b * PI.powi(4) / 5.0).powi(2) / v;
        let s2 = a * a / 8.0 / v;
        assert!((s1 - 0.3139).abs() < 1e-4 && (s2 - 0.4424).abs() < 1e-4);

        let space = InputSpace::uniform(3, -PI, PI).unwrap();
        let res = vbsa_analyze(&ishigami, &space, 6000, 3, 200).unwrap();
        let (m, t) = effects(&res);
        for (got, want) in m.iter().zip([s1, s2, 0.0]) {
            assert!((got - want).abs() < 0.05, "{m:?}");
        }
        assert!(t[2] > 0.0);
        for i in &res.inputs {
            assert!(i.total_effect >= i.main_effect - 0.05);
            assert!(i.ci_main.contains(i.main_effect) && i.ci_total.contains(i.total_effect));
            assert!(i.ci_main.low < i.ci_main.high);
        }
    }

    #[test]
    fn rejects_small_base() {
        let err = vbsa_analyze(&|x: &[f64]| x[0], &InputSpace::uniform(1, 0.0, 1.0).unwrap(), 9, 0, 0).unwrap_err();
        assert_eq!(err, GsaError::InsufficientSamples { n: 9, min: 10 });
    }
}
