use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{evaluate_unit, GsaError, InputSpace, ScalarModel};

/// Harmonics of each input frequency attributed to that input.
pub const FAST_HARMONICS: u64 = 4;

// Cukier's recursive construction of interference-free frequency sets.
const OMEGA: [u64; 50] = [
    0, 0, 1, 5, 11, 1, 17, 23, 19, 25, 41, 31, 23, 87, 67, 73, 85, 143, 149, 99, 119, 237, 267, 283, 151, 385, 157,
    215, 449, 163, 337, 253, 375, 441, 673, 773, 875, 873, 587, 849, 623, 637, 891, 943, 1171, 1225, 1335, 1725, 1663,
    2019,
];
const DELTA: [u64; 49] = [
    4, 8, 6, 10, 20, 22, 32, 40, 38, 26, 56, 62, 46, 76, 96, 60, 86, 126, 134, 112, 92, 128, 154, 196, 34, 416, 106,
    208, 328, 198, 382, 88, 348, 186, 140, 170, 284, 568, 302, 438, 410, 248, 448, 388, 596, 216, 100, 488, 166,
];

/// Interference-free frequencies for `d` inputs (up to 50).
pub fn fast_frequencies(d: usize) -> Result<Vec<u64>, GsaError> {
    match d {
        0 => Err(GsaError::EmptySpace),
        1 => Ok(vec![1]),
        2 => Ok(vec![5, 23]),
        4 => Ok(vec![13, 31, 37, 41]),
        d if d <= OMEGA.len() => {
            let mut w = vec![OMEGA[d - 1]];
            for i in 1..d {
                w.push(w[i - 1] + DELTA[d - 1 - i]);
            }
            Ok(w)
        }
        d => Err(GsaError::UnsupportedDimension(d)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastInput {
    pub name: String,
    pub frequency: u64,
    pub first_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastResult {
    pub inputs: Vec<FastInput>,
    pub output_variance: f64,
    pub evaluations: usize,
}

/// Classical FAST first-order indices from `n_base` points on the search
/// curve `x_i(s) = 1/2 + arcsin(sin(w_i s))/pi`.
pub fn fast_analyze<M: ScalarModel + ?Sized>(
    model: &M,
    space: &InputSpace,
    n_base: usize,
) -> Result<FastResult, GsaError> {
    let omega = fast_frequencies(space.dim())?;
    let w_max = *omega.iter().max().expect("non-empty");
    let min = (2 * FAST_HARMONICS * w_max + 1) as usize;
    if n_base < min {
        return Err(GsaError::NyquistViolation { n: n_base, min, max_frequency: w_max, harmonics: FAST_HARMONICS });
    }
    let n = n_base as f64;
    let s: Vec<f64> = (1..=n_base).map(|k| PI * (2.0 * k as f64 - n - 1.0) / n).collect();
    let points: Vec<Vec<f64>> =
        s.iter().map(|&s| omega.iter().map(|&w| 0.5 + (w as f64 * s).sin().asin() / PI).collect()).collect();
    let y = evaluate_unit(model, space, &points);

    let mean = y.iter().sum::<f64>() / n;
    let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let variance = yc.iter().map(|v| v * v).sum::<f64>() / n;
    let power = |j: u64| {
        let (mut a, mut b) = (0.0, 0.0);
        for (v, &s) in yc.iter().zip(&s) {
            let (sin, cos) = (j as f64 * s).sin_cos();
            a += v * cos;
            b += v * sin;
        }
        2.0 * ((a / n).powi(2) + (b / n).powi(2))
    };

    let inputs = space
        .inputs()
        .iter()
        .zip(&omega)
        .map(|(r, &w)| {
            let d_i: f64 = (1..=FAST_HARMONICS).map(|p| power(p * w)).sum();
            let first_order = if variance > 0.0 { (d_i / variance).clamp(0.0, 1.0) } else { 0.0 };
            FastInput { name: r.name.clone(), frequency: w, first_order }
        })
        .collect();
    Ok(FastResult { inputs, output_variance: variance, evaluations: n_base })
}
