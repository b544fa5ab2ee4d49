use rand::seq::SliceRandom;
use rand::Rng;

use super::InputSpace;
use crate::seed;

/// Latin hypercube sample of `n` points in the unit cube of dimension `d`:
/// every axis is cut into `n` equal strata and each stratum holds one point.
pub fn lhs_unit<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; d]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..d {
        perm.shuffle(rng);
        for (k, p) in points.iter_mut().enumerate() {
            p[j] = (perm[k] as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    points
}

/// Latin hypercube sample mapped onto the box of `space`.
pub fn lhs_sample(space: &InputSpace, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed);
    lhs_unit(space.dim(), n, &mut rng).iter().map(|u| space.to_physical(u)).collect()
}
