#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_mean::sdp::{DualSolution, Factor};
use robust_mean::Forms;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn uniform_rows(rng: &mut ChaCha8Rng, k: usize, d: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn gaussian_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| gaussian(rng)).collect())
        .collect()
}

/// A random small instance: `d` in `1..=6`, `K` in `10..=20`.
pub fn small_instance(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let d = rng.random_range(1..=6);
    let k = rng.random_range(10..=20);
    uniform_rows(rng, k, d)
}

/// A trace-one matrix from `r` random factors.
pub fn random_dual(rng: &mut ChaCha8Rng, forms: &Forms, r: usize) -> DualSolution<f64> {
    let factors = (0..r)
        .map(|_| Factor {
            weight: rng.random_range(0.05..1.0),
            direction: (0..forms.d()).map(|_| gaussian(rng)).collect(),
        })
        .collect();
    DualSolution::from_factors(forms, factors).unwrap()
}
