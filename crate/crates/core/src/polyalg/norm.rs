use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::VectorPoly;

/// `max |xᵢ|`, the norm used throughout.
pub fn max_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Seeded RNG used for every sampled quantity.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a point uniformly on the unit sphere `{x ∈ ℂⁿ : max |xᵢ| = 1}`.
///
/// The sphere is a union of `n` congruent faces `|x_k| = 1, |xᵢ| ≤ 1`; pick a
/// face, put a unit-modulus value on it, fill the rest uniformly in the disk.
pub fn sample_unit_sphere<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let face = rng.random_range(0..dim);
    (0..dim)
        .map(|i| {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let r = if i == face { 1.0 } else { rng.random::<f64>().sqrt() };
            Complex64::from_polar(r, theta)
        })
        .collect()
}

/// Draws a point uniformly in the closed unit polydisk `max |xᵢ| ≤ 1`.
pub fn sample_unit_ball<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(rng.random::<f64>().sqrt(), theta)
        })
        .collect()
}

/// Sampled lower bound on `‖P‖ = sup { ‖P(x)‖ : ‖x‖ ≤ 1 }`.
pub fn sup_norm_estimate(p: &VectorPoly, samples: usize, seed: u64) -> f64 {
    let mut rng = seeded_rng(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = sample_unit_sphere(&mut rng, p.dim());
        best = best.max(max_norm(&p.eval_unchecked(&x)));
    }
    best
}
