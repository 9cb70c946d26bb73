#![allow(dead_code)]

use koopman_core::{Complex64, MultiIndex, ScalarPoly, Spectrum, VectorPoly};
use rand::Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

pub fn rand_c<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random homogeneous map of degree `m` on ℂⁿ with every coefficient present.
pub fn random_homogeneous<R: Rng>(rng: &mut R, n: usize, m: usize) -> VectorPoly {
    let terms = MultiIndex::all_of_order(n, m);
    VectorPoly::from_components(
        (0..n)
            .map(|_| ScalarPoly::from_terms(n, terms.iter().map(|a| (a.clone(), rand_c(rng)))).unwrap())
            .collect(),
    )
    .unwrap()
}

pub fn map_1d(coeffs: &[(u32, f64)]) -> VectorPoly {
    let p = ScalarPoly::from_terms(1, coeffs.iter().map(|&(k, v)| (mi(&[k]), c(v)))).unwrap();
    VectorPoly::from_components(vec![p]).unwrap()
}

/// `T(x) = 0.5x + x²`.
pub fn worked_1d() -> (VectorPoly, Spectrum) {
    (map_1d(&[(1, 0.5), (2, 1.0)]), Spectrum::from_real(&[0.5]).unwrap())
}

/// `λ = (0.5, 0.3)` with unit-scale quadratic and cubic terms.
pub fn generic_2d() -> (VectorPoly, Spectrum) {
    let t1 = ScalarPoly::from_terms(
        2,
        [
            (mi(&[1, 0]), c(0.5)),
            (mi(&[2, 0]), c(0.5)),
            (mi(&[1, 1]), c(-0.4)),
            (mi(&[0, 2]), c(0.3)),
            (mi(&[3, 0]), c(0.3)),
            (mi(&[1, 2]), c(-0.2)),
        ],
    )
    .unwrap();
    let t2 = ScalarPoly::from_terms(
        2,
        [
            (mi(&[0, 1]), c(0.3)),
            (mi(&[2, 0]), c(0.2)),
            (mi(&[1, 1]), c(0.5)),
            (mi(&[0, 2]), c(-0.6)),
            (mi(&[2, 1]), c(-0.25)),
            (mi(&[0, 3]), c(0.4)),
        ],
    )
    .unwrap();
    (
        VectorPoly::from_components(vec![t1, t2]).unwrap(),
        Spectrum::from_real(&[0.5, 0.3]).unwrap(),
    )
}
