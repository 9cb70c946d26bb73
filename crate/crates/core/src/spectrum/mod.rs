//! Eigenvalues of the linear part and resonance analysis.

mod eigen;

pub use eigen::{eigencoordinates, Eigencoordinates, DEFAULT_MAX_CONDITION, MAX_EIGEN_DIM};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{MultiIndex, ScalarPoly};

/// Default absolute tolerance on `|μ|` below which a term counts as resonant.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-10;

/// Upper end of the near-resonance warning tier.
pub const NEAR_RESONANCE_THRESHOLD: f64 = 1e-4;

/// Eigenvalues `λ₁,…,λₙ` of `T'(0)` in eigen-coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    lambdas: Vec<Complex64>,
}

impl Spectrum {
    /// Rejects zero eigenvalues; stability is checked separately.
    pub fn new(lambdas: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = lambdas.iter().position(|l| l.norm() == 0.0) {
            return Err(Error::ZeroEigenvalue { index });
        }
        Ok(Spectrum { lambdas })
    }

    pub fn from_real(lambdas: &[f64]) -> Result<Self> {
        Spectrum::new(lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn is_stable(&self) -> bool {
        self.lambdas.iter().all(|l| l.norm() < 1.0)
    }

    /// Errors on the first eigenvalue with `|λ| ≥ 1`.
    pub fn check_stable(&self) -> Result<()> {
        match self.lambdas.iter().position(|l| l.norm() >= 1.0) {
            Some(index) => Err(Error::Unstable {
                index,
                modulus: self.lambdas[index].norm(),
            }),
            None => Ok(()),
        }
    }

    /// `λ^α = Π λᵢ^αᵢ`, the eigenvalue of the monomial `φ^α`.
    pub fn power(&self, alpha: &MultiIndex) -> Complex64 {
        self.lambdas
            .iter()
            .zip(alpha.exponents())
            .fold(Complex64::new(1.0, 0.0), |acc, (l, &e)| acc * l.powu(e))
    }

    /// `μ_{j,α} = λ^α − λⱼ`, the eigenvalue of the homological operator on `eⱼ φ^α`.
    /// `j` is 0-based.
    pub fn mu(&self, j: usize, alpha: &MultiIndex) -> Result<Complex64> {
        let n = self.dim();
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, dim: n });
        }
        if alpha.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: alpha.dim(),
            });
        }
        if alpha.order() < 2 {
            return Err(Error::InvalidArgument(format!(
                "mu requires |alpha| >= 2, got {}",
                alpha.order()
            )));
        }
        Ok(self.power(alpha) - self.lambdas[j])
    }
}

/// One `(j, α, μ_{j,α})` triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    /// 0-based component index.
    pub component: usize,
    pub alpha: MultiIndex,
    pub mu: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub max_order: usize,
    pub tol: f64,
    /// Every `(j, α)` with `2 ≤ |α| ≤ max_order`, ordered by `α` then `j`.
    pub entries: Vec<ResonanceEntry>,
    pub min_abs_mu: f64,
    /// Entries with `|μ| ≤ tol`.
    pub resonant: Vec<ResonanceEntry>,
    /// Entries with `tol < |μ| < NEAR_RESONANCE_THRESHOLD`.
    pub near_resonant: Vec<ResonanceEntry>,
}

impl ResonanceReport {
    pub fn is_non_resonant(&self) -> bool {
        self.resonant.is_empty()
    }
}

/// Enumerates all `μ_{j,α}` with `2 ≤ |α| ≤ max_order` and classifies them.
pub fn check_resonance(spec: &Spectrum, max_order: usize, tol: f64) -> Result<ResonanceReport> {
    if max_order < 2 {
        return Err(Error::InvalidArgument(format!(
            "resonance order must be at least 2, got {max_order}"
        )));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 0, got {tol}")));
    }
    let n = spec.dim();
    let mut entries = Vec::new();
    for k in 2..=max_order {
        for alpha in MultiIndex::all_of_order(n, k) {
            let p = spec.power(&alpha);
            for j in 0..n {
                entries.push(ResonanceEntry {
                    component: j,
                    alpha: alpha.clone(),
                    mu: p - spec.lambdas[j],
                });
            }
        }
    }
    let min_abs_mu = entries.iter().map(|e| e.mu.norm()).fold(f64::INFINITY, f64::min);
    let resonant = entries.iter().filter(|e| e.mu.norm() <= tol).cloned().collect();
    let near_resonant = entries
        .iter()
        .filter(|e| e.mu.norm() > tol && e.mu.norm() < NEAR_RESONANCE_THRESHOLD)
        .cloned()
        .collect();
    Ok(ResonanceReport {
        max_order,
        tol,
        entries,
        min_abs_mu,
        resonant,
        near_resonant,
    })
}

/// `U_{Λ} p = p ∘ Λ`: each `c_α φ^α` becomes `λ^α c_α φ^α`.
pub fn apply_koopman_linear(p: &ScalarPoly, spec: &Spectrum) -> Result<ScalarPoly> {
    if p.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: p.dim(),
        });
    }
    Ok(p.map_coeffs(|a, c| spec.power(a) * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{seeded_rng, VectorPoly};
    use rand::Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn mu_examples() {
        let s = Spectrum::from_real(&[0.5, 0.25]).unwrap();
        assert_eq!(s.mu(1, &mi(&[2, 0])).unwrap(), c(0.0));

        let s = Spectrum::from_real(&[0.5, 0.3]).unwrap();
        assert!((s.mu(0, &mi(&[1, 1])).unwrap() - c(-0.35)).norm() < 1e-15);

        let s = Spectrum::from_real(&[0.5]).unwrap();
        assert_eq!(s.mu(0, &mi(&[2])).unwrap(), c(-0.25));
        assert!(matches!(s.mu(1, &mi(&[2])), Err(Error::IndexOutOfRange { .. })));
        assert!(s.mu(0, &mi(&[1])).is_err());
    }

    #[test]
    fn zero_eigenvalue_rejected() {
        assert_eq!(
            Spectrum::from_real(&[0.5, 0.0]),
            Err(Error::ZeroEigenvalue { index: 1 })
        );
    }

    #[test]
    fn forced_resonance_found() {
        let s = Spectrum::from_real(&[0.5, 0.25]).unwrap();
        let r = check_resonance(&s, 2, DEFAULT_RESONANCE_TOL).unwrap();
        assert_eq!(r.resonant.len(), 1);
        assert_eq!(r.resonant[0].component, 1);
        assert_eq!(r.resonant[0].alpha, mi(&[2, 0]));
        assert_eq!(r.min_abs_mu, 0.0);
    }

    #[test]
    fn non_resonant_pair() {
        // Independent check: brute force over all exponent pairs.
        let s = Spectrum::from_real(&[0.5, 0.3]).unwrap();
        let r = check_resonance(&s, 5, 1e-12).unwrap();
        let mut brute = 0;
        for a in 0..=5u32 {
            for b in 0..=5u32 {
                if (2..=5).contains(&(a + b)) {
                    let p = 0.5f64.powi(a as i32) * 0.3f64.powi(b as i32);
                    brute += [0.5, 0.3].iter().filter(|&&l| (p - l).abs() <= 1e-12).count();
                }
            }
        }
        assert_eq!(brute, 0);
        assert!(r.resonant.is_empty());
    }

    #[test]
    fn entry_counts_per_order() {
        let s = Spectrum::from_real(&[0.5, 0.3, 0.2]).unwrap();
        let r = check_resonance(&s, 6, 0.0).unwrap();
        for k in 2..=6usize {
            let count = r.entries.iter().filter(|e| e.alpha.order() == k).count();
            // n·C(k+n−1, n−1) with n = 3
            assert_eq!(count, 3 * (k + 2) * (k + 1) / 2);
        }
        let min = r.entries.iter().map(|e| e.mu.norm()).fold(f64::INFINITY, f64::min);
        assert_eq!(r.min_abs_mu, min);
    }

    #[test]
    fn squared_unit_index_is_never_resonant_for_stable_lambda() {
        let mut rng = seeded_rng(5);
        for _ in 0..200 {
            let l = Complex64::from_polar(
                rng.random_range(0.05..0.95),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            let s = Spectrum::new(vec![l, c(0.4)]).unwrap();
            let mu = s.mu(0, &mi(&[2, 0])).unwrap();
            assert!((mu - (l * l - l)).norm() < 1e-15);
            assert!(mu.norm() > 0.0);
        }
    }

    #[test]
    fn koopman_linear_action() {
        let s = Spectrum::from_real(&[0.5, 0.3]).unwrap();
        let x = ScalarPoly::variable(2, 0).unwrap();
        let y = ScalarPoly::variable(2, 1).unwrap();
        assert_eq!(apply_koopman_linear(&x, &s).unwrap(), x.scale(c(0.5)));
        let xy = &x * &y;
        let k = apply_koopman_linear(&xy, &s).unwrap();
        assert!((k.coeff(&mi(&[1, 1])) - c(0.15)).norm() < 1e-16);
        let one = ScalarPoly::constant(2, c(1.0));
        assert_eq!(apply_koopman_linear(&one, &s).unwrap(), one);
    }

    #[test]
    fn koopman_linear_matches_composition_pointwise() {
        let mut rng = seeded_rng(9);
        let lam = vec![Complex64::new(0.4, 0.3), Complex64::new(0.4, -0.3), c(-0.6)];
        let s = Spectrum::new(lam.clone()).unwrap();
        let terms = MultiIndex::all_up_to_order(3, 4).into_iter().map(|a| {
            (
                a,
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        });
        let p = ScalarPoly::from_terms(3, terms).unwrap();
        let kp = apply_koopman_linear(&p, &s).unwrap();
        let diag = VectorPoly::diagonal(&lam);
        for _ in 0..50 {
            let x: Vec<Complex64> = (0..3)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let lx = diag.evaluate(&x).unwrap();
            let a = kp.evaluate(&x).unwrap();
            let b = p.evaluate(&lx).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }
}
