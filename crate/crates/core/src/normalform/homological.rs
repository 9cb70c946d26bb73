use log::warn;

use crate::error::{Error, Result};
use crate::polyalg::{ScalarPoly, VectorPoly};
use crate::spectrum::{ResonanceEntry, Spectrum, NEAR_RESONANCE_THRESHOLD};

/// Output of [`lie_solve`].
#[derive(Clone, Debug)]
pub struct LieSolution {
    pub q: VectorPoly,
    /// Divisions performed with `tol < |μ| < NEAR_RESONANCE_THRESHOLD`.
    pub near_resonances: Vec<ResonanceEntry>,
}

/// Inverts the homological operator `Q ↦ Q∘Λ − Λ·Q` on degree-`order` maps.
///
/// The operator is diagonal on `eⱼφ^α` with eigenvalue `μ_{j,α} = λ^α − λⱼ`,
/// so `q_{j,α} = r_{j,α} / μ_{j,α}`. A nonzero `r_{j,α}` with
/// `|μ_{j,α}| ≤ resonance_tol` is an error.
pub fn lie_solve(r_hat: &VectorPoly, order: usize, spec: &Spectrum, resonance_tol: f64) -> Result<LieSolution> {
    let n = spec.dim();
    if r_hat.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r_hat.dim(),
        });
    }
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "homological equation needs order >= 2, got {order}"
        )));
    }
    if !r_hat.is_homogeneous_of(order) {
        return match r_hat.degree() {
            Some(d) if r_hat.is_homogeneous_of(d) => Err(Error::WrongDegree {
                expected: order,
                found: d,
            }),
            _ => Err(Error::NotHomogeneous),
        };
    }

    let mut near_resonances = Vec::new();
    let mut components = Vec::with_capacity(n);
    for (j, r) in r_hat.components().iter().enumerate() {
        let mut q = ScalarPoly::zero(n);
        for (alpha, coeff) in r.terms() {
            let mu = spec.power(alpha) - spec.lambdas()[j];
            let abs = mu.norm();
            if abs <= resonance_tol {
                return Err(Error::Resonance {
                    order,
                    component: j,
                    alpha: alpha.clone(),
                    mu_abs: abs,
                });
            }
            if abs < NEAR_RESONANCE_THRESHOLD {
                warn!(
                    "near-resonant division at order {order}: component {}, alpha {alpha}, |mu| = {abs:e}",
                    j + 1
                );
                near_resonances.push(ResonanceEntry {
                    component: j,
                    alpha: alpha.clone(),
                    mu,
                });
            }
            q.add_term(alpha.clone(), coeff / mu);
        }
        components.push(q);
    }
    Ok(LieSolution {
        q: VectorPoly::from_components(components)?,
        near_resonances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MultiIndex;
    use crate::spectrum::DEFAULT_RESONANCE_TOL;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn one_dimensional_quadratic() {
        // q = 1/(λ²−λ) = 1/(0.25−0.5) = −4
        let spec = Spectrum::from_real(&[0.5]).unwrap();
        let r = VectorPoly::from_components(vec![ScalarPoly::monomial(1, mi(&[2]), c(1.0)).unwrap()]).unwrap();
        let sol = lie_solve(&r, 2, &spec, DEFAULT_RESONANCE_TOL).unwrap();
        assert_eq!(sol.q.component(0).coeff(&mi(&[2])), c(-4.0));
        assert!(sol.near_resonances.is_empty());
    }

    #[test]
    fn zero_right_hand_side() {
        let spec = Spectrum::from_real(&[0.5, 0.3]).unwrap();
        let sol = lie_solve(&VectorPoly::zero(2), 3, &spec, DEFAULT_RESONANCE_TOL).unwrap();
        assert!(sol.q.is_zero());
    }

    #[test]
    fn single_mixed_term() {
        let spec = Spectrum::from_real(&[0.5, 0.3]).unwrap();
        let r = VectorPoly::from_components(vec![
            ScalarPoly::monomial(2, mi(&[1, 1]), c(1.0)).unwrap(),
            ScalarPoly::zero(2),
        ])
        .unwrap();
        let q = lie_solve(&r, 2, &spec, DEFAULT_RESONANCE_TOL).unwrap().q;
        let got = q.component(0).coeff(&mi(&[1, 1]));
        assert!((got - c(1.0 / -0.35)).norm() < 1e-14);
        assert!(q.component(1).is_zero());
    }

    #[test]
    fn resonant_term_is_a_hard_error() {
        let spec = Spectrum::from_real(&[0.5, 0.25]).unwrap();
        let r = VectorPoly::from_components(vec![
            ScalarPoly::zero(2),
            ScalarPoly::monomial(2, mi(&[2, 0]), c(1.0)).unwrap(),
        ])
        .unwrap();
        match lie_solve(&r, 2, &spec, DEFAULT_RESONANCE_TOL) {
            Err(Error::Resonance {
                order,
                component,
                alpha,
                ..
            }) => {
                assert_eq!((order, component, alpha), (2, 1, mi(&[2, 0])));
            }
            other => panic!("expected resonance error, got {other:?}"),
        }
    }

    #[test]
    fn near_resonance_is_reported() {
        let spec = Spectrum::from_real(&[0.5, 0.25 + 1e-6]).unwrap();
        let r = VectorPoly::from_components(vec![
            ScalarPoly::zero(2),
            ScalarPoly::monomial(2, mi(&[2, 0]), c(1e-6)).unwrap(),
        ])
        .unwrap();
        let sol = lie_solve(&r, 2, &spec, DEFAULT_RESONANCE_TOL).unwrap();
        assert_eq!(sol.near_resonances.len(), 1);
    }

    #[test]
    fn rejects_wrong_degree() {
        let spec = Spectrum::from_real(&[0.5]).unwrap();
        let r = VectorPoly::from_components(vec![ScalarPoly::monomial(1, mi(&[3]), c(1.0)).unwrap()]).unwrap();
        assert_eq!(
            lie_solve(&r, 2, &spec, 0.0).unwrap_err(),
            Error::WrongDegree { expected: 2, found: 3 }
        );
    }
}
