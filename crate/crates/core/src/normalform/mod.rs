//! Degree-by-degree normal-form reduction of `T(x) = Λx + P₂(x) + ⋯`.
//!
//! Stage `m` picks `Φₘ = I + Qₘ` with `Qₘ` homogeneous of degree `m` solving
//! the homological equation for the degree-`m` part of the current map, and
//! replaces the map by `Φₘ⁻¹ ∘ Tₘ₋₁ ∘ Φₘ`. All compositions are truncated at a
//! single working degree `D`. The approximate conjugacies are
//! `τₘ = Φ₂ ∘ ⋯ ∘ Φₘ`.

mod homological;
mod inverse;

pub use homological::{lie_solve, LieSolution};
pub use inverse::{epsilon_bound, near_identity, series_inverse};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::VectorPoly;
use crate::spectrum::{ResonanceEntry, Spectrum, DEFAULT_RESONANCE_TOL};

/// Pipeline settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalFormConfig {
    /// Working truncation degree `D`.
    pub degree: usize,
    /// Contraction ratio used for the inversion radii, in `(0, 1)`.
    pub beta: f64,
    /// `|μ|` at or below which a division is refused.
    pub resonance_tol: f64,
    /// Relative tolerance for the structural checks on intermediate maps.
    pub structure_tol: f64,
    /// Samples for the sup-norm estimates behind each `εₘ`.
    pub norm_samples: usize,
    pub seed: u64,
    /// Refuse maps with some `|λᵢ| ≥ 1`.
    pub require_stable: bool,
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        NormalFormConfig {
            degree: 5,
            beta: 0.5,
            resonance_tol: DEFAULT_RESONANCE_TOL,
            structure_tol: 1e-10,
            norm_samples: 4096,
            seed: 0,
            require_stable: true,
        }
    }
}

impl NormalFormConfig {
    pub fn with_degree(degree: usize) -> Self {
        NormalFormConfig {
            degree,
            ..Default::default()
        }
    }
}

/// Result of eliminating the degree-`m` terms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalFormStage {
    pub m: usize,
    /// Homogeneous of degree `m`.
    pub q: VectorPoly,
    /// `Φₘ⁻¹ ∘ Tₘ₋₁ ∘ Φₘ` truncated at `D`; no terms of degrees `2..=m`.
    pub t_after: VectorPoly,
    /// Contraction radius for inverting `Φₘ`.
    pub epsilon: f64,
    pub near_resonances: Vec<ResonanceEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalFormSequence {
    pub spectrum: Spectrum,
    pub degree: usize,
    pub beta: f64,
    /// The map as supplied (not truncated).
    pub input: VectorPoly,
    /// Stages `m = 2, 3, …, D` in order.
    pub stages: Vec<NormalFormStage>,
    /// `τₘ` truncated at `D`, indexed like `stages`.
    pub taus: Vec<VectorPoly>,
}

impl NormalFormSequence {
    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn stage(&self, m: usize) -> Result<&NormalFormStage> {
        if m < 2 || m > self.degree {
            return Err(Error::InvalidArgument(format!("stage {m} outside 2..={}", self.degree)));
        }
        Ok(&self.stages[m - 2])
    }

    /// `Φₘ = I + Qₘ`.
    pub fn phi(&self, m: usize) -> Result<VectorPoly> {
        Ok(near_identity(&self.stage(m)?.q))
    }

    /// `τₘ = Φ₂ ∘ ⋯ ∘ Φₘ` truncated at the working degree.
    pub fn tau(&self, m: usize) -> Result<&VectorPoly> {
        self.stage(m)?;
        Ok(&self.taus[m - 2])
    }

    /// `τₘ` truncated at an arbitrary degree.
    pub fn tau_truncated(&self, m: usize, max_degree: usize) -> Result<VectorPoly> {
        let mut tau = self.phi(2)?.truncate(max_degree);
        for k in 3..=m {
            tau = tau.compose(&self.phi(k)?, max_degree)?;
        }
        Ok(tau)
    }

    /// The fully reduced map after the last stage.
    pub fn final_map(&self) -> &VectorPoly {
        &self
            .stages
            .last()
            .expect("a sequence always has at least one stage")
            .t_after
    }

    /// Smallest `εₖ` over stages `2..=m`.
    pub fn min_epsilon(&self, m: usize) -> Result<f64> {
        self.stage(m)?;
        Ok(self.stages[..m - 1]
            .iter()
            .map(|s| s.epsilon)
            .fold(f64::INFINITY, f64::min))
    }
}

fn max_linear_deviation(t: &VectorPoly, spec: &Spectrum) -> f64 {
    let lin = t.linear_part();
    let mut dev: f64 = 0.0;
    for (j, row) in lin.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let target = if i == j {
                spec.lambdas()[j]
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((v - target).norm());
        }
    }
    dev
}

fn check_structure(t: &VectorPoly, spec: &Spectrum, cleared_up_to: usize, tol: f64) -> Result<()> {
    if t.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: t.dim(),
        });
    }
    if t.constant_part().iter().any(|c| *c != Complex64::new(0.0, 0.0)) {
        return Err(Error::NonzeroConstant);
    }
    let scale = t.max_abs_coeff().max(1.0);
    let deviation = max_linear_deviation(t, spec);
    if deviation > tol * scale {
        return Err(Error::LinearPartMismatch { deviation });
    }
    for k in 2..=cleared_up_to {
        let part = t.homogeneous_part(k).max_abs_coeff();
        if part > tol * scale {
            return Err(Error::Precondition(format!(
                "degree-{k} terms of size {part:e} remain before stage {}",
                cleared_up_to + 1
            )));
        }
    }
    Ok(())
}

/// Eliminates the degree-`order` terms of `t_prev`, which must already be
/// free of degrees `2..order`.
pub fn normal_form_step(
    t_prev: &VectorPoly,
    order: usize,
    spec: &Spectrum,
    cfg: &NormalFormConfig,
) -> Result<NormalFormStage> {
    if order < 2 || cfg.degree < order {
        return Err(Error::InvalidArgument(format!(
            "stage order {order} must satisfy 2 <= order <= D = {}",
            cfg.degree
        )));
    }
    check_structure(t_prev, spec, order - 1, cfg.structure_tol)?;
    let d = cfg.degree;

    let r_hat = t_prev.homogeneous_part(order);
    let LieSolution { q, near_resonances } = lie_solve(&r_hat, order, spec, cfg.resonance_tol)?;
    let phi = near_identity(&q);
    let t_after = if q.is_zero() {
        t_prev.truncate(d)
    } else {
        let inner = t_prev.compose(&phi, d)?;
        series_inverse(&phi, d)?.compose(&inner, d)?
    };
    debug_assert!(check_structure(&t_after, spec, order, cfg.structure_tol.max(1e-8)).is_ok());

    let epsilon = epsilon_bound(&q, cfg.beta, cfg.norm_samples, cfg.seed.wrapping_add(order as u64))?;
    Ok(NormalFormStage {
        m: order,
        q,
        t_after,
        epsilon,
        near_resonances,
    })
}

/// Runs stages `m = 2..=D` on `t`, whose linear part must be `diag(λ)`.
pub fn run(t: &VectorPoly, spec: &Spectrum, cfg: &NormalFormConfig) -> Result<NormalFormSequence> {
    if cfg.degree < 2 {
        return Err(Error::InvalidArgument(format!(
            "working degree must be at least 2, got {}",
            cfg.degree
        )));
    }
    if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must lie in (0, 1), got {}",
            cfg.beta
        )));
    }
    if cfg.require_stable {
        spec.check_stable()?;
    }
    check_structure(t, spec, 1, cfg.structure_tol)?;

    let mut current = t.truncate(cfg.degree);
    let mut stages = Vec::with_capacity(cfg.degree - 1);
    let mut taus: Vec<VectorPoly> = Vec::with_capacity(cfg.degree - 1);
    for m in 2..=cfg.degree {
        let stage = normal_form_step(&current, m, spec, cfg)?;
        let phi = near_identity(&stage.q);
        let tau = match taus.last() {
            None => phi.truncate(cfg.degree),
            Some(prev) => prev.compose(&phi, cfg.degree)?,
        };
        taus.push(tau);
        current = stage.t_after.clone();
        stages.push(stage);
    }
    Ok(NormalFormSequence {
        spectrum: spec.clone(),
        degree: cfg.degree,
        beta: cfg.beta,
        input: t.clone(),
        stages,
        taus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{MultiIndex, ScalarPoly};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn worked_1d() -> (VectorPoly, Spectrum) {
        let p = ScalarPoly::from_terms(1, [(mi(&[1]), c(0.5)), (mi(&[2]), c(1.0))]).unwrap();
        (
            VectorPoly::from_components(vec![p]).unwrap(),
            Spectrum::from_real(&[0.5]).unwrap(),
        )
    }

    #[test]
    fn first_stage_of_worked_example() {
        let (t, spec) = worked_1d();
        let cfg = NormalFormConfig::with_degree(4);
        let stage = normal_form_step(&t, 2, &spec, &cfg).unwrap();
        assert_eq!(stage.q.component(0).coeff(&mi(&[2])), c(-4.0));
        assert!(stage.t_after.component(0).coeff(&mi(&[2])).norm() < 1e-14);
        assert_eq!(stage.t_after.component(0).coeff(&mi(&[1])), c(0.5));
    }

    #[test]
    fn worked_example_is_fully_linearized() {
        let (t, spec) = worked_1d();
        let seq = run(&t, &spec, &NormalFormConfig::with_degree(4)).unwrap();
        assert_eq!(seq.stages.len(), 3);
        let fin = seq.final_map();
        for k in 2..=4 {
            assert!(fin.homogeneous_part(k).max_abs_coeff() < 1e-12);
        }
        assert!((fin.component(0).coeff(&mi(&[1])) - c(0.5)).norm() < 1e-12);
        assert_eq!(
            seq.tau(2).unwrap().homogeneous_part(2).component(0).coeff(&mi(&[2])),
            c(-4.0)
        );
    }

    #[test]
    fn linear_input_is_a_fixed_point() {
        let spec = Spectrum::from_real(&[0.5, 0.3]).unwrap();
        let t = VectorPoly::diagonal(spec.lambdas());
        let seq = run(&t, &spec, &NormalFormConfig::with_degree(5)).unwrap();
        for s in &seq.stages {
            assert!(s.q.is_zero());
            assert_eq!(s.t_after, t);
            assert_eq!(s.epsilon, 1.0);
        }
        for m in 2..=5 {
            assert_eq!(seq.tau(m).unwrap(), &VectorPoly::identity(2));
        }
    }

    #[test]
    fn tau_has_identity_linear_part() {
        let (t, spec) = worked_1d();
        let seq = run(&t, &spec, &NormalFormConfig::with_degree(6)).unwrap();
        for m in 2..=6 {
            assert_eq!(seq.tau(m).unwrap().homogeneous_part(1), VectorPoly::identity(1));
        }
        assert_eq!(seq.tau(2).unwrap(), &seq.phi(2).unwrap());
        assert_eq!(&seq.tau_truncated(4, 6).unwrap(), seq.tau(4).unwrap());
        assert!(seq.tau(7).is_err());
        assert!(seq.tau(1).is_err());
    }

    #[test]
    fn rejects_bad_configuration_and_inputs() {
        let (t, spec) = worked_1d();
        assert!(run(&t, &spec, &NormalFormConfig::with_degree(1)).is_err());

        let unstable = Spectrum::from_real(&[1.5]).unwrap();
        let tu = VectorPoly::diagonal(unstable.lambdas());
        assert!(matches!(
            run(&tu, &unstable, &NormalFormConfig::with_degree(3)),
            Err(Error::Unstable { .. })
        ));
        let cfg = NormalFormConfig {
            require_stable: false,
            ..NormalFormConfig::with_degree(3)
        };
        assert!(run(&tu, &unstable, &cfg).is_ok());

        let wrong = Spectrum::from_real(&[0.4]).unwrap();
        assert!(matches!(
            run(&t, &wrong, &NormalFormConfig::with_degree(3)),
            Err(Error::LinearPartMismatch { .. })
        ));
    }

    #[test]
    fn resonance_aborts_with_stage_and_term() {
        let spec = Spectrum::from_real(&[0.5, 0.25]).unwrap();
        let t = VectorPoly::from_components(vec![
            ScalarPoly::monomial(2, mi(&[1, 0]), c(0.5)).unwrap(),
            ScalarPoly::from_terms(2, [(mi(&[0, 1]), c(0.25)), (mi(&[2, 0]), c(1.0))]).unwrap(),
        ])
        .unwrap();
        match run(&t, &spec, &NormalFormConfig::with_degree(4)) {
            Err(Error::Resonance {
                order,
                component,
                alpha,
                ..
            }) => assert_eq!((order, component, alpha), (2, 1, mi(&[2, 0]))),
            other => panic!("expected resonance, got {other:?}"),
        }
    }
}
