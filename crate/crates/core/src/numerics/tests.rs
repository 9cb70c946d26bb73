use num_complex::Complex64;
use rand::Rng;

use super::*;
use crate::normalform::{run, NormalFormConfig, NormalFormSequence};
use crate::polyalg::{max_norm, sample_unit_ball, seeded_rng, MultiIndex, ScalarPoly, VectorPoly};
use crate::spectrum::Spectrum;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

fn square_1d() -> VectorPoly {
    VectorPoly::from_components(vec![ScalarPoly::monomial(1, mi(&[2]), c(1.0)).unwrap()]).unwrap()
}

fn worked_1d(d: usize) -> (VectorPoly, NormalFormSequence) {
    let p = ScalarPoly::from_terms(1, [(mi(&[1]), c(0.5)), (mi(&[2]), c(1.0))]).unwrap();
    let t = VectorPoly::from_components(vec![p]).unwrap();
    let spec = Spectrum::from_real(&[0.5]).unwrap();
    let seq = run(&t, &spec, &NormalFormConfig::with_degree(d)).unwrap();
    (t, seq)
}

#[test]
#[allow(clippy::excessive_precision)]
fn quadratic_formula_oracle() {
    let oracle = (-1.0 + 1.4f64.sqrt()) / 2.0;
    let inv = invert_phi_pointwise(&square_1d(), &[c(0.1)], 1e-14, DEFAULT_MAX_ITER).unwrap();
    assert!((inv.x[0] - c(0.09160797830996161)).norm() < 1e-13);
    assert!((inv.x[0] - c(oracle)).norm() < 1e-15);
    assert!(inv.residual <= 1e-14);
}

#[test]
fn origin_is_fixed() {
    let inv = invert_phi_pointwise(&square_1d(), &[c(0.0)], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(inv.x, vec![c(0.0)]);
}

#[test]
fn residual_contract_in_two_dimensions() {
    let mut rng = seeded_rng(3);
    let terms = MultiIndex::all_of_order(2, 2);
    let q = VectorPoly::from_components(
        (0..2)
            .map(|_| {
                ScalarPoly::from_terms(
                    2,
                    terms.iter().map(|a| {
                        (
                            a.clone(),
                            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                        )
                    }),
                )
                .unwrap()
            })
            .collect(),
    )
    .unwrap();
    for _ in 0..200 {
        let y: Vec<Complex64> = sample_unit_ball(&mut rng, 2).into_iter().map(|v| v * 0.05).collect();
        let inv = invert_phi_pointwise(&q, &y, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let phi = crate::normalform::near_identity(&q).evaluate(&inv.x).unwrap();
        let gap: Vec<Complex64> = phi.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert!(max_norm(&gap) <= DEFAULT_TOL);
    }
}

#[test]
fn divergence_is_reported() {
    let err = invert_phi_pointwise(&square_1d(), &[c(5.0)], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap_err();
    assert!(matches!(err, crate::Error::NoConvergence { .. }));
    assert!(invert_phi_pointwise(&square_1d(), &[c(0.1)], 0.0, 10).is_err());
}

#[test]
fn single_factor_inverse_matches_direct_inversion() {
    let (_, seq) = worked_1d(4);
    let x = [c(0.01)];
    let direct = invert_phi_pointwise(&seq.stage(2).unwrap().q, &x, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(
        tau_inverse_pointwise(&seq, 2, &x, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(),
        direct.x
    );
    assert_eq!(
        tau_inverse_pointwise(&seq, 4, &[c(0.0)], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(),
        vec![c(0.0)]
    );
}

#[test]
fn tau_round_trip() {
    let (_, seq) = worked_1d(5);
    let mut rng = seeded_rng(8);
    for m in 2..=5 {
        for _ in 0..50 {
            let x: Vec<Complex64> = sample_unit_ball(&mut rng, 1).into_iter().map(|v| v * 0.01).collect();
            let z = tau_inverse_pointwise(&seq, m, &x, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            let back = tau_pointwise(&seq, m, &z).unwrap();
            assert!((back[0] - x[0]).norm() <= m as f64 * DEFAULT_TOL);
        }
    }
}

#[test]
fn eigenfunction_of_worked_example_at_stage_two() {
    // Φ₂(z) = z − 4z², so Φ₂⁻¹(x) = (1 − √(1 − 16x)) / 8.
    let (_, seq) = worked_1d(4);
    for x in [0.001, -0.004, 0.01] {
        let v = eval_approx_eigenfunction(&mi(&[1]), &seq, 2, &[c(x)], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let oracle = (1.0 - (1.0 - 16.0 * x).sqrt()) / 8.0;
        assert!((v.value - c(oracle)).norm() < 1e-15, "{x}: {} vs {oracle}", v.value);
        assert_eq!(v.mu, c(0.5));
    }
    let zero = eval_approx_eigenfunction(&mi(&[2]), &seq, 3, &[c(0.0)], DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(zero.value, c(0.0));
    assert_eq!(zero.mu, c(0.25));
}

#[test]
fn linear_map_gives_exact_monomials() {
    let spec = Spectrum::from_real(&[0.5, 0.3]).unwrap();
    let t = VectorPoly::diagonal(spec.lambdas());
    let seq = run(&t, &spec, &NormalFormConfig::with_degree(3)).unwrap();
    let x = [c(0.2), Complex64::new(0.1, -0.3)];
    let v = eval_approx_eigenfunction(&mi(&[1, 2]), &seq, 3, &x, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(v.value, x[0] * x[1] * x[1]);

    let radii = geometric_radii(0.03, 0.001, 6).unwrap();
    let study = residual_study(&t, &seq, 3, &mi(&[1, 1]), &radii, 20, 4, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!(study.max_per_radius.iter().all(|r| *r < 1e-12));
}

#[test]
fn domain_chain_basics() {
    let (_, seq) = worked_1d(4);
    let r = domain_check(&seq, 4, &[c(0.0)]).unwrap();
    assert!(r.inside);
    assert_eq!(r.entries.iter().map(|e| e.stage).collect::<Vec<_>>(), vec![4, 3, 2]);

    let eps = seq.stage(4).unwrap().epsilon;
    let r = domain_check(&seq, 4, &[c(eps)]).unwrap();
    assert!(!r.inside);
    assert!(!r.entries[0].inside);

    let mut rng = seeded_rng(12);
    let small = seq.min_epsilon(4).unwrap() / 4.0;
    for _ in 0..100 {
        let z = sample_unit_ball(&mut rng, 1);
        for s in [small, small / 2.0] {
            let p: Vec<Complex64> = z.iter().map(|v| v * s).collect();
            assert!(domain_check(&seq, 4, &p).unwrap().inside);
        }
    }
}

#[test]
fn orbit_stays_in_domain_near_the_origin() {
    let (t, seq) = worked_1d(4);
    let r = orbit_check(
        &t,
        &seq,
        3,
        &[c(0.005)],
        DEFAULT_ORBIT_STEPS,
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
    )
    .unwrap();
    assert!(r.all_inside);
    assert_eq!(r.points_checked, DEFAULT_ORBIT_STEPS + 1);
    let far = orbit_check(
        &t,
        &seq,
        3,
        &[c(0.9)],
        DEFAULT_ORBIT_STEPS,
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
    )
    .unwrap();
    assert_eq!(far.first_failure, Some(0));
}

#[test]
fn fit_recovers_exact_power() {
    let radii = geometric_radii(0.1, 0.001, 7).unwrap();
    assert_eq!(radii[0], 0.1);
    assert_eq!(radii[6], 0.001);
    let vals: Vec<f64> = radii.iter().map(|r| 3.0 * r.powi(4)).collect();
    let fit = fit_log_log(&radii, &vals).unwrap();
    assert!((fit.slope - 4.0).abs() < 1e-12);
    assert!((fit.intercept - 3f64.log10()).abs() < 1e-12);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
    assert!(fit.has_recommended_leverage());
    assert!(fit_log_log(&[0.1, 0.01], &[0.0, 0.0]).is_none());
    assert!(geometric_radii(0.001, 0.1, 5).is_err());
}

#[test]
fn residual_order_on_worked_example() {
    let (t, seq) = worked_1d(5);
    let radii = geometric_radii(10f64.powf(-1.5), 1e-3, 6).unwrap();
    for (m, min_slope) in [(2, 2.7), (3, 3.7)] {
        let s = residual_study(&t, &seq, m, &mi(&[1]), &radii, 16, 1, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(s.skipped, 0);
        assert!(s.fitted_slope >= min_slope, "m = {m}: slope {}", s.fitted_slope);
    }
}

#[test]
fn koopman_identity_two_ways() {
    // ψₘ(T(x)) directly versus ψ(Tₘ(z)) with Tₘ from the pipeline.
    let (t, seq) = worked_1d(6);
    let mut rng = seeded_rng(21);
    for m in 2..=4 {
        let tm = &seq.stage(m).unwrap().t_after;
        for _ in 0..20 {
            let z: Vec<Complex64> = sample_unit_ball(&mut rng, 1).into_iter().map(|v| v * 0.01).collect();
            let x = tau_pointwise(&seq, m, &z).unwrap();
            let direct = eval_approx_eigenfunction(
                &mi(&[1]),
                &seq,
                m,
                &t.evaluate(&x).unwrap(),
                DEFAULT_TOL,
                DEFAULT_MAX_ITER,
            )
            .unwrap()
            .value;
            let via = tm.evaluate(&z).unwrap()[0];
            assert!((direct - via).norm() < 1e-9);
        }
    }
}

#[test]
fn inverse_asymptotics_of_square() {
    let radii = geometric_radii(0.05, 1e-3, 6).unwrap();
    let s = inverse_asymptotics_study(&square_1d(), &radii, 16, 2, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(s.m, 2);
    assert!(s.fitted_slope >= 2.7, "{}", s.fitted_slope);
    let zero = inverse_asymptotics_study(&VectorPoly::zero(2), &radii, 4, 2, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!(zero.degenerate);
    assert!(zero.fit.is_none());
    assert!(inverse_asymptotics_study(&square_1d(), &[0.01, 0.02], 4, 2, DEFAULT_TOL, DEFAULT_MAX_ITER).is_err());
}
