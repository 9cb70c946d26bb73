use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalform::NormalFormSequence;
use crate::polyalg::{max_norm, MultiIndex, VectorPoly};

pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Default number of forward iterates in [`orbit_check`].
pub const DEFAULT_ORBIT_STEPS: usize = 10;

/// Outcome of the fixed-point iteration for `Φ(x) = x + Q(x) = y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Inversion {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Ratio of the last two successive-iterate distances that sat above
    /// the rounding floor; 0 if there were fewer than two.
    pub last_ratio: f64,
    pub max_ratio: f64,
    /// `‖x + Q(x) − y‖` at the returned point.
    pub residual: f64,
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn rounding_floor(x: &[Complex64]) -> f64 {
    64.0 * f64::EPSILON * max_norm(x).max(f64::MIN_POSITIVE)
}

/// Solves `x + Q(x) = y` by `x_{n+1} = y − Q(xₙ)` from `x₀ = 0`.
///
/// Stops once successive iterates differ by at most `tol`, then keeps
/// iterating while the step still shrinks so the answer sits at the
/// rounding floor rather than at `tol`.
pub fn invert_phi_pointwise(q: &VectorPoly, y: &[Complex64], tol: f64, max_iter: usize) -> Result<Inversion> {
    if y.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: y.len(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let residual_at = |x: &[Complex64]| {
        let qx = q.eval_unchecked(x);
        max_norm(
            &x.iter()
                .zip(&qx)
                .zip(y)
                .map(|((a, b), c)| a + b - c)
                .collect::<Vec<_>>(),
        )
    };

    let mut x = vec![Complex64::new(0.0, 0.0); y.len()];
    let mut prev_diff = f64::INFINITY;
    let mut last_ratio: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let next = sub(y, &q.eval_unchecked(&x));
        let diff = max_norm(&sub(&next, &x));
        if !diff.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                last_ratio: f64::INFINITY,
            });
        }
        if converged && diff >= prev_diff {
            break;
        }
        let floor = rounding_floor(&x);
        if prev_diff.is_finite() && prev_diff > floor && diff > floor {
            last_ratio = diff / prev_diff;
            max_ratio = max_ratio.max(last_ratio);
        }
        x = next;
        converged |= diff <= tol;
        if converged && diff <= floor {
            break;
        }
        prev_diff = diff;
    }
    if !converged {
        return Err(Error::NoConvergence { iterations, last_ratio });
    }
    finish(x, iterations, last_ratio, max_ratio, residual_at, tol)
}

/// The raw iterates `x₀ = 0, x₁, …, x_steps` of `x ↦ y − Q(x)`.
pub fn phi_inverse_iterates(q: &VectorPoly, y: &[Complex64], steps: usize) -> Result<Vec<Vec<Complex64>>> {
    if y.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: y.len(),
        });
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(vec![Complex64::new(0.0, 0.0); y.len()]);
    for _ in 0..steps {
        let qx = q.eval_unchecked(out.last().expect("nonempty"));
        out.push(sub(y, &qx));
    }
    Ok(out)
}

/// Largest `‖xₙ₊₁ − xₙ‖ / ‖xₙ − xₙ₋₁‖` over steps whose three iterates all
/// lie in the open ball of the given radius, ignoring steps at the rounding
/// floor. This is the observed Lipschitz ratio of the iteration map on that
/// ball; 0 if no step qualifies.
pub fn contraction_ratio_in_ball(iterates: &[Vec<Complex64>], radius: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for w in iterates.windows(3) {
        if !w.iter().all(|p| max_norm(p) < radius) {
            continue;
        }
        let d1 = max_norm(&sub(&w[1], &w[0]));
        let d2 = max_norm(&sub(&w[2], &w[1]));
        let floor = rounding_floor(&w[1]);
        if d1 > floor && d2 > floor {
            worst = worst.max(d2 / d1);
        }
    }
    worst
}

fn finish(
    x: Vec<Complex64>,
    iterations: usize,
    last_ratio: f64,
    max_ratio: f64,
    residual_at: impl Fn(&[Complex64]) -> f64,
    tol: f64,
) -> Result<Inversion> {
    let residual = residual_at(&x);
    if residual > tol {
        return Err(Error::NoConvergence { iterations, last_ratio });
    }
    Ok(Inversion {
        x,
        iterations,
        last_ratio,
        max_ratio,
        residual,
    })
}

fn check_stage_range(seq: &NormalFormSequence, m: usize) -> Result<()> {
    seq.stage(m).map(|_| ())
}

/// `τₘ(z) = Φ₂(Φ₃(⋯Φₘ(z)))`, evaluated factor by factor without truncation.
pub fn tau_pointwise(seq: &NormalFormSequence, m: usize, z: &[Complex64]) -> Result<Vec<Complex64>> {
    check_stage_range(seq, m)?;
    if z.len() != seq.dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.dim(),
            found: z.len(),
        });
    }
    let mut w = z.to_vec();
    for k in (2..=m).rev() {
        let qw = seq.stage(k)?.q.eval_unchecked(&w);
        w = w.iter().zip(&qw).map(|(a, b)| a + b).collect();
    }
    Ok(w)
}

/// `τₘ⁻¹(x) = Φₘ⁻¹(⋯Φ₂⁻¹(x))`: `Φ₂⁻¹` is applied first.
pub fn tau_inverse_pointwise(
    seq: &NormalFormSequence,
    m: usize,
    x: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>> {
    check_stage_range(seq, m)?;
    if x.len() != seq.dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.dim(),
            found: x.len(),
        });
    }
    let mut w = x.to_vec();
    for k in 2..=m {
        let q = &seq.stage(k)?.q;
        if q.is_zero() {
            continue;
        }
        w = invert_phi_pointwise(q, &w, tol, max_iter)
            .map_err(|e| Error::StageInversion {
                stage: k,
                source: Box::new(e),
            })?
            .x;
    }
    Ok(w)
}

/// `φ^α(z) = Π zᵢ^{αᵢ}`.
pub fn monomial_value(alpha: &MultiIndex, z: &[Complex64]) -> Complex64 {
    alpha
        .exponents()
        .iter()
        .zip(z)
        .fold(Complex64::new(1.0, 0.0), |acc, (&e, v)| acc * v.powu(e))
}

/// Value of `ψ∘τₘ⁻¹` at a point, with `ψ = φ^α`, and its eigenvalue `λ^α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionValue {
    pub value: Complex64,
    pub mu: Complex64,
}

pub fn eval_approx_eigenfunction(
    alpha: &MultiIndex,
    seq: &NormalFormSequence,
    m: usize,
    x: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<EigenfunctionValue> {
    if alpha.dim() != seq.dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.dim(),
            found: alpha.dim(),
        });
    }
    if alpha.order() < 1 {
        return Err(Error::InvalidArgument(
            "eigenfunction index must have |alpha| >= 1".into(),
        ));
    }
    let z = tau_inverse_pointwise(seq, m, x, tol, max_iter)?;
    Ok(EigenfunctionValue {
        value: monomial_value(alpha, &z),
        mu: seq.spectrum.power(alpha),
    })
}

/// One link of the domain chain: the point about to be fed to `Φ_stage`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainEntry {
    pub stage: usize,
    pub norm: f64,
    pub epsilon: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub inside: bool,
    /// Stages `m, m−1, …, 2` in the order they are checked.
    pub entries: Vec<DomainEntry>,
}

/// Checks `z ∈ B_{εₘ}`, `Φₘ(z) ∈ B_{εₘ₋₁}`, …, `Φ₃∘⋯∘Φₘ(z) ∈ B_{ε₂}`.
///
/// Every link is evaluated and reported, even after the first failure.
pub fn domain_check(seq: &NormalFormSequence, m: usize, z: &[Complex64]) -> Result<DomainReport> {
    check_stage_range(seq, m)?;
    if z.len() != seq.dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.dim(),
            found: z.len(),
        });
    }
    let mut w = z.to_vec();
    let mut entries = Vec::with_capacity(m - 1);
    for k in (2..=m).rev() {
        let stage = seq.stage(k)?;
        let norm = max_norm(&w);
        entries.push(DomainEntry {
            stage: k,
            norm,
            epsilon: stage.epsilon,
            inside: norm < stage.epsilon,
        });
        let qw = stage.q.eval_unchecked(&w);
        w = w.iter().zip(&qw).map(|(a, b)| a + b).collect();
    }
    Ok(DomainReport {
        inside: entries.iter().all(|e| e.inside),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Number of orbit points examined, counting `x` itself.
    pub points_checked: usize,
    pub all_inside: bool,
    /// Index `i` of the first `Tⁱ(x)` that failed inversion or the chain check.
    pub first_failure: Option<usize>,
}

/// Follows `x, T(x), …, T^steps(x)` and runs [`domain_check`] on `τₘ⁻¹` of
/// each point. A finite-horizon stand-in for `T`-invariance of the domain.
pub fn orbit_check(
    t: &VectorPoly,
    seq: &NormalFormSequence,
    m: usize,
    x: &[Complex64],
    steps: usize,
    tol: f64,
    max_iter: usize,
) -> Result<OrbitReport> {
    check_stage_range(seq, m)?;
    if t.dim() != seq.dim() || x.len() != seq.dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.dim(),
            found: if t.dim() != seq.dim() { t.dim() } else { x.len() },
        });
    }
    let mut point = x.to_vec();
    for i in 0..=steps {
        let ok = match tau_inverse_pointwise(seq, m, &point, tol, max_iter) {
            Ok(z) => domain_check(seq, m, &z)?.inside,
            Err(_) => false,
        };
        if !ok {
            return Ok(OrbitReport {
                points_checked: i + 1,
                all_inside: false,
                first_failure: Some(i),
            });
        }
        point = t.eval_unchecked(&point);
    }
    Ok(OrbitReport {
        points_checked: steps + 1,
        all_inside: true,
        first_failure: None,
    })
}
