use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polyalg::{sup_norm_estimate, VectorPoly};

const LINEAR_PART_TOL: f64 = 1e-12;

/// Truncated compositional inverse of a near-identity map `Φ = I + Q`.
///
/// Runs the fixed-point iteration `Ψ ← I − Q∘Ψ` in the algebra truncated at
/// `max_degree`. Each pass fixes at least one more degree, so the iterates
/// become stationary after at most `max_degree` passes.
pub fn series_inverse(phi: &VectorPoly, max_degree: usize) -> Result<VectorPoly> {
    let n = phi.dim();
    if phi.constant_part().iter().any(|c| *c != Complex64::new(0.0, 0.0)) {
        return Err(Error::NonzeroConstant);
    }
    let lin = phi.linear_part();
    for (j, row) in lin.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            if (v - target).norm() > LINEAR_PART_TOL {
                return Err(Error::NonIdentityLinearPart);
            }
        }
    }
    let identity = VectorPoly::identity(n);
    let nonlinear = phi.try_sub(&phi.homogeneous_part(1))?;
    if nonlinear.is_zero() || max_degree < 2 {
        return Ok(identity.truncate(max_degree));
    }

    let mut psi = identity.clone();
    for _ in 0..=max_degree {
        let next = identity.try_sub(&nonlinear.compose(&psi, max_degree)?)?;
        if next == psi {
            return Ok(psi);
        }
        psi = next;
    }
    // Degree k of the iterate depends only on degrees < k of the previous
    // one, so stationarity after max_degree passes is guaranteed.
    unreachable!("truncated reversion failed to stabilize");
}

/// Radius of the ball on which `x ↦ y − Q(x)` contracts with ratio `beta`:
/// `min{1, (β / (m‖Q‖))^{1/(m−1)}}` for `Q` homogeneous of degree `m`.
///
/// `‖Q‖` is the sampled sup-norm estimate, which stands in for the norm of
/// the multilinear form defining `Q`. `Q = 0` gives 1.
pub fn epsilon_bound(q: &VectorPoly, beta: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {beta}")));
    }
    let m = match q.degree() {
        None => return Ok(1.0),
        Some(m) => m,
    };
    if !q.is_homogeneous_of(m) {
        return Err(Error::NotHomogeneous);
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "change of variables needs degree >= 2, got {m}"
        )));
    }
    let norm = sup_norm_estimate(q, samples, seed);
    if norm == 0.0 {
        return Ok(1.0);
    }
    let radius = (beta / (m as f64 * norm)).powf(1.0 / (m as f64 - 1.0));
    Ok(radius.min(1.0))
}

/// `I + Q`.
pub fn near_identity(q: &VectorPoly) -> VectorPoly {
    VectorPoly::identity(q.dim())
        .try_add(q)
        .expect("dimensions agree by construction")
}
