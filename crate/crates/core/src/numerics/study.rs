use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pointwise::{invert_phi_pointwise, monomial_value, tau_inverse_pointwise, tau_pointwise};
use crate::error::{Error, Result};
use crate::normalform::NormalFormSequence;
use crate::polyalg::{max_norm, sample_unit_sphere, seeded_rng, MultiIndex, VectorPoly};

/// Least-squares line through `(log₁₀ r, log₁₀ e)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Number of `(r, e)` pairs with `e > 0` that entered the fit.
    pub points: usize,
    /// `log₁₀(max r / min r)` over the points used.
    pub span_decades: f64,
}

impl SlopeFit {
    /// At least 5 points over at least 1.5 decades.
    pub fn has_recommended_leverage(&self) -> bool {
        self.points >= 5 && self.span_decades >= 1.5
    }
}

/// Ordinary least squares on log-log data, skipping pairs with a
/// non-positive or non-finite value. `None` with fewer than two usable pairs.
pub fn fit_log_log(radii: &[f64], values: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter(|(r, v)| **r > 0.0 && **v > 0.0 && v.is_finite() && r.is_finite())
        .map(|(r, v)| (r.log10(), v.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Some(SlopeFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: pts.len(),
        span_decades: hi - lo,
    })
}

/// `count` radii from `start` down to `end`, evenly spaced in log scale.
pub fn geometric_radii(start: f64, end: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite()) || count < 2 || start <= end {
        return Err(Error::InvalidArgument(format!(
            "geometric radii need start > end > 0 and count >= 2, got {start}:{end}:{count}"
        )));
    }
    let (a, b) = (start.ln(), end.ln());
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                start
            } else if i + 1 == count {
                end
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::InvalidArgument("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("radii must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub radius_index: usize,
    pub sample: usize,
    pub radius: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualStudy {
    pub m: usize,
    pub alpha: MultiIndex,
    pub mu: Complex64,
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    /// Ordered by radius, then sample index. Skipped samples are absent.
    pub records: Vec<ResidualRecord>,
    /// Largest residual at each radius; 0 if every sample was skipped.
    pub max_per_radius: Vec<f64>,
    /// NaN when fewer than two radii have a positive maximum.
    pub fitted_slope: f64,
    pub fit_rsquared: f64,
    pub fit: Option<SlopeFit>,
    /// Samples dropped because an inversion failed.
    pub skipped: usize,
    /// Smallest `εₖ` over stages `2..=m`.
    pub min_epsilon: f64,
    /// Whether the largest radius reaches `min_epsilon`.
    pub exceeds_epsilon: bool,
}

/// Measures `|ψₘ(T(x)) − μ·ψₘ(x)|` with `ψₘ = φ^α∘τₘ⁻¹` at points
/// `x = τₘ(z)`, `‖z‖ = r`, and fits the decay order in `r`.
#[allow(clippy::too_many_arguments)]
pub fn residual_study(
    t: &VectorPoly,
    seq: &NormalFormSequence,
    m: usize,
    alpha: &MultiIndex,
    radii: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<ResidualStudy> {
    let n = seq.dim();
    seq.stage(m)?;
    if t.dim() != n || alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if t.dim() != n { t.dim() } else { alpha.dim() },
        });
    }
    if alpha.order() < 1 {
        return Err(Error::InvalidArgument(
            "eigenfunction index must have |alpha| >= 1".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample per radius is required".into(),
        ));
    }
    validate_radii(radii)?;
    let min_epsilon = seq.min_epsilon(m)?;
    let exceeds_epsilon = radii[0] >= min_epsilon;
    if exceeds_epsilon {
        warn!(
            "largest radius {} is not below the smallest stage radius {min_epsilon}",
            radii[0]
        );
    }

    let mu = seq.spectrum.power(alpha);
    let psi = |x: &[Complex64]| -> Result<Complex64> {
        Ok(monomial_value(alpha, &tau_inverse_pointwise(seq, m, x, tol, max_iter)?))
    };
    let mut rng = seeded_rng(seed);
    let mut records = Vec::with_capacity(radii.len() * samples);
    let mut max_per_radius = Vec::with_capacity(radii.len());
    let mut skipped = 0;
    for (ri, &r) in radii.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for s in 0..samples {
            let z: Vec<Complex64> = sample_unit_sphere(&mut rng, n).into_iter().map(|v| v * r).collect();
            let x = tau_pointwise(seq, m, &z)?;
            let tx = t.eval_unchecked(&x);
            let residual = match (psi(&tx), psi(&x)) {
                (Ok(a), Ok(b)) => (a - mu * b).norm(),
                (Err(e), _) | (_, Err(e)) => {
                    warn!("sample {s} at radius {r} skipped: {e}");
                    skipped += 1;
                    continue;
                }
            };
            worst = worst.max(residual);
            records.push(ResidualRecord {
                radius_index: ri,
                sample: s,
                radius: r,
                residual,
            });
        }
        max_per_radius.push(worst);
    }
    let fit = fit_log_log(radii, &max_per_radius);
    Ok(ResidualStudy {
        m,
        alpha: alpha.clone(),
        mu,
        radii: radii.to_vec(),
        samples_per_radius: samples,
        records,
        max_per_radius,
        fitted_slope: fit.as_ref().map_or(f64::NAN, |f| f.slope),
        fit_rsquared: fit.as_ref().map_or(f64::NAN, |f| f.r_squared),
        fit,
        skipped,
        min_epsilon,
        exceeds_epsilon,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InverseAsymptoticsStudy {
    /// Degree of `Q`; 0 when `Q = 0`.
    pub m: usize,
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    /// `max ‖Φ⁻¹(y) − (y − Q(y))‖` over the samples at each radius.
    pub max_per_radius: Vec<f64>,
    pub fitted_slope: f64,
    pub fit: Option<SlopeFit>,
    /// Every measured error was exactly zero.
    pub degenerate: bool,
}

/// Measures how fast `Φ⁻¹(y)` departs from the two-term approximation
/// `y − Q(y)` as `‖y‖ → 0`, for `Φ = I + Q` with `Q` homogeneous.
pub fn inverse_asymptotics_study(
    q: &VectorPoly,
    radii: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<InverseAsymptoticsStudy> {
    validate_radii(radii)?;
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample per radius is required".into(),
        ));
    }
    let m = match q.degree() {
        None => 0,
        Some(m) if q.is_homogeneous_of(m) && m >= 2 => m,
        Some(_) => return Err(Error::NotHomogeneous),
    };
    let n = q.dim();
    let mut rng = seeded_rng(seed);
    let mut max_per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let y: Vec<Complex64> = sample_unit_sphere(&mut rng, n).into_iter().map(|v| v * r).collect();
            let x = invert_phi_pointwise(q, &y, tol, max_iter)?.x;
            let qy = q.eval_unchecked(&y);
            let gap: Vec<Complex64> = x.iter().zip(&y).zip(&qy).map(|((a, b), c)| a - (b - c)).collect();
            worst = worst.max(max_norm(&gap));
        }
        max_per_radius.push(worst);
    }
    let fit = fit_log_log(radii, &max_per_radius);
    Ok(InverseAsymptoticsStudy {
        m,
        radii: radii.to_vec(),
        samples_per_radius: samples,
        degenerate: max_per_radius.iter().all(|e| *e == 0.0),
        fitted_slope: fit.as_ref().map_or(f64::NAN, |f| f.slope),
        fit,
        max_per_radius,
    })
}
