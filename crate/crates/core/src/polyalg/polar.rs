//! Symmetric multilinear forms of homogeneous polynomials via polarization.

use num_complex::Complex64;

use super::ScalarPoly;
use crate::error::{Error, Result};

/// Evaluates the symmetric m-linear form `Aˢ` with `Aˢ(x,…,x) = P(x)` at `(x₁,…,x_m)`:
///
/// `Aˢ(x₁,…,x_m) = 1/(2^m m!) Σ_{ε∈{±1}^m} ε₁⋯ε_m P(Σ εᵢxᵢ)`.
///
/// `P` must be homogeneous of degree `m = xs.len()`. The zero polynomial is
/// accepted for any `m`.
pub fn polarize(p: &ScalarPoly, xs: &[&[Complex64]]) -> Result<Complex64> {
    let m = xs.len();
    if !p.is_homogeneous_of(m) {
        return match p.degree() {
            Some(d) if p.is_homogeneous_of(d) => Err(Error::WrongDegree { expected: m, found: d }),
            _ => Err(Error::NotHomogeneous),
        };
    }
    let dim = p.dim();
    for x in xs {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
    }
    if m == 0 {
        return Ok(p.constant_term());
    }
    if m > 30 {
        return Err(Error::InvalidArgument(format!("polarization degree {m} too large")));
    }

    let mut acc = Complex64::new(0.0, 0.0);
    let mut point = vec![Complex64::new(0.0, 0.0); dim];
    for mask in 0u64..(1u64 << m) {
        point.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut sign = 1.0;
        for (i, x) in xs.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
            sign *= s;
            for (v, xi) in point.iter_mut().zip(x.iter()) {
                *v += xi * s;
            }
        }
        acc += p.eval_unchecked(&point) * sign;
    }
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    Ok(acc / (2f64.powi(m as i32) * factorial))
}
