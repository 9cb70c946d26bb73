use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MultiIndex, ScalarPoly};
use crate::error::{Error, Result};

/// A polynomial map ℂⁿ → ℂⁿ: component `j` is the coefficient of `e_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorPolyRepr", into = "VectorPolyRepr")]
pub struct VectorPoly {
    dim: usize,
    components: Vec<ScalarPoly>,
}

#[derive(Serialize, Deserialize)]
struct VectorPolyRepr {
    dim: usize,
    components: Vec<ScalarPoly>,
}

impl TryFrom<VectorPolyRepr> for VectorPoly {
    type Error = Error;
    fn try_from(r: VectorPolyRepr) -> Result<Self> {
        let v = VectorPoly::from_components(r.components)?;
        if v.dim != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: v.dim,
            });
        }
        Ok(v)
    }
}

impl From<VectorPoly> for VectorPolyRepr {
    fn from(v: VectorPoly) -> Self {
        VectorPolyRepr {
            dim: v.dim,
            components: v.components,
        }
    }
}

impl VectorPoly {
    pub fn zero(dim: usize) -> Self {
        VectorPoly {
            dim,
            components: vec![ScalarPoly::zero(dim); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    /// The linear map `x ↦ diag(d)·x`.
    pub fn diagonal(d: &[Complex64]) -> Self {
        let dim = d.len();
        let components = d
            .iter()
            .enumerate()
            .map(|(i, &di)| {
                ScalarPoly::monomial(dim, MultiIndex::unit(dim, i), di).expect("unit index has matching dim")
            })
            .collect();
        VectorPoly { dim, components }
    }

    /// The linear map `x ↦ M·x` for a square row-major matrix.
    pub fn linear(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut components = Vec::with_capacity(dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            let terms = row.iter().enumerate().map(|(i, &c)| (MultiIndex::unit(dim, i), c));
            components.push(ScalarPoly::from_terms(dim, terms)?);
        }
        Ok(VectorPoly { dim, components })
    }

    pub fn from_components(components: Vec<ScalarPoly>) -> Result<Self> {
        let dim = components.len();
        for c in &components {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
        }
        Ok(VectorPoly { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, j: usize) -> &ScalarPoly {
        &self.components[j]
    }

    pub fn components(&self) -> &[ScalarPoly] {
        &self.components
    }

    pub fn into_components(self) -> Vec<ScalarPoly> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarPoly::is_zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.components.iter().filter_map(ScalarPoly::degree).max()
    }

    pub fn min_order(&self) -> Option<usize> {
        self.components.iter().filter_map(ScalarPoly::min_order).min()
    }

    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.components.iter().all(|c| c.is_homogeneous_of(k))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components
            .iter()
            .map(ScalarPoly::max_abs_coeff)
            .fold(0.0, f64::max)
    }

    pub fn constant_part(&self) -> Vec<Complex64> {
        self.components.iter().map(ScalarPoly::constant_term).collect()
    }

    /// Row-major matrix of the degree-1 part: `L[j][i]` is the coefficient of `φᵢ` in component `j`.
    pub fn linear_part(&self) -> Vec<Vec<Complex64>> {
        self.components
            .iter()
            .map(|c| (0..self.dim).map(|i| c.coeff(&MultiIndex::unit(self.dim, i))).collect())
            .collect()
    }

    pub fn homogeneous_part(&self, k: usize) -> VectorPoly {
        self.map_components(|c| c.homogeneous_part(k))
    }

    pub fn truncate(&self, max_degree: usize) -> VectorPoly {
        self.map_components(|c| c.truncate(max_degree))
    }

    pub fn chop(&self, tol: f64) -> VectorPoly {
        self.map_components(|c| c.chop(tol))
    }

    pub fn scale(&self, s: Complex64) -> VectorPoly {
        self.map_components(|c| c.scale(s))
    }

    pub fn map_components(&self, f: impl Fn(&ScalarPoly) -> ScalarPoly) -> VectorPoly {
        VectorPoly {
            dim: self.dim,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn try_add(&self, other: &VectorPoly) -> Result<VectorPoly> {
        self.zip_with(other, ScalarPoly::try_add)
    }

    pub fn try_sub(&self, other: &VectorPoly) -> Result<VectorPoly> {
        self.zip_with(other, ScalarPoly::try_sub)
    }

    fn zip_with(
        &self,
        other: &VectorPoly,
        f: impl Fn(&ScalarPoly, &ScalarPoly) -> Result<ScalarPoly>,
    ) -> Result<VectorPoly> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(VectorPoly {
            dim: self.dim,
            components,
        })
    }

    /// `x ↦ M·P(x)` for a square row-major matrix `M`.
    pub fn left_multiply(&self, rows: &[Vec<Complex64>]) -> Result<VectorPoly> {
        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rows.len(),
            });
        }
        let components = rows
            .iter()
            .map(|row| {
                let mut acc = ScalarPoly::zero(self.dim);
                for (c, p) in row.iter().zip(&self.components) {
                    if *c != Complex64::new(0.0, 0.0) {
                        for (a, v) in p.terms() {
                            acc.add_term(a.clone(), c * v);
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(VectorPoly {
            dim: self.dim,
            components,
        })
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval_unchecked(x)).collect()
    }

    /// `self ∘ inner`, truncated to total degree `max_degree`.
    ///
    /// Truncation is exact: terms of the truncated result do not depend on
    /// the discarded ones, since both maps are polynomials.
    pub fn compose(&self, inner: &VectorPoly, max_degree: usize) -> Result<VectorPoly> {
        if self.dim != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: inner.dim,
            });
        }
        let mut powers = PowerCache::new(inner, max_degree);
        let components = self.components.iter().map(|c| powers.substitute(c)).collect();
        Ok(VectorPoly {
            dim: self.dim,
            components,
        })
    }

    /// `self ∘ inner` without truncation.
    pub fn compose_exact(&self, inner: &VectorPoly) -> Result<VectorPoly> {
        let d = self.degree().unwrap_or(0) * inner.degree().unwrap_or(0).max(1);
        self.compose(inner, d)
    }
}

/// `f ∘ inner` for a scalar `f`, truncated to `max_degree`.
pub fn compose_scalar(f: &ScalarPoly, inner: &VectorPoly, max_degree: usize) -> Result<ScalarPoly> {
    if f.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: inner.dim(),
        });
    }
    Ok(PowerCache::new(inner, max_degree).substitute(f))
}

/// Memoized truncated monomials `P^α = Π Pᵢ^αᵢ` of an inner map.
struct PowerCache<'a> {
    inner: &'a VectorPoly,
    max_degree: usize,
    /// Lowest order of each inner component (`None` when the component is zero).
    orders: Vec<Option<usize>>,
    cache: HashMap<MultiIndex, ScalarPoly>,
}

impl<'a> PowerCache<'a> {
    fn new(inner: &'a VectorPoly, max_degree: usize) -> Self {
        PowerCache {
            inner,
            max_degree,
            orders: inner.components.iter().map(ScalarPoly::min_order).collect(),
            cache: HashMap::new(),
        }
    }

    /// Lower bound on the order of `P^α`; `None` when `P^α` is identically zero.
    fn lowest_order(&self, alpha: &MultiIndex) -> Option<usize> {
        let mut total = 0;
        for (&e, o) in alpha.exponents().iter().zip(&self.orders) {
            if e > 0 {
                total += e as usize * (*o)?;
            }
        }
        Some(total)
    }

    fn substitute(&mut self, f: &ScalarPoly) -> ScalarPoly {
        let dim = f.dim();
        let mut out = ScalarPoly::zero(dim);
        for (alpha, c) in f.terms() {
            match self.lowest_order(alpha) {
                Some(o) if o <= self.max_degree => {}
                _ => continue,
            }
            let pw = self.power(alpha);
            for (b, v) in pw.terms() {
                out.add_term(b.clone(), c * v);
            }
        }
        out
    }

    fn power(&mut self, alpha: &MultiIndex) -> ScalarPoly {
        if alpha.is_zero() {
            return ScalarPoly::constant(alpha.dim(), Complex64::new(1.0, 0.0));
        }
        if let Some(p) = self.cache.get(alpha) {
            return p.clone();
        }
        let i = alpha
            .exponents()
            .iter()
            .position(|&e| e > 0)
            .expect("nonzero multi-index");
        let rest = alpha.decrement(i).expect("positive exponent");
        let base = self.power(&rest);
        let p = base.mul_truncated(&self.inner.components[i], self.max_degree);
        self.cache.insert(alpha.clone(), p.clone());
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mono1(k: u32, coeff: f64) -> ScalarPoly {
        ScalarPoly::monomial(1, MultiIndex::new(vec![k]), c(coeff)).unwrap()
    }

    #[test]
    fn binomial_composition_in_one_dimension() {
        let q = VectorPoly::from_components(vec![mono1(2, 1.0)]).unwrap();
        let p = VectorPoly::from_components(vec![&mono1(1, 1.0) + &mono1(2, 1.0)]).unwrap();
        let r = q.compose(&p, 10).unwrap();
        let expected = &(&mono1(2, 1.0) + &mono1(3, 2.0)) + &mono1(4, 1.0);
        assert_eq!(r.component(0), &expected);
    }

    #[test]
    fn compose_with_identity_truncates() {
        let q = VectorPoly::from_components(vec![&(&mono1(1, 0.5) + &mono1(3, 2.0)) + &mono1(5, 1.0)]).unwrap();
        let id = VectorPoly::identity(1);
        assert_eq!(q.compose(&id, 3).unwrap(), q.truncate(3));
    }

    #[test]
    fn compose_accepts_constant_terms_exactly() {
        // (1 + x)^2 with truncation at 1 keeps 1 + 2x.
        let q = VectorPoly::from_components(vec![mono1(2, 1.0)]).unwrap();
        let p = VectorPoly::from_components(vec![&ScalarPoly::constant(1, c(1.0)) + &mono1(1, 1.0)]).unwrap();
        let r = q.compose(&p, 1).unwrap();
        assert_eq!(r.component(0), &(&ScalarPoly::constant(1, c(1.0)) + &mono1(1, 2.0)));
    }

    #[test]
    fn left_multiply_and_linear() {
        let m = vec![vec![c(1.0), c(2.0)], vec![c(0.0), c(3.0)]];
        let l = VectorPoly::linear(&m).unwrap();
        assert_eq!(l.linear_part(), m);
        let v = l.evaluate(&[c(1.0), c(1.0)]).unwrap();
        assert_eq!(v, vec![c(3.0), c(3.0)]);
        let id = VectorPoly::identity(2);
        assert_eq!(id.left_multiply(&m).unwrap(), l);
    }
}
