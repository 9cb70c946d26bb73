use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MultiIndex;
use crate::error::{Error, Result};

/// A term `c·φ^α` in serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub alpha: MultiIndex,
    pub coeff: Complex64,
}

/// Sparse polynomial `Σ c_α φ^α` over ℂ in `dim` variables.
///
/// Coefficients that are exactly zero are never stored, so structural
/// equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarPolyRepr", into = "ScalarPolyRepr")]
pub struct ScalarPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ScalarPolyRepr {
    dim: usize,
    terms: Vec<Term>,
}

impl TryFrom<ScalarPolyRepr> for ScalarPoly {
    type Error = Error;

    fn try_from(r: ScalarPolyRepr) -> Result<Self> {
        ScalarPoly::from_terms(r.dim, r.terms.into_iter().map(|t| (t.alpha, t.coeff)))
    }
}

impl From<ScalarPoly> for ScalarPolyRepr {
    fn from(p: ScalarPoly) -> Self {
        ScalarPolyRepr {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(alpha, coeff)| Term { alpha, coeff })
                .collect(),
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl ScalarPoly {
    pub fn zero(dim: usize) -> Self {
        ScalarPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = ScalarPoly::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    /// The coordinate functional `φᵢ` (0-based).
    pub fn variable(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        Ok(ScalarPoly::monomial_unchecked(
            MultiIndex::unit(dim, i),
            Complex64::new(1.0, 0.0),
        ))
    }

    pub fn monomial(dim: usize, alpha: MultiIndex, coeff: Complex64) -> Result<Self> {
        check_dim(dim, alpha.dim())?;
        Ok(ScalarPoly::monomial_unchecked(alpha, coeff))
    }

    fn monomial_unchecked(alpha: MultiIndex, coeff: Complex64) -> Self {
        let mut p = ScalarPoly::zero(alpha.dim());
        p.add_term(alpha, coeff);
        p
    }

    /// Builds a polynomial from terms, summing repeated multi-indices.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut p = ScalarPoly::zero(dim);
        for (alpha, c) in terms {
            check_dim(dim, alpha.dim())?;
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Accumulates `c·φ^α`; a coefficient that cancels to zero is removed.
    pub(crate) fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                *v += c;
                if *v == Complex64::new(0.0, 0.0) {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    /// Largest `|α|` among stored terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(MultiIndex::order)
    }

    /// Smallest `|α|` among stored terms; `None` for the zero polynomial.
    pub fn min_order(&self) -> Option<usize> {
        self.terms.keys().next().map(MultiIndex::order)
    }

    /// True when every stored term has order `k` (the zero polynomial qualifies).
    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.terms.keys().all(|a| a.order() == k)
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn homogeneous_part(&self, k: usize) -> ScalarPoly {
        self.filter(|a| a.order() == k)
    }

    /// Drops every term with `|α| > max_degree`.
    pub fn truncate(&self, max_degree: usize) -> ScalarPoly {
        self.filter(|a| a.order() <= max_degree)
    }

    fn filter(&self, keep: impl Fn(&MultiIndex) -> bool) -> ScalarPoly {
        ScalarPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// Copy with coefficients of modulus `≤ tol` removed. Display only.
    pub fn chop(&self, tol: f64) -> ScalarPoly {
        ScalarPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// Applies `f` to each coefficient, dropping results that are zero.
    pub fn map_coeffs(&self, f: impl Fn(&MultiIndex, Complex64) -> Complex64) -> ScalarPoly {
        let mut out = ScalarPoly::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(a, *c));
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> ScalarPoly {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn try_add(&self, other: &ScalarPoly) -> Result<ScalarPoly> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &ScalarPoly) -> Result<ScalarPoly> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -*c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &ScalarPoly) -> Result<ScalarPoly> {
        check_dim(self.dim, other.dim)?;
        Ok(self.mul_truncated(other, usize::MAX))
    }

    /// Product with all terms of order above `max_degree` discarded.
    ///
    /// Panics on dimension mismatch.
    pub fn mul_truncated(&self, other: &ScalarPoly, max_degree: usize) -> ScalarPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch in multiplication");
        let mut out = ScalarPoly::zero(self.dim);
        for (a, ca) in &self.terms {
            let oa = a.order();
            if oa > max_degree {
                break;
            }
            for (b, cb) in &other.terms {
                if oa + b.order() > max_degree {
                    break;
                }
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }

    /// `Σ c_α Π xᵢ^αᵢ`, summed in graded-lexicographic order.
    pub fn evaluate(&self, x: &[Complex64]) -> Result<Complex64> {
        check_dim(self.dim, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, c) in &self.terms {
            let mut m = *c;
            for (xi, &e) in x.iter().zip(a.exponents()) {
                if e > 0 {
                    m *= xi.powu(e);
                }
            }
            acc += m;
        }
        acc
    }
}

impl Add for &ScalarPoly {
    type Output = ScalarPoly;
    fn add(self, rhs: &ScalarPoly) -> ScalarPoly {
        self.try_add(rhs).expect("dimension mismatch in addition")
    }
}

impl Sub for &ScalarPoly {
    type Output = ScalarPoly;
    fn sub(self, rhs: &ScalarPoly) -> ScalarPoly {
        self.try_sub(rhs).expect("dimension mismatch in subtraction")
    }
}

impl Mul for &ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: &ScalarPoly) -> ScalarPoly {
        self.mul_truncated(rhs, usize::MAX)
    }
}

impl Neg for &ScalarPoly {
    type Output = ScalarPoly;
    fn neg(self) -> ScalarPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
