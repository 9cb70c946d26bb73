use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial `φ₁^α₁ ⋯ φₙ^αₙ`.
///
/// Ordered graded-lexicographically: first by total order `|α|`, then with
/// earlier variables ranking first (`φ₁² < φ₁φ₂ < φ₂²`).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// `eᵢ`, the exponent of the single variable `φᵢ` (0-based).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise sum; exponents of a product of monomials.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `α − eᵢ`, or `None` when `αᵢ = 0`.
    pub fn decrement(&self, i: usize) -> Option<MultiIndex> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(MultiIndex(e))
    }

    /// All multi-indices of length `dim` with `|α| = order`, in ascending order.
    pub fn all_of_order(dim: usize, order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        if dim == 0 {
            if order == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        let mut current = vec![0u32; dim];
        fill(&mut current, 0, order, &mut out);
        out
    }

    /// All multi-indices with `|α| ≤ max_order`, ascending.
    pub fn all_up_to_order(dim: usize, max_order: usize) -> Vec<MultiIndex> {
        (0..=max_order).flat_map(|k| MultiIndex::all_of_order(dim, k)).collect()
    }
}

// Emits exponents with the first variable's power descending, which is the
// ascending `Ord` sequence within a fixed order.
fn fill(current: &mut [u32], pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a as u32;
        fill(current, pos + 1, remaining - a, out);
    }
    current[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumeration_counts_match_stars_and_bars() {
        for dim in 1..=4 {
            for k in 0..=6 {
                let all = MultiIndex::all_of_order(dim, k);
                assert_eq!(all.len(), binomial(k + dim - 1, dim - 1));
                assert!(all.iter().all(|a| a.order() == k && a.dim() == dim));
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn graded_lex_ordering() {
        let a = MultiIndex::new(vec![2, 0]);
        let b = MultiIndex::new(vec![1, 1]);
        let c = MultiIndex::new(vec![0, 2]);
        let d = MultiIndex::new(vec![0, 1]);
        assert!(d < a && a < b && b < c);
        assert_eq!(b.to_string(), "(1,1)");
    }
}
