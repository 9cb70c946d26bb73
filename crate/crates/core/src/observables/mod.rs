//! Observables of the form `f∘τₘ⁻¹` with `f` a polynomial in the principal
//! eigenfunctions, and a least-squares demonstration that they approximate
//! continuous functions uniformly on a small box.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalform::NormalFormSequence;
use crate::numerics::{monomial_value, tau_inverse_pointwise};
use crate::polyalg::{MultiIndex, ScalarPoly};

/// Condition number above which a fit is flagged.
pub const CONDITION_FLAG_THRESHOLD: f64 = 1e12;

pub const DEFAULT_GRID_POINTS: usize = 41;

/// Largest dimension accepted by [`density_demo`]; the grid has `pointsⁿ` nodes.
pub const MAX_DEMO_DIM: usize = 2;

/// `f∘τₘ⁻¹` for a fixed sequence and order.
#[derive(Clone, Debug)]
pub struct PullbackObservable<'a> {
    f: ScalarPoly,
    m: usize,
    seq: &'a NormalFormSequence,
    with_constant: bool,
}

impl<'a> PullbackObservable<'a> {
    /// Without constants adjoined, `f` must vanish at the origin.
    pub fn new(f: ScalarPoly, seq: &'a NormalFormSequence, m: usize, with_constant: bool) -> Result<Self> {
        seq.stage(m)?;
        if f.dim() != seq.dim() {
            return Err(Error::DimensionMismatch {
                expected: seq.dim(),
                found: f.dim(),
            });
        }
        if !with_constant && f.constant_term() != Complex64::new(0.0, 0.0) {
            return Err(Error::NonzeroConstant);
        }
        Ok(PullbackObservable {
            f,
            m,
            seq,
            with_constant,
        })
    }

    pub fn f(&self) -> &ScalarPoly {
        &self.f
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn with_constant(&self) -> bool {
        self.with_constant
    }

    pub fn pullback_eval(&self, x: &[Complex64], tol: f64, max_iter: usize) -> Result<Complex64> {
        let z = tau_inverse_pointwise(self.seq, self.m, x, tol, max_iter)?;
        self.f.evaluate(&z)
    }
}

/// Which coordinates are real and which come in complex-conjugate pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugatePairing {
    partner: Vec<usize>,
}

impl ConjugatePairing {
    pub fn all_real(dim: usize) -> Self {
        ConjugatePairing {
            partner: (0..dim).collect(),
        }
    }

    /// `pairs` lists 0-based `(i, j)` with `φⱼ = conj(φᵢ)`; other indices are real.
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut partner: Vec<usize> = (0..dim).collect();
        for &(i, j) in pairs {
            for k in [i, j] {
                if k >= dim {
                    return Err(Error::IndexOutOfRange { index: k, dim });
                }
            }
            if i == j || partner[i] != i || partner[j] != j {
                return Err(Error::InvalidArgument(format!(
                    "pair ({}, {}) overlaps another pair or is degenerate",
                    i + 1,
                    j + 1
                )));
            }
            partner[i] = j;
            partner[j] = i;
        }
        Ok(ConjugatePairing { partner })
    }

    pub fn dim(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    /// Point of the real slice: `xⱼ = conj(xᵢ)` on each pair, real on fixed indices.
    /// Takes the first member of each pair and the fixed entries from `x`.
    pub fn project_to_real_slice(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|i| {
                let p = self.partner[i];
                if p == i {
                    Complex64::new(x[i].re, 0.0)
                } else if i < p {
                    x[i]
                } else {
                    x[p].conj()
                }
            })
            .collect()
    }
}

/// The polynomial `f̄` with `f̄(x) = conj(f(x))` on the real slice: coefficients
/// are conjugated and exponents swapped within each conjugate pair.
pub fn conjugate_in_algebra(f: &ScalarPoly, pairing: &ConjugatePairing) -> Result<ScalarPoly> {
    if f.dim() != pairing.dim() {
        return Err(Error::DimensionMismatch {
            expected: pairing.dim(),
            found: f.dim(),
        });
    }
    let n = f.dim();
    ScalarPoly::from_terms(
        n,
        f.terms().map(|(alpha, c)| {
            let mut e = vec![0u32; n];
            for (i, &a) in alpha.exponents().iter().enumerate() {
                e[pairing.partner[i]] = a;
            }
            (MultiIndex::new(e), c.conj())
        }),
    )
}

/// Axis-aligned real box `Π [loᵢ, hiᵢ]` inside `ℝⁿ ⊂ ℂⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub bounds: Vec<(f64, f64)>,
    pub points_per_axis: usize,
}

impl GridBox {
    pub fn symmetric(dim: usize, half_width: f64, points_per_axis: usize) -> Self {
        GridBox {
            bounds: vec![(-half_width, half_width); dim],
            points_per_axis,
        }
    }

    fn nodes(&self) -> Vec<Vec<Complex64>> {
        let k = self.points_per_axis;
        let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
            (0..k)
                .map(|i| {
                    if k == 1 {
                        0.5 * (lo + hi)
                    } else {
                        lo + (hi - lo) * i as f64 / (k - 1) as f64
                    }
                })
                .collect()
        };
        let mut nodes: Vec<Vec<Complex64>> = vec![Vec::new()];
        for &b in &self.bounds {
            let a = axis(b);
            nodes = nodes
                .into_iter()
                .flat_map(|prefix| {
                    a.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(Complex64::new(v, 0.0));
                        p
                    })
                })
                .collect();
        }
        nodes
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub degree: usize,
    /// Largest fit error over the grid.
    pub sup_error: f64,
    /// Singular-value ratio of the column-normalized design matrix.
    pub condition: f64,
    pub condition_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub m: usize,
    pub with_constant: bool,
    pub grid_size: usize,
    pub rows: Vec<DensityRow>,
    /// Degrees whose sup error exceeds the previous degree's.
    pub non_monotone: usize,
}

/// Least-squares fits of `target` on a grid over `region` by polynomials of
/// degree `1..=max_degree` in the pulled-back generators `(τₘ⁻¹)ᵢ`.
#[allow(clippy::too_many_arguments)]
pub fn density_demo(
    target: &dyn Fn(&[Complex64]) -> Complex64,
    region: &GridBox,
    max_degree: usize,
    seq: &NormalFormSequence,
    m: usize,
    with_constant: bool,
    tol: f64,
    max_iter: usize,
) -> Result<DensityTable> {
    let n = seq.dim();
    seq.stage(m)?;
    if region.bounds.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: region.bounds.len(),
        });
    }
    if n > MAX_DEMO_DIM {
        return Err(Error::InvalidArgument(format!(
            "density demo supports n <= {MAX_DEMO_DIM}, got {n}"
        )));
    }
    if region.points_per_axis < 2
        || region
            .bounds
            .iter()
            .any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi)
    {
        return Err(Error::InvalidArgument(
            "grid needs >= 2 points per axis and lo < hi".into(),
        ));
    }
    if max_degree < 1 {
        return Err(Error::InvalidArgument("max degree must be at least 1".into()));
    }

    let nodes = region.nodes();
    let generators = nodes
        .iter()
        .map(|x| tau_inverse_pointwise(seq, m, x, tol, max_iter))
        .collect::<Result<Vec<_>>>()?;
    let values = DVector::from_iterator(nodes.len(), nodes.iter().map(|x| target(x)));

    let mut rows = Vec::with_capacity(max_degree);
    for d in 1..=max_degree {
        let basis: Vec<MultiIndex> = MultiIndex::all_up_to_order(n, d)
            .into_iter()
            .filter(|a| with_constant || !a.is_zero())
            .collect();
        let mut a = DMatrix::from_fn(nodes.len(), basis.len(), |i, j| {
            monomial_value(&basis[j], &generators[i])
        });
        for mut col in a.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= Complex64::new(norm, 0.0);
            }
        }
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let coeffs = svd
            .solve(&values, f64::EPSILON * smax)
            .map_err(|e| Error::InvalidArgument(format!("least-squares solve failed: {e}")))?;
        let fitted = &a * coeffs;
        let sup_error = (fitted - &values).iter().map(|v| v.norm()).fold(0.0, f64::max);
        rows.push(DensityRow {
            degree: d,
            sup_error,
            condition,
            condition_flag: condition.is_nan() || condition > CONDITION_FLAG_THRESHOLD,
        });
    }
    let non_monotone = rows.windows(2).filter(|w| w[1].sup_error > w[0].sup_error).count();
    Ok(DensityTable {
        m,
        with_constant,
        grid_size: nodes.len(),
        rows,
        non_monotone,
    })
}
