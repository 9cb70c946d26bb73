//! The JSON map description and its conversion to eigen-coordinates.

use std::collections::BTreeMap;
use std::path::Path;

use koopman_core::polyalg::ScalarPoly;
use koopman_core::spectrum::{eigencoordinates, Eigencoordinates, DEFAULT_MAX_CONDITION};
use koopman_core::{Complex64, MultiIndex, Spectrum, VectorPoly};
use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// One nonlinear term `coeff · φ^alpha` in component `component` (1-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub component: usize,
    pub alpha: Vec<u32>,
    pub coeff: [f64; 2],
}

/// On-disk description of `T(x) = Ax + Σ terms`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapDescription {
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<Vec<[f64; 2]>>>,
    pub terms: Vec<TermRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescription {
    dim: usize,
    #[serde(default)]
    eigenvalues: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    linear: Option<Vec<Vec<[f64; 2]>>>,
    terms: Vec<Value>,
    #[serde(default)]
    metadata: Option<Value>,
}

/// A validated map in eigen-coordinates.
#[derive(Clone, Debug)]
pub struct ParsedMap {
    pub map: VectorPoly,
    pub spectrum: Spectrum,
    /// Present when the file gave a dense `linear` part.
    pub basis: Option<Eigencoordinates>,
    pub metadata: Option<Value>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn cplx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

impl MapDescription {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawDescription =
            serde_json::from_str(text).map_err(|e| invalid(format!("invalid map description: {e}")))?;
        let terms = raw
            .terms
            .into_iter()
            .enumerate()
            .map(|(i, v)| serde_json::from_value::<TermRecord>(v).map_err(|e| invalid(format!("terms[{i}]: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let desc = MapDescription {
            dim: raw.dim,
            eigenvalues: raw.eigenvalues,
            linear: raw.linear,
            terms,
            metadata: raw.metadata,
        };
        desc.validate()?;
        Ok(desc)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        let n = self.dim;
        if n == 0 {
            return Err(invalid("dim must be at least 1"));
        }
        match (&self.eigenvalues, &self.linear) {
            (Some(_), Some(_)) => return Err(invalid("give exactly one of `eigenvalues` and `linear`, not both")),
            (None, None) => return Err(invalid("one of `eigenvalues` or `linear` is required")),
            (Some(ev), None) => {
                if ev.len() != n {
                    return Err(invalid(format!(
                        "eigenvalues: expected {n} entries, found {}",
                        ev.len()
                    )));
                }
                if let Some(i) = ev.iter().position(|v| !v[0].is_finite() || !v[1].is_finite()) {
                    return Err(invalid(format!("eigenvalues[{i}]: not a finite number")));
                }
            }
            (None, Some(rows)) => {
                if rows.len() != n {
                    return Err(invalid(format!("linear: expected {n} rows, found {}", rows.len())));
                }
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(invalid(format!(
                            "linear[{i}]: expected {n} entries, found {}",
                            row.len()
                        )));
                    }
                    if row.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
                        return Err(invalid(format!("linear[{i}]: not a finite number")));
                    }
                }
            }
        }
        let mut seen = BTreeMap::new();
        for (i, t) in self.terms.iter().enumerate() {
            if t.component == 0 || t.component > n {
                return Err(invalid(format!(
                    "terms[{i}]: component {} outside 1..={n}",
                    t.component
                )));
            }
            if t.alpha.len() != n {
                return Err(invalid(format!(
                    "terms[{i}]: alpha has length {}, expected {n}",
                    t.alpha.len()
                )));
            }
            let order: u32 = t.alpha.iter().sum();
            if order == 1 {
                return Err(invalid(format!(
                    "terms[{i}]: |alpha| = 1; linear terms belong in eigenvalues or linear"
                )));
            }
            if order == 0 {
                return Err(invalid(format!(
                    "terms[{i}]: constant terms are not allowed; the fixed point must be the origin"
                )));
            }
            if !t.coeff[0].is_finite() || !t.coeff[1].is_finite() {
                return Err(invalid(format!("terms[{i}]: coefficient is not finite")));
            }
            if let Some(j) = seen.insert((t.component, MultiIndex::new(t.alpha.clone())), i) {
                return Err(invalid(format!("terms[{i}]: duplicates terms[{j}]")));
            }
        }
        Ok(())
    }

    /// Terms sorted by component, then by graded order of `alpha`.
    pub fn canonicalize(&self) -> MapDescription {
        let mut out = self.clone();
        out.terms.sort_by(|a, b| {
            (a.component, MultiIndex::new(a.alpha.clone())).cmp(&(b.component, MultiIndex::new(b.alpha.clone())))
        });
        out
    }

    /// Pretty JSON of the canonical form, newline terminated.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.canonicalize()).expect("description serializes");
        s.push('\n');
        s
    }

    /// Eigenvalue-form description of a map already in eigen-coordinates.
    pub fn from_map(map: &VectorPoly, spectrum: &Spectrum, metadata: Option<Value>) -> Self {
        let mut terms = Vec::new();
        for (j, p) in map.components().iter().enumerate() {
            for (alpha, c) in p.terms() {
                if alpha.order() >= 2 {
                    terms.push(TermRecord {
                        component: j + 1,
                        alpha: alpha.exponents().to_vec(),
                        coeff: pair(*c),
                    });
                }
            }
        }
        MapDescription {
            dim: spectrum.dim(),
            eigenvalues: Some(spectrum.lambdas().iter().map(|l| pair(*l)).collect()),
            linear: None,
            terms,
            metadata,
        }
        .canonicalize()
    }

    /// Builds the map in eigen-coordinates, diagonalizing `linear` if given.
    pub fn to_map(&self) -> Result<ParsedMap, CliError> {
        let n = self.dim;
        let mut comps = vec![ScalarPoly::zero(n); n];
        for t in &self.terms {
            let m = ScalarPoly::monomial(n, MultiIndex::new(t.alpha.clone()), cplx(t.coeff))?;
            comps[t.component - 1] = comps[t.component - 1].try_add(&m)?;
        }
        let nonlinear = VectorPoly::from_components(comps)?;

        let (spectrum, nonlinear, basis) = match (&self.eigenvalues, &self.linear) {
            (Some(ev), _) => (Spectrum::new(ev.iter().map(|v| cplx(*v)).collect())?, nonlinear, None),
            (None, Some(rows)) => {
                let a: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|v| cplx(*v)).collect()).collect();
                let eig = eigencoordinates(&a, DEFAULT_MAX_CONDITION)?;
                // z = V⁻¹x:  V⁻¹ N(V z)
                let v = VectorPoly::linear(&eig.v)?;
                let transformed = nonlinear.compose_exact(&v)?.left_multiply(&eig.v_inv)?;
                (eig.spectrum.clone(), transformed, Some(eig))
            }
            (None, None) => unreachable!("validated"),
        };
        if !spectrum.is_stable() {
            warn!("linear part has an eigenvalue with modulus >= 1; pipeline commands need --allow-unstable");
        }
        let map = VectorPoly::diagonal(spectrum.lambdas()).try_add(&nonlinear)?;
        Ok(ParsedMap {
            map,
            spectrum,
            basis,
            metadata: self.metadata.clone(),
        })
    }
}

/// Reads, validates and converts a map file.
pub fn parse_map(path: &Path) -> Result<ParsedMap, CliError> {
    MapDescription::read(path)?.to_map()
}
