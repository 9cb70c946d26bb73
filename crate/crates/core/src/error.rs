use thiserror::Error;

use crate::polyalg::MultiIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("expected a homogeneous polynomial of degree {expected}, found degree {found}")]
    WrongDegree { expected: usize, found: usize },

    #[error("map must fix the origin (nonzero constant term)")]
    NonzeroConstant,

    #[error("map must have identity linear part")]
    NonIdentityLinearPart,

    #[error("linear part does not match diag(lambda) (max deviation {deviation:e})")]
    LinearPartMismatch { deviation: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigenvalue {index} is zero; the linear part must be invertible")]
    ZeroEigenvalue { index: usize },

    #[error("eigenvalue {index} has modulus {modulus} >= 1; the fixed point is not asymptotically stable")]
    Unstable { index: usize, modulus: f64 },

    #[error("matrix is defective or nearly so (eigenvector condition estimate {condition:e})")]
    Defective { condition: f64 },

    #[error("resonant term at order {order}: j={}, alpha={alpha}, |mu| = {mu_abs:e}", .component + 1)]
    Resonance {
        order: usize,
        /// 0-based component index; the message shows it 1-based as `j`.
        component: usize,
        alpha: MultiIndex,
        mu_abs: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "fixed-point inversion did not converge after {iterations} iterations (last contraction ratio {last_ratio})"
    )]
    NoConvergence { iterations: usize, last_ratio: f64 },

    #[error("inversion of stage {stage} failed: {source}")]
    StageInversion {
        stage: usize,
        #[source]
        source: Box<Error>,
    },
}
