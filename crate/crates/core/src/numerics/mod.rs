//! Pointwise evaluation of the conjugacies and the approximate eigenfunctions
//! `φ^α∘τₘ⁻¹`, plus log-log studies of their error orders.

mod pointwise;
mod study;

pub use pointwise::{
    contraction_ratio_in_ball, domain_check, eval_approx_eigenfunction, invert_phi_pointwise, monomial_value,
    orbit_check, phi_inverse_iterates, tau_inverse_pointwise, tau_pointwise, DomainEntry, DomainReport,
    EigenfunctionValue, Inversion, OrbitReport, DEFAULT_MAX_ITER, DEFAULT_ORBIT_STEPS, DEFAULT_TOL,
};
pub use study::{
    fit_log_log, geometric_radii, inverse_asymptotics_study, residual_study, InverseAsymptoticsStudy, ResidualRecord,
    ResidualStudy, SlopeFit,
};

#[cfg(test)]
mod tests;
