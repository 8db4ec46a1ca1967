//! Arithmetic of the abstract gap-equivalence theorem: the certified interval
//! `(a₂, b₂)` from a model gap `(a₁, b₁)`, localisation bounds, IMS cutoff
//! data, parameter estimates in terms of `(μ, κ)` and finite-dimensional
//! Murray-von Neumann equivalences.

mod cutoff;
mod estimate;
mod finite;
mod params;

pub use cutoff::{smoothstep, smoothstep_derivative, CutoffProfile};
pub use estimate::{
    certificate_sweep, convergence_rate, estimate_parameters, log_spaced, loglog_slope,
    optimal_kappa, CertificateProblem, CertificateSweep, EstimatorMode, SweepRow,
};
pub use finite::{
    double_commutator, ims_decomposition_check, localization_coefficient, localized_energy_bound,
    mv_equivalence_finite, outside_fraction,
};
pub use params::{
    a2_of, b1_from_b2, b2_of, certify_gap, CertificateParams, GapInterval, Refusal, RefusalReason,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Refused(Refusal),
    #[error("κ = {kappa} is outside the admissible range for {} mode", if *flat { "flat (0, 1/2)" } else { "general (1/3, 1/2)" })]
    KappaOutOfRange { kappa: f64, flat: bool },
    #[error("no Murray-von Neumann equivalence: {0}")]
    NoEquivalence(String),
}
