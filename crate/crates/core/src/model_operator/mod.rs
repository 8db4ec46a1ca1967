//! Exact spectra of the harmonic model operator `K = ⊕ⱼ Kⱼ` built from the
//! quadratic parts of the Hamiltonian at its Morse wells.

mod fd;
mod hermite;
mod levels;
mod well;

pub use fd::{
    fd_eigenvalues, fd_matrix, mu_invariance_check, FdOptions, MuInvarianceReport, MuRow,
};
pub use hermite::{hermite_levels, MatrixWellSpec};
pub use levels::{
    counting_function, model_gaps, model_levels, oscillator_values, Level, ModelSpectrum, MERGE_TOL,
};
pub use well::{well_frequencies, WellSpec};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    NotSpd(String),
    #[error("fiber endomorphism is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("{0}")]
    Shape(String),
    #[error("spectrum is not known to be complete below its cutoff")]
    Incomplete,
    #[error("λ = {lambda} lies above the cutoff {cutoff}")]
    AboveCutoff { lambda: f64, cutoff: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
