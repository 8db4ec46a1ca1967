//! Desk-scale discretisation of `H(μ) = μ∇*∇ + B + μ⁻¹V` on periodic covers
//! of `ℝ` and `ℝ²`, optionally in a uniform magnetic field of rational flux.
//!
//! Operators are assembled fiber by fiber over the Brillouin zone of a
//! (magnetic) supercell. On top of the band structures sit the integrated
//! density of states, gap detection, the semiclassical gap sweep, spectral
//! projections and two independent Chern-number evaluations.

mod assemble;
mod bands;
mod config;
mod gauge;
mod hall;
mod localization;
mod projection;
mod sweep;

pub use assemble::{assemble, magnetic_translation, Supercell};
pub use bands::{bloch_spectrum, k_grid, BandStructure, DetectedGap};
pub use config::{
    Discretization, Flux, HermitianSpec, LatticeConfig, PotentialSpec, SolverSettings, TrigTerm,
};
pub use gauge::GaugeData;
pub use hall::{
    gap_midpoint, hall_conductance, kubo_chern, link_variable_chern, model_gap_midpoint,
    subband_cherns, HallOptions, HallResult, SubbandCherns, CHERN_ORIENTATION,
};
pub use localization::{localization_defect, localization_sweep, LocalizationRow};
pub use projection::{
    projection_element, riesz_cross_check, riesz_projector, spectral_projection,
    spectral_projection_on_grid, ProjectionReport, SpectralProjection,
};
pub use sweep::{gap_emergence_sweep, sweep_row, GapSweep, SweepGap, SweepRow};

#[cfg(test)]
mod tests;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::model_operator::ModelError;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid lattice configuration: {0}")]
    Config(String),
    #[error("grid too coarse: {0} points per unit cell, finite differences need at least 16")]
    GridTooCoarse(usize),
    #[error("flux {p}/{q} is incompatible with a {cells:?} supercell")]
    IncommensurateFlux { p: i64, q: i64, cells: [usize; 2] },
    #[error("potential is negative ({value:.3e}) at {at:?}")]
    NegativePotential { value: f64, at: Vec<f64> },
    #[error(
        "declared well {at:?} is not a nondegenerate zero (V = {value:.3e}, |∇V| = {gradient:.3e})"
    )]
    BadWell {
        at: Vec<f64>,
        value: f64,
        gradient: f64,
    },
    #[error("translation {0:?} does not preserve the Bloch fibers of this supercell")]
    IncompatibleTranslation([i64; 2]),
    #[error("eigensolver converged {converged} of {wanted} pairs at κ = {kappa:?}")]
    NoConvergence {
        kappa: [f64; 2],
        converged: usize,
        wanted: usize,
    },
    #[error("λ = {lambda} lies within {distance:.3e} of the spectrum")]
    InsideBand { lambda: f64, distance: f64 },
    #[error("projection rank changes from {expected} to {found} at κ = {kappa:?}")]
    RankJump {
        kappa: [f64; 2],
        expected: usize,
        found: usize,
    },
    #[error("gap {index} requested but only {found} detected")]
    NoSuchGap { index: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
