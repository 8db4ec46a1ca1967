//! Twisted group algebras of `ℤ^d` with matrix coefficients.
//!
//! A [`Multiplier`] fixes the phase twist, an [`AlgebraElement`] is a finitely
//! supported matrix-valued function on the lattice with twisted convolution,
//! involution and canonical trace.

mod element;
mod multiplier;
mod sample;
mod suite;

pub use element::{spectral_norm, AlgebraElement, PRUNE_TOL};
pub use multiplier::{
    validate_multiplier, LandauGauge, Multiplier, MultiplierReport, PhaseFn, PhaseFunction,
};
pub use sample::{random_block, random_element, random_point};
pub use suite::{identity_suite, IdentityReport, SuiteOptions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("lattice rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("fiber dimension mismatch: expected {expected}, found {found}")]
    FiberMismatch { expected: usize, found: usize },
    #[error("elements carry different multipliers")]
    MultiplierMismatch,
    #[error("{0}")]
    Shape(String),
    #[error("malformed element record: {0}")]
    Parse(String),
}

/// Word length on `ℤ^d` for the standard generators, `ℓ(γ) = Σ|γᵢ|`.
pub fn word_length(gamma: &[i64]) -> u64 {
    gamma.iter().map(|x| x.unsigned_abs()).sum()
}

/// All lattice points with `ℓ(γ) ≤ radius`, in lexicographic order.
pub fn ball(rank: usize, radius: u64) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        let mut next = Vec::new();
        for p in &out {
            let used = word_length(p) as i64;
            for x in -(r - used)..=(r - used) {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Number of lattice points of word length at most `radius`; grows like `radius^d`.
pub fn growth(rank: usize, radius: u64) -> usize {
    ball(rank, radius).len()
}
