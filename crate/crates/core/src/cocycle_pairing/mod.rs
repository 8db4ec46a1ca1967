//! Group cocycles on `ℤ^d`, the cyclic cocycles they induce on the twisted
//! group algebra, the symplectic area cocycle, the Hall cocycle and the
//! pairing of even cocycles with projections.

mod cyclic;
mod group;
mod hall;

pub use cyclic::{eval_tau_c, eval_tau_c_tr, verify_cyclic, CyclicCocycle, CyclicReport, TauC};
pub use group::{
    build_area_cocycle, coboundary, verify_group_cocycle, CocycleFn, CocycleKind, CocycleReport,
    GroupCocycle, PolyBound, SymplecticData,
};
pub use hall::{hall_cocycle, HallCocycle};

use num_complex::Complex64;
use thiserror::Error;

use crate::twisted_algebra::{AlgebraElement, AlgebraError};

#[derive(Debug, Error)]
pub enum PairingError {
    #[error("symplectic data needs an even, nonzero number of components (got {0})")]
    OddGenus(usize),
    #[error("cocycle is not normalised")]
    NotNormalized,
    #[error("expected {expected} arguments, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("{0}")]
    Shape(String),
    #[error("odd degree {0} cocycles do not pair with projections")]
    OddDegree(usize),
    #[error("element is not a projection: idempotency defect {idempotency:.3e}, self-adjointness defect {adjoint:.3e}")]
    NotProjection { idempotency: f64, adjoint: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Constant `K` turning the raw area-cocycle pairing of a band projection into
/// its Chern number, `C = Re(K · τ_Ψ#Tr(P, P, P))`.
///
/// Fixed by requiring the lowest Harper band at flux 1/3 to have Chern number
/// one; its modulus is `2π`.
pub const AREA_PAIRING_CONSTANT: Complex64 = Complex64::new(0.0, -std::f64::consts::TAU);

/// Normalisation applied to a degree `2m` pairing: `K^m / m!`.
pub fn pairing_constant(degree: usize) -> Complex64 {
    let m = degree / 2;
    let mut z = Complex64::new(1.0, 0.0);
    for i in 1..=m {
        z = z * AREA_PAIRING_CONSTANT / i as f64;
    }
    z
}

/// `max(N₀(P*P − P), N₀(P* − P))`, the projection defect used by the pairing.
pub fn projection_defect(p: &AlgebraElement) -> Result<(f64, f64), PairingError> {
    let idem = p.convolve(p)?.sub(p)?.nu_norm(0.0);
    let adj = p.involute().sub(p)?.nu_norm(0.0);
    Ok((idem, adj))
}

/// Raw value `τ_c#Tr(P, …, P)` after checking that `P` is a projection to `tol`.
pub fn raw_pairing(
    c: &GroupCocycle,
    p: &AlgebraElement,
    tol: f64,
) -> Result<Complex64, PairingError> {
    if c.degree % 2 != 0 {
        return Err(PairingError::OddDegree(c.degree));
    }
    let (idempotency, adjoint) = projection_defect(p)?;
    if idempotency > tol || adjoint > tol {
        return Err(PairingError::NotProjection {
            idempotency,
            adjoint,
        });
    }
    let args: Vec<&AlgebraElement> = vec![p; c.degree + 1];
    eval_tau_c_tr(c, &args)
}

/// Normalised pairing `Re(K^m/m! · τ_c#Tr(P, …, P))` of an even cocycle of
/// degree `2m` with a projection. Degree zero gives the trace, hence the rank
/// for `P = δ_e ⊗ P₀`.
pub fn pair_with_projection(c: &GroupCocycle, p: &AlgebraElement) -> Result<f64, PairingError> {
    pair_with_projection_within(c, p, 1e-10)
}

/// [`pair_with_projection`] with an explicit projection tolerance, for
/// finitely supported truncations of projections with infinite support.
pub fn pair_with_projection_within(
    c: &GroupCocycle,
    p: &AlgebraElement,
    tol: f64,
) -> Result<f64, PairingError> {
    Ok((pairing_constant(c.degree) * raw_pairing(c, p, tol)?).re)
}
