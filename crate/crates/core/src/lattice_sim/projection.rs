use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::assemble::Supercell;
use super::bands::{k_grid, solve_grid};
use super::config::LatticeConfig;
use super::LatticeError;
use crate::twisted_algebra::{AlgebraElement, Multiplier};

/// Fiberwise spectral projection `E(λ)` on a Bloch grid, stored as
/// orthonormal frames `V_k` with `E_k = V_k V_k*`.
#[derive(Clone, Debug)]
pub struct SpectralProjection {
    pub lambda: f64,
    pub k_points: Vec<[f64; 2]>,
    pub k_per_axis: usize,
    pub frames: Vec<DMatrix<Complex64>>,
    /// Eigenvalues below `λ` in each fiber.
    pub occupied: Vec<Vec<f64>>,
    /// Lowest eigenvalue above `λ` in each fiber.
    pub next_above: Vec<f64>,
    pub rank: usize,
    /// Smallest distance from `λ` to the spectrum over the grid.
    pub distance_to_spectrum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub lambda: f64,
    pub rank: usize,
    pub max_idempotency_defect: f64,
    pub max_hermiticity_defect: f64,
    pub distance_to_spectrum: f64,
}

impl SpectralProjection {
    pub fn projector(&self, i: usize) -> DMatrix<Complex64> {
        let v = &self.frames[i];
        v * v.adjoint()
    }

    pub fn report(&self) -> ProjectionReport {
        let (mut idem, mut herm) = (0.0f64, 0.0f64);
        for i in 0..self.frames.len() {
            let p = self.projector(i);
            idem = idem.max(frobenius(&(&p * &p - &p)));
            herm = herm.max(frobenius(&(&p - p.adjoint())));
        }
        ProjectionReport {
            lambda: self.lambda,
            rank: self.rank,
            max_idempotency_defect: idem,
            max_hermiticity_defect: herm,
            distance_to_spectrum: self.distance_to_spectrum,
        }
    }
}

pub(crate) fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `E(λ)` on the configured grid; see [`spectral_projection_on_grid`].
pub fn spectral_projection(
    config: &LatticeConfig,
    lambda: f64,
    margin: f64,
) -> Result<SpectralProjection, LatticeError> {
    spectral_projection_on_grid(config, lambda, margin, config.k_points)
}

/// `E(λ)` on an `n`-point-per-axis Bloch grid. Fails when `λ` is closer than
/// `margin` to an eigenvalue of some fiber or when the rank varies with `k`.
pub fn spectral_projection_on_grid(
    config: &LatticeConfig,
    lambda: f64,
    margin: f64,
    n: usize,
) -> Result<SpectralProjection, LatticeError> {
    let cell = Supercell::new(config)?;
    let dim = cell.dim();
    let k_points = k_grid(config.dimension, n);
    let mut nev = (cell.cell_count() * cell.fiber).min(dim).max(1);
    let pairs = loop {
        let pairs = solve_grid(config, &k_points, n, nev, true)?;
        let short = pairs
            .iter()
            .any(|p| p.values.last().map_or(true, |&e| e <= lambda));
        if !short || nev == dim {
            break pairs;
        }
        nev = (2 * nev).min(dim);
    };
    let mut frames = Vec::with_capacity(pairs.len());
    let mut occupied = Vec::with_capacity(pairs.len());
    let mut next_above = Vec::with_capacity(pairs.len());
    let mut dist = f64::INFINITY;
    let mut rank = None;
    for (p, kappa) in pairs.iter().zip(&k_points) {
        let r = p.values.iter().filter(|&&e| e < lambda).count();
        for &e in &p.values {
            dist = dist.min((e - lambda).abs());
        }
        if dist < margin {
            return Err(LatticeError::InsideBand {
                lambda,
                distance: dist,
            });
        }
        match rank {
            None => rank = Some(r),
            Some(r0) if r0 != r => {
                return Err(LatticeError::RankJump {
                    kappa: *kappa,
                    expected: r0,
                    found: r,
                })
            }
            _ => {}
        }
        frames.push(p.vectors.columns(0, r).into_owned());
        occupied.push(p.values[..r].to_vec());
        next_above.push(p.values.get(r).cloned().unwrap_or(f64::INFINITY));
    }
    Ok(SpectralProjection {
        lambda,
        k_points,
        k_per_axis: n,
        frames,
        occupied,
        next_above,
        rank: rank.unwrap_or(0),
        distance_to_spectrum: dist,
    })
}

/// Riesz projector `(2πi)⁻¹ ∮ (z − H)⁻¹ dz` by the trapezoidal rule on the
/// circle through `lower` and `upper` on the real axis.
pub fn riesz_projector(
    h: &DMatrix<Complex64>,
    lower: f64,
    upper: f64,
    nodes: usize,
) -> Result<DMatrix<Complex64>, LatticeError> {
    let n = h.nrows();
    let c = 0.5 * (lower + upper);
    let rho = 0.5 * (upper - lower);
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..nodes {
        let t = 2.0 * PI * (j as f64 + 0.5) / nodes as f64;
        let w = Complex64::from_polar(rho, t);
        let z = Complex64::new(c, 0.0) + w;
        let shifted = DMatrix::<Complex64>::identity(n, n) * z - h;
        let inv = shifted.try_inverse().ok_or(LatticeError::InsideBand {
            lambda: z.re,
            distance: 0.0,
        })?;
        acc += inv * (w / nodes as f64);
    }
    Ok(acc)
}

/// Frobenius distance between the eigenvector projector of fiber `i` and its
/// Riesz-contour counterpart with `nodes` quadrature points. The contour
/// crosses the real axis at `λ` and at the same distance below the lowest
/// occupied eigenvalue as the spectrum is from `λ`.
pub fn riesz_cross_check(
    config: &LatticeConfig,
    proj: &SpectralProjection,
    i: usize,
    nodes: usize,
) -> Result<f64, LatticeError> {
    let h = super::assemble::assemble(config, proj.k_points[i])?.to_dense();
    let gap = (proj.next_above[i] - proj.lambda).min(
        proj.occupied[i]
            .last()
            .map_or(f64::INFINITY, |e| proj.lambda - e),
    );
    let gap = if gap.is_finite() { gap } else { 1.0 };
    let lowest = proj.occupied[i]
        .first()
        .cloned()
        .unwrap_or(proj.lambda - gap);
    let upper = match proj.occupied[i].last() {
        Some(&top) => 0.5 * (top + proj.next_above[i].min(proj.lambda + gap)),
        None => proj.lambda,
    };
    let lower =
        lowest - (upper - proj.occupied[i].last().cloned().unwrap_or(lowest)).max(0.5 * gap);
    let r = riesz_projector(&h, lower, upper, nodes)?;
    Ok(frobenius(&(r - proj.projector(i))))
}

/// Kernel blocks `P(γ) = N⁻¹ Σ_k e^{ik·γ} P_k` of the projection for supercell
/// translations `γ` with `|γⱼ| ≤ radius`, as an element of the group algebra
/// of the supercell lattice (whose multiplier is trivial).
pub fn projection_element(
    proj: &SpectralProjection,
    dimension: usize,
    radius: i64,
) -> Result<AlgebraElement, LatticeError> {
    let fiber = proj.frames.first().map_or(0, |f| f.nrows());
    let n = proj.frames.len() as f64;
    let projectors: Vec<DMatrix<Complex64>> =
        (0..proj.frames.len()).map(|i| proj.projector(i)).collect();
    let range: Vec<i64> = (-radius..=radius).collect();
    let mut blocks = Vec::new();
    let second: Vec<i64> = if dimension == 2 {
        range.clone()
    } else {
        vec![0]
    };
    for &g2 in &second {
        for &g1 in &range {
            let mut acc = DMatrix::<Complex64>::zeros(fiber, fiber);
            for (p, k) in projectors.iter().zip(&proj.k_points) {
                acc += p * Complex64::from_polar(1.0 / n, k[0] * g1 as f64 + k[1] * g2 as f64);
            }
            let key = if dimension == 2 {
                vec![g1, g2]
            } else {
                vec![g1]
            };
            blocks.push((key, acc));
        }
    }
    AlgebraElement::from_blocks(Multiplier::trivial(dimension), fiber, blocks)
        .map_err(|e| LatticeError::Config(e.to_string()))
}
