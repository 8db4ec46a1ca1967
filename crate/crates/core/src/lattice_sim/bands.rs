use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::assemble::{assemble_on, Supercell};
use super::config::LatticeConfig;
use super::LatticeError;
use crate::linalg::{lowest_eigenpairs, EigenPairs, LinalgError};

/// A spectral gap `(a, b)` between consecutive computed bands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectedGap {
    pub a: f64,
    pub b: f64,
    /// Bands below the gap in every fiber.
    pub bands_below: usize,
    /// Integrated density of states inside the gap, states per unit cell.
    pub ids: f64,
}

impl DetectedGap {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Eigenvalues over a uniform Bloch grid of the supercell Brillouin zone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandStructure {
    /// Momenta `κ ∈ [0, 2π)^d`, first axis fastest.
    pub k_points: Vec<[f64; 2]>,
    pub k_per_axis: usize,
    /// Ascending eigenvalues per momentum, all of equal length.
    pub energies: Vec<Vec<f64>>,
    pub cells_per_supercell: usize,
    pub gaps: Vec<DetectedGap>,
}

/// Uniform grid `κⱼ = 2πj/n` on each axis, first axis fastest.
pub fn k_grid(dimension: usize, n: usize) -> Vec<[f64; 2]> {
    let k = |j: usize| 2.0 * PI * j as f64 / n as f64;
    if dimension == 1 {
        (0..n).map(|i| [k(i), 0.0]).collect()
    } else {
        (0..n * n).map(|i| [k(i % n), k(i / n)]).collect()
    }
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.energies.first().map_or(0, |e| e.len())
    }

    /// `(min, max)` of every band over the grid.
    pub fn edges(&self) -> Vec<(f64, f64)> {
        (0..self.band_count())
            .map(|n| {
                self.energies
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                        (lo.min(e[n]), hi.max(e[n]))
                    })
            })
            .collect()
    }

    /// Midpoints of the band ranges.
    pub fn centers(&self) -> Vec<f64> {
        self.edges().iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Energies below which the eigenvalue count is complete in every fiber.
    pub fn complete_below(&self) -> f64 {
        self.energies
            .iter()
            .map(|e| *e.last().unwrap_or(&f64::NEG_INFINITY))
            .fold(f64::INFINITY, f64::min)
    }

    /// `(Σ_k #{E ≤ λ}, #k · cells)`, so that the IDS is the exact quotient.
    pub fn ids_count(&self, lambda: f64) -> Option<(u64, u64)> {
        if lambda >= self.complete_below() {
            return None;
        }
        let total: usize = self
            .energies
            .iter()
            .map(|e| e.iter().filter(|&&x| x <= lambda).count())
            .sum();
        Some((
            total as u64,
            (self.energies.len() * self.cells_per_supercell) as u64,
        ))
    }

    /// Integrated density of states in states per unit cell.
    pub fn ids(&self, lambda: f64) -> Option<f64> {
        self.ids_count(lambda).map(|(n, d)| n as f64 / d as f64)
    }

    /// `count` equally spaced samples of the IDS on `[lo, hi]`.
    pub fn ids_samples(&self, lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
        (0..count)
            .filter_map(|i| {
                let l = if count == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                };
                self.ids(l).map(|v| (l, v))
            })
            .collect()
    }

    pub fn gap_containing(&self, lambda: f64) -> Option<&DetectedGap> {
        self.gaps.iter().find(|g| g.a < lambda && lambda < g.b)
    }

    fn detect_gaps(&mut self) {
        let edges = self.edges();
        let cells = self.cells_per_supercell as f64;
        self.gaps = edges
            .windows(2)
            .enumerate()
            .filter_map(|(n, w)| {
                let (a, b) = (w[0].1, w[1].0);
                let tol = 1e-8 * a.abs().max(b.abs()).max(1.0);
                (b - a > tol).then(|| DetectedGap {
                    a,
                    b,
                    bands_below: n + 1,
                    ids: (n + 1) as f64 / cells,
                })
            })
            .collect();
    }
}

/// Lowest `nev` eigenpairs of every fiber on the grid, warm-starting along
/// the first axis and running rows in parallel.
pub(crate) fn solve_grid(
    config: &LatticeConfig,
    k_points: &[[f64; 2]],
    row_len: usize,
    nev: usize,
    vectors: bool,
) -> Result<Vec<EigenPairs>, LatticeError> {
    let cell = Supercell::new(config)?;
    let b = config.fiber_endo()?;
    let opts = config.solver.options();
    let nev = nev.min(cell.dim());
    let rows: Vec<&[[f64; 2]]> = k_points.chunks(row_len.max(1)).collect();
    let solved: Vec<Result<Vec<EigenPairs>, LatticeError>> = rows
        .par_iter()
        .map(|row| {
            let mut out = Vec::with_capacity(row.len());
            let mut prev: Option<DMatrix<Complex64>> = None;
            for &kappa in row.iter() {
                let h = assemble_on(&cell, config, &b, kappa);
                let pairs =
                    lowest_eigenpairs(&h, nev, &opts, prev.as_ref()).map_err(|e| match e {
                        LinalgError::NoConvergence { converged, wanted } => {
                            LatticeError::NoConvergence {
                                kappa,
                                converged,
                                wanted,
                            }
                        }
                        other => LatticeError::Linalg(other),
                    })?;
                prev = Some(pairs.vectors.clone());
                out.push(if vectors {
                    pairs
                } else {
                    EigenPairs {
                        values: pairs.values,
                        vectors: DMatrix::zeros(0, 0),
                    }
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::with_capacity(k_points.len());
    for r in solved {
        all.extend(r?);
    }
    Ok(all)
}

pub(crate) fn default_bands(config: &LatticeConfig, cell: &Supercell) -> usize {
    config.bands.unwrap_or_else(|| {
        if cell.dim() <= config.solver.dense_threshold {
            cell.dim()
        } else {
            (4 * cell.cell_count() * cell.fiber).min(cell.dim())
        }
    })
}

/// Bands over the configured Bloch grid, with gap detection and IDS.
pub fn bloch_spectrum(config: &LatticeConfig) -> Result<BandStructure, LatticeError> {
    let cell = Supercell::new(config)?;
    let nev = default_bands(config, &cell).min(cell.dim());
    let n = config.k_points;
    let k_points = k_grid(config.dimension, n);
    let pairs = solve_grid(config, &k_points, n, nev, false)?;
    let mut bs = BandStructure {
        k_points,
        k_per_axis: n,
        energies: pairs.into_iter().map(|p| p.values).collect(),
        cells_per_supercell: cell.cell_count(),
        gaps: vec![],
    };
    bs.detect_gaps();
    Ok(bs)
}
