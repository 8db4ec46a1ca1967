use num_complex::Complex64;
use serde::Serialize;

use super::assemble::Supercell;
use super::bands::{k_grid, solve_grid};
use super::config::LatticeConfig;
use super::LatticeError;
use crate::gap_certificate::CutoffProfile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationRow {
    pub mu: f64,
    /// `max_k ‖(1 − J)P_low,k‖` with `J = φ(dist(x, wells)/μ^κ)`.
    pub defect: f64,
}

/// Periodic distance from a grid point to the nearest declared well.
fn well_distance(x: &[f64], wells: &[Vec<f64>]) -> f64 {
    wells
        .iter()
        .map(|w| {
            x.iter()
                .zip(w)
                .map(|(a, b)| {
                    let d = (a - b).rem_euclid(1.0);
                    d.min(1.0 - d).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `‖(1 − J)P_low‖` where `P_low` projects onto the lowest `wells × cells × N`
/// bands and `J` is the IMS cutoff at radius `μ^κ` around every well.
pub fn localization_defect(config: &LatticeConfig, kappa: f64) -> Result<f64, LatticeError> {
    let cell = Supercell::new(config)?;
    let wells = config.well_positions();
    if wells.is_empty() {
        return Err(LatticeError::Config(
            "localization needs declared wells".into(),
        ));
    }
    let rank = wells.len() * cell.cell_count() * cell.fiber;
    let profile = CutoffProfile::default();
    let radius = config.mu.powf(kappa);
    let mut weight = Vec::with_capacity(cell.dim());
    for s in 0..cell.site_count() {
        let [ix, iy] = cell.site_coords(s);
        let r = cell.position(ix as i64, iy as i64);
        let x: Vec<f64> = r[..cell.dimension]
            .iter()
            .map(|v| v.rem_euclid(1.0))
            .collect();
        let j = profile.phi(well_distance(&x, &wells) / radius);
        for _ in 0..cell.fiber {
            weight.push(1.0 - j);
        }
    }
    let k_points = k_grid(config.dimension, config.k_points);
    let pairs = solve_grid(config, &k_points, config.k_points, rank, true)?;
    let mut worst = 0.0f64;
    for p in pairs {
        let mut v = p.vectors.columns(0, rank).into_owned();
        for (i, w) in weight.iter().enumerate() {
            for j in 0..rank {
                v[(i, j)] *= Complex64::new(*w, 0.0);
            }
        }
        let sv = v.singular_values();
        worst = worst.max(sv.iter().cloned().fold(0.0, f64::max));
    }
    Ok(worst)
}

/// [`localization_defect`] along a list of couplings.
pub fn localization_sweep(
    template: &LatticeConfig,
    mus: &[f64],
    kappa: f64,
) -> Result<Vec<LocalizationRow>, LatticeError> {
    mus.iter()
        .map(|&mu| {
            let mut c = template.clone();
            c.mu = mu;
            Ok(LocalizationRow {
                mu,
                defect: localization_defect(&c, kappa)?,
            })
        })
        .collect()
}
