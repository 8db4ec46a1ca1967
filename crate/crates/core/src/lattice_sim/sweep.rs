use serde::Serialize;

use super::bands::{bloch_spectrum, BandStructure};
use super::config::LatticeConfig;
use super::LatticeError;
use crate::model_operator::{counting_function, model_gaps, model_levels, ModelSpectrum};

/// A detected gap below the cutoff with the trace-equals-rank comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepGap {
    pub a: f64,
    pub b: f64,
    pub midpoint: f64,
    /// IDS at the midpoint, states per unit cell.
    pub ids: f64,
    pub ids_numerator: u64,
    pub ids_denominator: u64,
    /// Model counting function at the midpoint.
    pub model_count: usize,
    /// `ids_numerator == model_count · ids_denominator`, exactly.
    pub trace_equals_rank: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub gaps: Vec<SweepGap>,
    pub gaps_below_cutoff: usize,
    /// Centres of the lowest bands, one per model eigenvalue below the cutoff.
    pub band_centers: Vec<f64>,
    /// `|centre − model level|`, band by band.
    pub center_deviation: Vec<f64>,
    /// Hausdorff distance between the spectrum below the cutoff and the model levels there.
    pub hausdorff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSweep {
    pub cutoff: f64,
    /// Model eigenvalues below the cutoff, repeated by multiplicity.
    pub model_eigenvalues: Vec<f64>,
    pub model_gap_count: usize,
    pub rows: Vec<SweepRow>,
    /// Largest swept coupling at which every model gap below the cutoff is
    /// matched by a detected gap with trace equal to rank.
    pub threshold_mu: Option<f64>,
}

fn hausdorff(bands: &[(f64, f64)], points: &[f64], cutoff: f64) -> f64 {
    let clipped: Vec<(f64, f64)> = bands
        .iter()
        .filter(|b| b.0 <= cutoff)
        .map(|&(a, b)| (a, b.min(cutoff)))
        .collect();
    if clipped.is_empty() || points.is_empty() {
        return f64::INFINITY;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let dist_to_points = |x: f64| {
        sorted
            .iter()
            .map(|p| (x - p).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let dist_to_bands = |p: f64| {
        clipped
            .iter()
            .map(|&(a, b)| {
                if p < a {
                    a - p
                } else if p > b {
                    p - b
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut worst = sorted
        .iter()
        .map(|&p| dist_to_bands(p))
        .fold(0.0f64, f64::max);
    for &(a, b) in &clipped {
        let mids = sorted
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .filter(|&x| x >= a && x <= b);
        for x in [a, b].into_iter().chain(mids) {
            worst = worst.max(dist_to_points(x));
        }
    }
    worst
}

/// One row of the sweep for an already computed band structure.
pub fn sweep_row(
    bs: &BandStructure,
    mu: f64,
    model: &ModelSpectrum,
    cutoff: f64,
) -> Result<SweepRow, LatticeError> {
    let cells = bs.cells_per_supercell;
    let mut model_evs: Vec<f64> = Vec::new();
    for l in model.levels.iter().filter(|l| l.value <= cutoff) {
        for _ in 0..l.multiplicity * cells {
            model_evs.push(l.value);
        }
    }
    let mut gaps = Vec::new();
    for g in bs.gaps.iter().filter(|g| g.midpoint() < cutoff) {
        let mid = g.midpoint();
        let Some((num, den)) = bs.ids_count(mid) else {
            continue;
        };
        let count = counting_function(model, mid)?;
        gaps.push(SweepGap {
            a: g.a,
            b: g.b,
            midpoint: mid,
            ids: num as f64 / den as f64,
            ids_numerator: num,
            ids_denominator: den,
            model_count: count,
            trace_equals_rank: num == count as u64 * den,
        });
    }
    let centers = bs.centers();
    let n = model_evs.len().min(centers.len());
    let band_centers = centers[..n].to_vec();
    let center_deviation = band_centers
        .iter()
        .zip(&model_evs)
        .map(|(c, e)| (c - e).abs())
        .collect();
    let mut distinct: Vec<f64> = model
        .levels
        .iter()
        .filter(|l| l.value <= cutoff)
        .map(|l| l.value)
        .collect();
    distinct.dedup();
    Ok(SweepRow {
        mu,
        gaps_below_cutoff: gaps.len(),
        gaps,
        band_centers,
        center_deviation,
        hausdorff: hausdorff(&bs.edges(), &distinct, cutoff),
    })
}

/// Band structures of `H(μ)` for every coupling, compared with the model
/// operator of the configured wells below `cutoff`.
pub fn gap_emergence_sweep(
    template: &LatticeConfig,
    mus: &[f64],
    cutoff: f64,
) -> Result<GapSweep, LatticeError> {
    template.validate()?;
    let wells = template.model_wells()?;
    if wells.is_empty() {
        return Err(LatticeError::Config(
            "the sweep needs at least one declared Morse well".into(),
        ));
    }
    let model = model_levels(&wells, cutoff * 1.5 + 1.0)?;
    let model_below: usize = model
        .levels
        .iter()
        .filter(|l| l.value <= cutoff)
        .map(|l| l.multiplicity)
        .sum();
    let model_gap_count = model_gaps(&model)?
        .iter()
        .filter(|g| g.midpoint() < cutoff)
        .count();
    let cells = template.supercell_cells()?;
    let cells = cells[0] * cells[1];
    let mut rows = Vec::with_capacity(mus.len());
    let mut model_evs = Vec::new();
    for l in model.levels.iter().filter(|l| l.value <= cutoff) {
        for _ in 0..l.multiplicity {
            model_evs.push(l.value);
        }
    }
    for &mu in mus {
        let mut cfg = template.clone();
        cfg.mu = mu;
        let needed = (model_below + 2) * cells;
        cfg.bands = Some(cfg.bands.unwrap_or(0).max(needed));
        let bs = bloch_spectrum(&cfg)?;
        rows.push(sweep_row(&bs, mu, &model, cutoff)?);
    }
    let matches = |r: &SweepRow| {
        r.gaps.iter().filter(|g| g.trace_equals_rank).count() >= model_gap_count
            && r.gaps.iter().all(|g| g.trace_equals_rank)
    };
    let threshold_mu = rows
        .iter()
        .filter(|r| matches(r))
        .map(|r| r.mu)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    Ok(GapSweep {
        cutoff,
        model_eigenvalues: model_evs,
        model_gap_count,
        rows,
        threshold_mu,
    })
}
