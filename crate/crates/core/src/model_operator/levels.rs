use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::well::{well_frequencies, WellSpec};
use super::ModelError;
use crate::gap_certificate::GapInterval;

/// One distinct eigenvalue of the model operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

/// Spectrum of the model operator below a cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpectrum {
    pub levels: Vec<Level>,
    pub cutoff: f64,
    /// No eigenvalue at or below `cutoff` is missing.
    pub complete_below: bool,
    /// Closed-form values (as opposed to a truncated-basis approximation).
    pub exact: bool,
}

/// Relative tolerance under which two eigenvalues count as one level.
pub const MERGE_TOL: f64 = 1e-9;

pub(crate) fn merge_levels(mut values: Vec<f64>) -> Vec<Level> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<Level> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some(l) if (v - l.value).abs() <= MERGE_TOL * l.value.abs().max(1.0) => {
                l.multiplicity += 1
            }
            _ => out.push(Level {
                value: v,
                multiplicity: 1,
            }),
        }
    }
    out
}

struct State {
    energy: f64,
    n: Vec<u32>,
    last: usize,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for State {}
impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .energy
            .total_cmp(&self.energy)
            .then_with(|| other.n.cmp(&self.n))
    }
}

fn oscillator_energy(omega: &[f64], n: &[u32], beta: f64) -> f64 {
    let mut e = 0.0;
    for (w, &k) in omega.iter().zip(n) {
        e += (2.0 * k as f64 + 1.0) * w;
    }
    e + beta
}

/// All values `Σᵢ(2nᵢ+1)ωᵢ + β ≤ cutoff`, each multi-index exactly once.
///
/// Multi-indices are expanded from a min-heap, incrementing only coordinates
/// at or after the last incremented one, so the search visits every index
/// once and stops as soon as the heap minimum exceeds the cutoff.
pub fn oscillator_values(omega: &[f64], beta: f64, cutoff: f64) -> Vec<f64> {
    let d = omega.len();
    let mut out = Vec::new();
    let mut heap = BinaryHeap::new();
    let start = vec![0u32; d];
    heap.push(State {
        energy: oscillator_energy(omega, &start, beta),
        n: start,
        last: 0,
    });
    while let Some(s) = heap.pop() {
        if s.energy > cutoff {
            break;
        }
        out.push(s.energy);
        for i in s.last..d {
            let mut n = s.n.clone();
            n[i] += 1;
            heap.push(State {
                energy: oscillator_energy(omega, &n, beta),
                n,
                last: i,
            });
        }
    }
    out
}

/// Spectrum of `K = ⊕ⱼ Kⱼ` below `cutoff`.
pub fn model_levels(wells: &[WellSpec], cutoff: f64) -> Result<ModelSpectrum, ModelError> {
    if !cutoff.is_finite() {
        return Err(ModelError::Shape("cutoff must be finite".into()));
    }
    let mut values = Vec::new();
    for w in wells {
        let omega = well_frequencies(w)?;
        for beta in w.fiber_levels() {
            values.extend(oscillator_values(&omega, beta, cutoff));
        }
    }
    Ok(ModelSpectrum {
        levels: merge_levels(values),
        cutoff,
        complete_below: true,
        exact: true,
    })
}

/// Maximal open intervals between consecutive levels below the cutoff.
pub fn model_gaps(s: &ModelSpectrum) -> Result<Vec<GapInterval>, ModelError> {
    if !s.complete_below {
        return Err(ModelError::Incomplete);
    }
    Ok(s.levels
        .windows(2)
        .map(|w| GapInterval {
            a: w[0].value,
            b: w[1].value,
        })
        .collect())
}

/// `rank E⁰(λ)`: number of eigenvalues `≤ λ`, with multiplicity.
pub fn counting_function(s: &ModelSpectrum, lambda: f64) -> Result<usize, ModelError> {
    if lambda > s.cutoff {
        return Err(ModelError::AboveCutoff {
            lambda,
            cutoff: s.cutoff,
        });
    }
    Ok(s.levels
        .iter()
        .filter(|l| l.value <= lambda)
        .map(|l| l.multiplicity)
        .sum())
}

impl ModelSpectrum {
    pub fn ground(&self) -> Option<f64> {
        self.levels.first().map(|l| l.value)
    }

    /// Flat list of eigenvalues with multiplicity.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|l| std::iter::repeat(l.value).take(l.multiplicity))
            .collect()
    }
}
