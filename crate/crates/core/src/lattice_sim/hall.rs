use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bands::{bloch_spectrum, k_grid, solve_grid};
use super::config::LatticeConfig;
use super::projection::{spectral_projection_on_grid, SpectralProjection};
use super::LatticeError;

/// Orientation fixing the sign of both Chern evaluations: `+1` makes the
/// lowest Harper band at flux `1/3` carry Chern number `+1`.
pub const CHERN_ORIENTATION: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HallOptions {
    /// Momenta per axis for the link-variable method.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Momenta per axis for the Kubo commutator trace.
    #[serde(default = "default_grid")]
    pub kubo_grid: usize,
    /// Position cutoff `R` of the truncated commutators, in supercells.
    #[serde(default)]
    pub kubo_radius: Option<usize>,
    /// Minimal distance of `λ` from the spectrum.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Agreement and integrality tolerance.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_grid() -> usize {
    24
}
fn default_margin() -> f64 {
    1e-6
}
fn default_tolerance() -> f64 {
    0.01
}

impl Default for HallOptions {
    fn default() -> Self {
        Self {
            grid: 24,
            kubo_grid: 24,
            kubo_radius: None,
            margin: 1e-6,
            tolerance: 0.01,
        }
    }
}

impl HallOptions {
    pub fn radius(&self) -> usize {
        self.kubo_radius
            .unwrap_or((self.kubo_grid.saturating_sub(1)) / 2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HallResult {
    pub mu: f64,
    pub lambda: f64,
    pub rank: usize,
    /// Link-variable curvature integral over the Brillouin zone.
    pub chern_a: f64,
    /// Truncated real-space Kubo commutator trace.
    pub chern_b: f64,
    /// Imaginary part of the Kubo trace, a consistency diagnostic.
    pub chern_b_imag: f64,
    pub grid: usize,
    pub kubo_grid: usize,
    pub kubo_radius: usize,
    pub agree: bool,
    pub integer: bool,
}

impl HallResult {
    pub fn rounded(&self) -> i64 {
        self.chern_a.round() as i64
    }
}

fn overlap_det(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    if a.ncols() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let d = (a.adjoint() * b).determinant();
    let n = d.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        d / n
    }
}

/// Link-variable Chern number of frames on an `n × n` periodic grid
/// (first axis fastest): `(2πi)⁻¹ Σ ln(U₁U₂U₁⁻¹U₂⁻¹)` over all plaquettes.
pub fn link_variable_chern(frames: &[DMatrix<Complex64>], n: usize) -> f64 {
    let idx = |i: usize, j: usize| (i % n) + n * (j % n);
    let mut total = 0.0;
    for j in 0..n {
        for i in 0..n {
            let u1 = overlap_det(&frames[idx(i, j)], &frames[idx(i + 1, j)]);
            let u2 = overlap_det(&frames[idx(i + 1, j)], &frames[idx(i + 1, j + 1)]);
            let u3 = overlap_det(&frames[idx(i + 1, j + 1)], &frames[idx(i, j + 1)]);
            let u4 = overlap_det(&frames[idx(i, j + 1)], &frames[idx(i, j)]);
            total += (u1 * u2 * u3 * u4).arg();
        }
    }
    CHERN_ORIENTATION * total / (2.0 * PI)
}

/// `G(Δ) = Σ_{|β| ≤ R} β·e^{2πiΔβ/n}` and `F(Δ) = Σ_{|β| ≤ R} e^{2πiΔβ/n}` for `Δ ∈ ℤ_n`.
fn position_weights(n: usize, radius: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let r = radius as i64;
    let mut g = vec![Complex64::default(); n];
    let mut f = vec![Complex64::default(); n];
    for d in 0..n {
        for b in -r..=r {
            let e = Complex64::from_polar(1.0, 2.0 * PI * (d as i64 * b) as f64 / n as f64);
            g[d] += e * b as f64;
            f[d] += e;
        }
    }
    (g, f)
}

/// Real-space Kubo evaluation `2πi·Tr_Γ(P[[X,P],[Y,P]])` with the position
/// commutators truncated to `|β_j| ≤ R` supercells. The kernel
/// `P(β) = N⁻¹ Σ_k e^{ikβ} P_k` comes from the frames on the `n × n` grid, so
///
/// `Tr_Γ(P[[X,P],[Y,P]]) = N⁻³ Σ_{a,b,c} Tr(P_a P_b P_c)·(G₁(b−a)G₂(c−a) − G₂(b−a)G₁(c−a))`
///
/// with separable weights `G₁(Δ) = G(Δ₁)F(Δ₂)` and `G₂(Δ) = F(Δ₁)G(Δ₂)`.
/// Returns the real and imaginary parts.
pub fn kubo_chern(frames: &[DMatrix<Complex64>], n: usize, radius: usize) -> (f64, f64) {
    let big_n = n * n;
    let r = frames.first().map_or(0, |f| f.ncols());
    if r == 0 {
        return (0.0, 0.0);
    }
    let (g, f) = position_weights(n, radius);
    let coords = |a: usize| (a % n, a / n);
    let diff = |b: usize, a: usize| {
        let (b1, b2) = coords(b);
        let (a1, a2) = coords(a);
        ((b1 + n - a1) % n, (b2 + n - a2) % n)
    };
    let w1 = |d: (usize, usize)| g[d.0] * f[d.1];
    let w2 = |d: (usize, usize)| f[d.0] * g[d.1];
    let mut overlaps = vec![Complex64::default(); big_n * big_n * r * r];
    for a in 0..big_n {
        for b in 0..big_n {
            let o = frames[a].adjoint() * &frames[b];
            let base = (a * big_n + b) * r * r;
            for i in 0..r {
                for j in 0..r {
                    overlaps[base + i * r + j] = o[(i, j)];
                }
            }
        }
    }
    let ov = |a: usize, b: usize| &overlaps[(a * big_n + b) * r * r..(a * big_n + b + 1) * r * r];
    let mut total = Complex64::default();
    let mut ab = vec![Complex64::default(); r * r];
    for a in 0..big_n {
        for b in 0..big_n {
            let dab = diff(b, a);
            let (g1b, g2b) = (w1(dab), w2(dab));
            let oab = ov(a, b);
            for c in 0..big_n {
                let dca = diff(c, a);
                let weight = g1b * w2(dca) - g2b * w1(dca);
                if weight == Complex64::default() {
                    continue;
                }
                let obc = ov(b, c);
                let oca = ov(c, a);
                for i in 0..r {
                    for j in 0..r {
                        let mut s = Complex64::default();
                        for k in 0..r {
                            s += oab[i * r + k] * obc[k * r + j];
                        }
                        ab[i * r + j] = s;
                    }
                }
                let mut tr = Complex64::default();
                for i in 0..r {
                    for j in 0..r {
                        tr += ab[i * r + j] * oca[j * r + i];
                    }
                }
                total += tr * weight;
            }
        }
    }
    let trace = total / (big_n as f64).powi(3);
    let c = Complex64::new(0.0, 2.0 * PI) * trace * CHERN_ORIENTATION;
    (c.re, c.im)
}

fn chern_pair(
    config: &LatticeConfig,
    lambda: f64,
    opts: &HallOptions,
) -> Result<(SpectralProjection, f64, (f64, f64)), LatticeError> {
    let proj = spectral_projection_on_grid(config, lambda, opts.margin, opts.grid)?;
    let a = link_variable_chern(&proj.frames, opts.grid);
    let b = if opts.kubo_grid == opts.grid {
        kubo_chern(&proj.frames, opts.grid, opts.radius())
    } else {
        let pk = spectral_projection_on_grid(config, lambda, opts.margin, opts.kubo_grid)?;
        kubo_chern(&pk.frames, opts.kubo_grid, opts.radius())
    };
    Ok((proj, a, b))
}

/// Hall conductance of the projection below `λ`, as a Chern number computed
/// twice: by link variables and by the truncated Kubo trace.
pub fn hall_conductance(
    config: &LatticeConfig,
    lambda: f64,
    opts: &HallOptions,
) -> Result<HallResult, LatticeError> {
    if config.dimension != 2 {
        return Err(LatticeError::Config(
            "Hall conductance needs dimension 2".into(),
        ));
    }
    if 2 * opts.radius() + 1 > opts.kubo_grid {
        return Err(LatticeError::Config(format!(
            "Kubo radius {} aliases on a {}-point grid",
            opts.radius(),
            opts.kubo_grid
        )));
    }
    let (proj, a, (b, b_im)) = chern_pair(config, lambda, opts)?;
    let agree = (a - b).abs() < opts.tolerance;
    let integer = (a - a.round()).abs() < opts.tolerance && (b - b.round()).abs() < opts.tolerance;
    Ok(HallResult {
        mu: config.mu,
        lambda,
        rank: proj.rank,
        chern_a: a,
        chern_b: b,
        chern_b_imag: b_im,
        grid: opts.grid,
        kubo_grid: opts.kubo_grid,
        kubo_radius: opts.radius(),
        agree,
        integer,
    })
}

/// Midpoint of the `index`-th detected gap of the configured band structure.
pub fn gap_midpoint(config: &LatticeConfig, index: usize) -> Result<f64, LatticeError> {
    let bs = bloch_spectrum(config)?;
    bs.gaps
        .get(index)
        .map(|g| g.midpoint())
        .ok_or(LatticeError::NoSuchGap {
            index,
            found: bs.gaps.len(),
        })
}

/// Midpoint of the `index`-th gap of the model operator built from the
/// configured wells: the energy at which the semiclassical gaps open.
pub fn model_gap_midpoint(
    config: &LatticeConfig,
    index: usize,
    cutoff: f64,
) -> Result<f64, LatticeError> {
    let wells = config.model_wells()?;
    if wells.is_empty() {
        return Err(LatticeError::Config(
            "a model gap needs declared wells".into(),
        ));
    }
    let spec = crate::model_operator::model_levels(&wells, cutoff)?;
    let gaps = crate::model_operator::model_gaps(&spec)?;
    gaps.get(index)
        .map(|g| g.midpoint())
        .ok_or(LatticeError::NoSuchGap {
            index,
            found: gaps.len(),
        })
}

/// Per-band Chern numbers of every band of a fiber that is isolated on the
/// grid (computed from single-band frames), with their link-variable sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubbandCherns {
    pub cherns: Vec<f64>,
    pub sum: f64,
}

pub fn subband_cherns(config: &LatticeConfig, n: usize) -> Result<SubbandCherns, LatticeError> {
    let k_points = k_grid(2, n);
    let dim = super::assemble::Supercell::new(config)?.dim();
    let pairs = solve_grid(config, &k_points, n, dim, true)?;
    for band in 0..dim.saturating_sub(1) {
        let top = pairs
            .iter()
            .map(|p| p.values[band])
            .fold(f64::NEG_INFINITY, f64::max);
        let bottom = pairs
            .iter()
            .map(|p| p.values[band + 1])
            .fold(f64::INFINITY, f64::min);
        if !(bottom > top) {
            return Err(LatticeError::Config(format!(
                "bands {band} and {} overlap on the grid",
                band + 1
            )));
        }
    }
    let cherns: Vec<f64> = (0..dim)
        .map(|band| {
            let frames: Vec<DMatrix<Complex64>> = pairs
                .iter()
                .map(|p| p.vectors.columns(band, 1).into_owned())
                .collect();
            link_variable_chern(&frames, n)
        })
        .collect();
    let sum = cherns.iter().sum();
    Ok(SubbandCherns { cherns, sum })
}
