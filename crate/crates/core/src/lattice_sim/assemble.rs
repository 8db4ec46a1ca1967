use num_complex::Complex64;

use super::config::LatticeConfig;
use super::gauge::GaugeData;
use super::LatticeError;
use crate::linalg::CsrMatrix;

/// Grid geometry of one supercell together with its gauge.
#[derive(Clone, Debug)]
pub struct Supercell {
    pub dimension: usize,
    /// Unit cells per axis.
    pub cells: [usize; 2],
    /// Grid points per unit length.
    pub m: usize,
    /// Grid points per axis of the supercell.
    pub sites: [usize; 2],
    /// Fiber dimension `N`.
    pub fiber: usize,
    pub gauge: GaugeData,
}

impl Supercell {
    pub fn new(config: &LatticeConfig) -> Result<Self, LatticeError> {
        config.validate()?;
        let cells = config.supercell_cells()?;
        let m = config.points_per_cell;
        let sites = [
            cells[0] * m,
            if config.dimension == 2 {
                cells[1] * m
            } else {
                1
            },
        ];
        Ok(Self {
            dimension: config.dimension,
            cells,
            m,
            sites,
            fiber: config.fiber_dim(),
            gauge: GaugeData::from_config(config)?,
        })
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn cell_count(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn site_count(&self) -> usize {
        self.sites[0] * self.sites[1]
    }

    /// Dimension of each Bloch fiber, sites times `N`.
    pub fn dim(&self) -> usize {
        self.site_count() * self.fiber
    }

    pub fn site_index(&self, ix: usize, iy: usize) -> usize {
        ix + self.sites[0] * iy
    }

    pub fn site_coords(&self, site: usize) -> [usize; 2] {
        [site % self.sites[0], site / self.sites[0]]
    }

    pub fn position(&self, ix: i64, iy: i64) -> [f64; 2] {
        let h = self.spacing();
        [ix as f64 * h, iy as f64 * h]
    }

    /// Supercell period vectors `W₁ = (L₁, 0)` and `W₂ = (0, L₂)` in length units.
    pub fn periods(&self) -> [f64; 2] {
        [self.cells[0] as f64, self.cells[1] as f64]
    }

    /// Maps an unwrapped grid point to its representative inside the supercell
    /// together with the factor `c` in `u(outside) = c·u(inside)` imposed by the
    /// magnetic Bloch condition `u(r + W) = e^{iκ·n} e^{−iψ_W(r)} u(r)`.
    pub fn wrap(&self, ix: i64, iy: i64, kappa: [f64; 2]) -> (usize, Complex64) {
        let (sx, sy) = (self.sites[0] as i64, self.sites[1] as i64);
        let (n1, n2) = (ix.div_euclid(sx), iy.div_euclid(sy));
        let (jx, jy) = (ix.rem_euclid(sx), iy.rem_euclid(sy));
        if n1 == 0 && n2 == 0 {
            return (
                self.site_index(jx as usize, jy as usize),
                Complex64::new(1.0, 0.0),
            );
        }
        let p = self.periods();
        let w = [n1 as f64 * p[0], n2 as f64 * p[1]];
        let inside = self.position(jx, jy);
        let phase = kappa[0] * n1 as f64 + kappa[1] * n2 as f64 - self.gauge.psi(w, inside);
        (
            self.site_index(jx as usize, jy as usize),
            Complex64::from_polar(1.0, phase),
        )
    }
}

/// Bloch fiber `H_κ` of `H(μ) = μ∇_A*∇_A + B + μ⁻¹V` on the supercell, with
/// `∇_A = d + iA` discretised by Peierls phases on nearest-neighbour links.
pub fn assemble(config: &LatticeConfig, kappa: [f64; 2]) -> Result<CsrMatrix, LatticeError> {
    let cell = Supercell::new(config)?;
    let b = config.fiber_endo()?;
    Ok(assemble_on(&cell, config, &b, kappa))
}

pub(crate) fn assemble_on(
    cell: &Supercell,
    config: &LatticeConfig,
    b: &nalgebra::DMatrix<Complex64>,
    kappa: [f64; 2],
) -> CsrMatrix {
    let n_f = cell.fiber;
    let h = cell.spacing();
    let mu = config.mu;
    let hop = mu / (h * h);
    let mut t: Vec<(usize, usize, Complex64)> =
        Vec::with_capacity(cell.dim() * (2 * cell.dimension + n_f));
    for iy in 0..cell.sites[1] {
        for ix in 0..cell.sites[0] {
            let s = cell.site_index(ix, iy);
            let r = cell.position(ix as i64, iy as i64);
            let x: Vec<f64> = r[..cell.dimension].to_vec();
            let diag = 2.0 * cell.dimension as f64 * hop + config.potential.eval(&x) / mu;
            for a in 0..n_f {
                for c in 0..n_f {
                    let mut v = b[(a, c)];
                    if a == c {
                        v += diag;
                    }
                    if v != Complex64::default() {
                        t.push((s * n_f + a, s * n_f + c, v));
                    }
                }
            }
            for axis in 0..cell.dimension {
                let (jx, jy) = if axis == 0 {
                    (ix as i64 + 1, iy as i64)
                } else {
                    (ix as i64, iy as i64 + 1)
                };
                let phase = cell.gauge.link_phase(r, cell.position(jx, jy));
                let (nb, factor) = cell.wrap(jx, jy, kappa);
                let v = -hop * Complex64::from_polar(1.0, phase) * factor;
                for a in 0..n_f {
                    t.push((s * n_f + a, nb * n_f + a, v));
                    t.push((nb * n_f + a, s * n_f + a, v.conj()));
                }
            }
        }
    }
    CsrMatrix::from_triplets(cell.dim(), t)
}

/// Magnetic translation `(T_γ u)(r) = e^{−iψ_γ(r−γ)} u(r−γ)` on the κ-fiber.
///
/// Only translations that commute with the supercell periods act within a
/// single fiber, i.e. those with `θ(γ₁W₂ − W₁γ₂) ∈ ℤ` for both periods `W`.
pub fn magnetic_translation(
    config: &LatticeConfig,
    gamma: [i64; 2],
    kappa: [f64; 2],
) -> Result<CsrMatrix, LatticeError> {
    let cell = Supercell::new(config)?;
    if cell.dimension == 1 && gamma[1] != 0 {
        return Err(LatticeError::IncompatibleTranslation(gamma));
    }
    let (p, q) = cell.gauge.flux;
    let [l1, l2] = [cell.cells[0] as i64, cell.cells[1] as i64];
    if (p * gamma[0] * l2) % q != 0 || (p * l1 * gamma[1]) % q != 0 {
        return Err(LatticeError::IncompatibleTranslation(gamma));
    }
    let m = cell.m as i64;
    let gf = [gamma[0] as f64, gamma[1] as f64];
    let n_f = cell.fiber;
    let mut t = Vec::with_capacity(cell.dim());
    for iy in 0..cell.sites[1] {
        for ix in 0..cell.sites[0] {
            let s = cell.site_index(ix, iy);
            let (sx, sy) = (ix as i64 - gamma[0] * m, iy as i64 - gamma[1] * m);
            let phase = -cell.gauge.psi(gf, cell.position(sx, sy));
            let (src, factor) = cell.wrap(sx, sy, kappa);
            let v = Complex64::from_polar(1.0, phase) * factor;
            for a in 0..n_f {
                t.push((s * n_f + a, src * n_f + a, v));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(cell.dim(), t))
}
