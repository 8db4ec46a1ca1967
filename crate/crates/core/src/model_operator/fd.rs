use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::well::{well_frequencies, WellSpec};
use super::{levels::oscillator_values, ModelError};
use crate::linalg::{lowest_eigenpairs, CsrMatrix, SolverOptions};

/// Grid used by the finite-difference discretisation of `K(μ)`.
#[derive(Clone, Debug, Serialize)]
pub struct FdOptions {
    /// Interior points per axis.
    pub points: usize,
    /// Half width of the box at `μ = 1` on every axis; `None` sizes each axis
    /// as `spread · σᵢ` from the ground-state width `σᵢ` along that axis.
    pub half_width: Option<f64>,
    pub spread: f64,
    /// Number of eigenvalues compared.
    pub count: usize,
}

impl FdOptions {
    pub fn one_dimensional() -> Self {
        Self {
            points: 2000,
            half_width: None,
            spread: 10.0,
            count: 5,
        }
    }

    pub fn two_dimensional() -> Self {
        Self {
            points: 60,
            half_width: None,
            spread: 6.0,
            count: 5,
        }
    }

    fn box_half_widths(&self, w: &WellSpec) -> Result<Vec<f64>, ModelError> {
        if let Some(l) = self.half_width {
            return Ok(vec![l; w.dim()]);
        }
        Ok(ground_state_widths(w)?
            .into_iter()
            .map(|s| self.spread * s)
            .collect())
    }
}

fn sym_power(m: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.powf(p)));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// `σᵢ = √((A⁻¹)ᵢᵢ)` for the ground state `exp(−xᵀAx/2)`, where `AGA = W`.
fn ground_state_widths(w: &WellSpec) -> Result<Vec<f64>, ModelError> {
    well_frequencies(w)?;
    let root = sym_power(&w.metric, 0.5);
    let inner = &root * &w.hessian_half * &root;
    let inv_a = &root * sym_power(&((&inner + inner.transpose()) * 0.5), -0.5) * &root;
    Ok((0..w.dim()).map(|i| inv_a[(i, i)].sqrt()).collect())
}

/// Second-order finite-difference matrix of the scalar part
/// `μ(−Σ g^{ik}∂ᵢ∂_k) + μ⁻¹ xᵀWx` on a box of half widths `Lᵢ√μ` with
/// Dirichlet ends, so that the grid rescales with `√μ`.
pub fn fd_matrix(w: &WellSpec, mu: f64, opts: &FdOptions) -> Result<CsrMatrix, ModelError> {
    let n = opts.points;
    let steps: Vec<f64> = opts
        .box_half_widths(w)?
        .iter()
        .map(|l| 2.0 * l * mu.sqrt() / (n as f64 + 1.0))
        .collect();
    let coord = |axis: usize, i: usize| steps[axis] * (i as f64 + 1.0 - 0.5 * (n as f64 + 1.0));
    let g = &w.metric;
    let v = &w.hessian_half;
    match w.dim() {
        1 => {
            let h = steps[0];
            let mut t = Vec::with_capacity(3 * n);
            let hop = mu * g[(0, 0)] / (h * h);
            for i in 0..n {
                let x = coord(0, i);
                t.push((
                    i,
                    i,
                    Complex64::new(2.0 * hop + v[(0, 0)] * x * x / mu, 0.0),
                ));
                if i + 1 < n {
                    t.push((i, i + 1, Complex64::new(-hop, 0.0)));
                    t.push((i + 1, i, Complex64::new(-hop, 0.0)));
                }
            }
            Ok(CsrMatrix::from_triplets(n, t))
        }
        2 => {
            let (hx, hy) = (steps[0], steps[1]);
            let idx = |i: usize, j: usize| i * n + j;
            let mut t = Vec::with_capacity(9 * n * n);
            let (gxx, gxy, gyy) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
            let cx = mu * gxx / (hx * hx);
            let cy = mu * gyy / (hy * hy);
            let cxy = mu * 2.0 * gxy / (4.0 * hx * hy);
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = (coord(0, i), coord(1, j));
                    let pot =
                        (v[(0, 0)] * x * x + 2.0 * v[(0, 1)] * x * y + v[(1, 1)] * y * y) / mu;
                    let r = idx(i, j);
                    t.push((r, r, Complex64::new(2.0 * cx + 2.0 * cy + pot, 0.0)));
                    let mut push = |di: isize, dj: isize, c: f64| {
                        let (a, b) = (i as isize + di, j as isize + dj);
                        if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                            t.push((r, idx(a as usize, b as usize), Complex64::new(c, 0.0)));
                        }
                    };
                    push(1, 0, -cx);
                    push(-1, 0, -cx);
                    push(0, 1, -cy);
                    push(0, -1, -cy);
                    if cxy != 0.0 {
                        push(1, 1, -cxy);
                        push(-1, -1, -cxy);
                        push(1, -1, cxy);
                        push(-1, 1, cxy);
                    }
                }
            }
            Ok(CsrMatrix::from_triplets(n * n, t))
        }
        d => Err(ModelError::Shape(format!(
            "finite-difference oracle supports dimensions 1 and 2, not {d}"
        ))),
    }
}

fn scalar_levels(w: &WellSpec, mu: f64, opts: &FdOptions) -> Result<(Vec<f64>, f64), ModelError> {
    let m = fd_matrix(w, mu, opts)?;
    let h = 2.0 * mu.sqrt() / (opts.points as f64 + 1.0);
    Ok((
        lowest_eigenpairs(&m, opts.count.min(m.dim()), &SolverOptions::default(), None)?.values,
        h,
    ))
}

/// Lowest `opts.count` eigenvalues of the discretised `K(μ)`, fiber included.
///
/// The scalar levels are Richardson-extrapolated from grids with `points` and
/// `points / 2` nodes per axis, removing the `O(h²)` discretisation error.
pub fn fd_eigenvalues(w: &WellSpec, mu: f64, opts: &FdOptions) -> Result<Vec<f64>, ModelError> {
    let (fine, h1) = scalar_levels(w, mu, opts)?;
    let coarse_opts = FdOptions {
        points: opts.points / 2,
        ..opts.clone()
    };
    let (coarse, h2) = scalar_levels(w, mu, &coarse_opts)?;
    let (a, b) = (h2 * h2, h1 * h1);
    let scalar: Vec<f64> = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (a * f - b * c) / (a - b))
        .collect();
    let mut all: Vec<f64> = Vec::new();
    for beta in w.fiber_levels() {
        all.extend(scalar.iter().map(|s| s + beta));
    }
    all.sort_by(f64::total_cmp);
    all.truncate(opts.count);
    Ok(all)
}

#[derive(Clone, Debug, Serialize)]
pub struct MuRow {
    pub mu: f64,
    pub eigenvalues: Vec<f64>,
    pub max_deviation_from_unit_coupling: f64,
    pub max_deviation_from_closed_form: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MuInvarianceReport {
    pub pass: bool,
    pub tolerance: f64,
    pub closed_form: Vec<f64>,
    pub rows: Vec<MuRow>,
}

/// Compares the discretised spectra of `K(μ)` for each `μ` with `K(1)` and
/// with the closed-form oscillator levels.
pub fn mu_invariance_check(
    w: &WellSpec,
    mus: &[f64],
    opts: &FdOptions,
    tol: f64,
) -> Result<MuInvarianceReport, ModelError> {
    if let Some(&bad) = mus.iter().find(|&&m| !(m > 0.0)) {
        return Err(ModelError::Shape(format!(
            "coupling must be positive, got {bad}"
        )));
    }
    let reference = fd_eigenvalues(w, 1.0, opts)?;
    let omega = well_frequencies(w)?;
    let top = reference.last().cloned().unwrap_or(0.0) * 2.0 + 1.0;
    let mut exact: Vec<f64> = w
        .fiber_levels()
        .into_iter()
        .flat_map(|b| oscillator_values(&omega, b, top))
        .collect();
    exact.sort_by(f64::total_cmp);
    exact.truncate(opts.count);
    let mut rows = Vec::new();
    let mut pass = true;
    for &mu in mus {
        let ev = if mu == 1.0 {
            reference.clone()
        } else {
            fd_eigenvalues(w, mu, opts)?
        };
        let dev = |other: &[f64]| {
            ev.iter()
                .zip(other)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
                .fold(0.0f64, f64::max)
        };
        let du = dev(&reference);
        let dc = dev(&exact);
        pass &= du <= tol && dc <= tol;
        rows.push(MuRow {
            mu,
            eigenvalues: ev,
            max_deviation_from_unit_coupling: du,
            max_deviation_from_closed_form: dc,
        });
    }
    Ok(MuInvarianceReport {
        pass,
        tolerance: tol,
        closed_form: exact,
        rows,
    })
}
