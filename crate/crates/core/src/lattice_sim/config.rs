use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LatticeError;
use crate::linalg::SolverOptions;
use crate::model_operator::WellSpec;
use crate::twisted_algebra::LandauGauge;

/// How the continuum operator is put on the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discretization {
    /// Second-order central differences with `m ≥ 16` points per unit length.
    #[default]
    FiniteDifference,
    /// One site per unit cell with nearest-neighbour Peierls hopping (`m = 1`).
    TightBinding,
}

/// Rational flux `θ = p/q` per unit cell, in units of the flux quantum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flux {
    pub p: i64,
    pub q: i64,
}

impl Flux {
    pub fn theta(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Reduced form with `q > 0`.
    pub fn reduced(&self) -> Result<Flux, LatticeError> {
        if self.q == 0 {
            return Err(LatticeError::Config(
                "flux denominator must be nonzero".into(),
            ));
        }
        let g = gcd(self.p, self.q).max(1);
        let s = self.q.signum();
        Ok(Flux {
            p: s * self.p / g,
            q: s * self.q / g,
        })
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One term `a·cos(2π k·x + φ)` of a trigonometric potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

/// Periodic potential on the unit cell `[0,1)^d`, in energy units.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Zero,
    /// `V(x) = c + Σ a·cos(2π k·x + φ)`.
    Trig {
        #[serde(default)]
        constant: f64,
        terms: Vec<TrigTerm>,
    },
    /// `V(x) = D·Πⱼ (1 − exp(−sⱼ(x)/2w²))` with the periodic squared distance
    /// `sⱼ(x) = Σᵢ sin²(π(xᵢ − cⱼᵢ))/π²`; vanishes exactly at every centre.
    Gaussian {
        depth: f64,
        width: f64,
        centers: Vec<Vec<f64>>,
    },
}

impl PotentialSpec {
    /// `sin²(πx₁) + … + sin²(πx_d)`, scaled by `strength`.
    pub fn sin_squared(dim: usize, strength: f64) -> Self {
        let mut terms = Vec::new();
        for i in 0..dim {
            let mut k = vec![0; dim];
            k[i] = 1;
            terms.push(TrigTerm {
                amplitude: -0.5 * strength,
                frequency: k,
                phase: 0.0,
            });
        }
        PotentialSpec::Trig {
            constant: 0.5 * strength * dim as f64,
            terms,
        }
    }

    fn trig_phase(k: &[i64], x: &[f64], phase: f64) -> f64 {
        2.0 * PI * k.iter().zip(x).map(|(&k, &x)| k as f64 * x).sum::<f64>() + phase
    }

    fn gaussian_factor(x: &[f64], c: &[f64], width: f64) -> (f64, f64) {
        let s: f64 = x
            .iter()
            .zip(c)
            .map(|(x, c)| (PI * (x - c)).sin().powi(2))
            .sum::<f64>()
            / (PI * PI);
        let e = (-s / (2.0 * width * width)).exp();
        (1.0 - e, s)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Trig { constant, terms } => {
                constant
                    + terms
                        .iter()
                        .map(|t| t.amplitude * Self::trig_phase(&t.frequency, x, t.phase).cos())
                        .sum::<f64>()
            }
            PotentialSpec::Gaussian {
                depth,
                width,
                centers,
            } => {
                depth
                    * centers
                        .iter()
                        .map(|c| Self::gaussian_factor(x, c, *width).0)
                        .product::<f64>()
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            PotentialSpec::Trig { terms, .. } => (0..x.len())
                .map(|i| {
                    terms
                        .iter()
                        .map(|t| {
                            -t.amplitude
                                * 2.0
                                * PI
                                * t.frequency[i] as f64
                                * Self::trig_phase(&t.frequency, x, t.phase).sin()
                        })
                        .sum()
                })
                .collect(),
            _ => numeric_gradient(|y| self.eval(y), x),
        }
    }

    /// Hessian matrix `∇²V(x)`.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = x.len();
        match self {
            PotentialSpec::Zero => DMatrix::zeros(d, d),
            PotentialSpec::Trig { terms, .. } => DMatrix::from_fn(d, d, |i, j| {
                terms
                    .iter()
                    .map(|t| {
                        -t.amplitude
                            * 4.0
                            * PI
                            * PI
                            * (t.frequency[i] * t.frequency[j]) as f64
                            * Self::trig_phase(&t.frequency, x, t.phase).cos()
                    })
                    .sum()
            }),
            PotentialSpec::Gaussian {
                depth,
                width,
                centers,
            } => {
                let at_center = centers
                    .iter()
                    .position(|c| Self::gaussian_factor(x, c, *width).1 < 1e-24);
                match at_center {
                    Some(j) => {
                        let others: f64 = centers
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != j)
                            .map(|(_, c)| Self::gaussian_factor(x, c, *width).0)
                            .product();
                        DMatrix::identity(d, d) * (depth * others / (width * width))
                    }
                    None => numeric_hessian(|y| self.eval(y), x),
                }
            }
        }
    }
}

fn numeric_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    (0..x.len())
        .map(|i| {
            let (mut a, mut b) = (x.to_vec(), x.to_vec());
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

fn numeric_hessian(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> DMatrix<f64> {
    let h = 1e-4;
    let d = x.len();
    DMatrix::from_fn(d, d, |i, j| {
        let shifted = |si: f64, sj: f64| {
            let mut y = x.to_vec();
            y[i] += si;
            y[j] += sj;
            f(&y)
        };
        (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h)
    })
}

/// Constant Hermitian endomorphism `B` of the fiber `ℂᴺ`, in energy units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HermitianSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl HermitianSpec {
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>, LatticeError> {
        let n = self.re.len();
        if n == 0 || self.re.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Config(
                "endomorphism must be a nonempty square matrix".into(),
            ));
        }
        if let Some(im) = &self.im {
            if im.len() != n || im.iter().any(|r| r.len() != n) {
                return Err(LatticeError::Config(
                    "imaginary part must match the real part in shape".into(),
                ));
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        });
        let defect = (&m - m.adjoint())
            .iter()
            .fold(0.0f64, |a, z| a.max(z.norm()));
        if defect > 1e-12 {
            return Err(LatticeError::Config(format!(
                "endomorphism is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(m)
    }
}

/// Eigensolver settings shared by every fiber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_dense")]
    pub dense_threshold: usize,
    #[serde(default = "default_restarts")]
    pub max_restarts: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_dense() -> usize {
    256
}
fn default_restarts() -> usize {
    60
}
fn default_seed() -> u64 {
    0x5eed
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            dense_threshold: default_dense(),
            max_restarts: default_restarts(),
            seed: default_seed(),
        }
    }
}

impl SolverSettings {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            dense_threshold: self.dense_threshold,
            tol: self.tol,
            max_restarts: self.max_restarts,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }
}

fn default_points() -> usize {
    32
}
fn default_k() -> usize {
    16
}
fn default_gauge() -> LandauGauge {
    LandauGauge::LandauX
}

/// Discretised `H(μ) = μ∇*∇ + B + μ⁻¹V` on `ℝᵈ` with a periodic potential and
/// an optional uniform magnetic field of rational flux per unit cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Space dimension, 1 or 2.
    pub dimension: usize,
    /// Grid points per unit length along each axis.
    #[serde(default = "default_points")]
    pub points_per_cell: usize,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub potential: PotentialSpec,
    /// Morse wells inside the unit cell, in cell coordinates. Gaussian
    /// potentials default to their centres.
    #[serde(default)]
    pub wells: Vec<Vec<f64>>,
    #[serde(default)]
    pub endomorphism: Option<HermitianSpec>,
    /// Coupling constant `μ > 0`.
    pub mu: f64,
    /// Flux per unit cell (2D only).
    #[serde(default)]
    pub flux: Option<Flux>,
    #[serde(default = "default_gauge")]
    pub gauge: LandauGauge,
    /// Unit cells per supercell along each axis; defaults to the magnetic cell.
    #[serde(default)]
    pub supercell: Option<Vec<usize>>,
    /// Bloch momenta per axis of the supercell Brillouin zone.
    #[serde(default = "default_k")]
    pub k_points: usize,
    /// Bands computed per fiber; defaults to all of them for small fibers.
    #[serde(default)]
    pub bands: Option<usize>,
    #[serde(default)]
    pub solver: SolverSettings,
}

impl LatticeConfig {
    /// One-dimensional template with zero potential.
    pub fn new_1d(points_per_cell: usize, mu: f64) -> Self {
        Self {
            dimension: 1,
            points_per_cell,
            discretization: Discretization::FiniteDifference,
            potential: PotentialSpec::Zero,
            wells: vec![],
            endomorphism: None,
            mu,
            flux: None,
            gauge: LandauGauge::LandauX,
            supercell: None,
            k_points: default_k(),
            bands: None,
            solver: SolverSettings::default(),
        }
    }

    /// Two-dimensional template with zero potential.
    pub fn new_2d(points_per_cell: usize, mu: f64, flux: Option<Flux>) -> Self {
        Self {
            dimension: 2,
            flux,
            ..Self::new_1d(points_per_cell, mu)
        }
    }

    /// Harper model: tight binding at flux `p/q`, `V = 0`.
    pub fn harper(p: i64, q: i64) -> Self {
        Self {
            points_per_cell: 1,
            discretization: Discretization::TightBinding,
            ..Self::new_2d(1, 1.0, Some(Flux { p, q }))
        }
    }

    pub fn flux_reduced(&self) -> Result<Option<Flux>, LatticeError> {
        self.flux.map(|f| f.reduced()).transpose()
    }

    pub fn fiber_endo(&self) -> Result<DMatrix<Complex64>, LatticeError> {
        match &self.endomorphism {
            Some(b) => b.to_matrix(),
            None => Ok(DMatrix::zeros(1, 1)),
        }
    }

    pub fn fiber_dim(&self) -> usize {
        self.endomorphism.as_ref().map_or(1, |b| b.re.len())
    }

    /// Declared wells, falling back to Gaussian centres.
    pub fn well_positions(&self) -> Vec<Vec<f64>> {
        if !self.wells.is_empty() {
            return self.wells.clone();
        }
        match &self.potential {
            PotentialSpec::Gaussian { centers, .. } => centers.clone(),
            _ => vec![],
        }
    }

    /// Supercell size in unit cells along each axis (second entry 1 in 1D).
    pub fn supercell_cells(&self) -> Result<[usize; 2], LatticeError> {
        if let Some(s) = &self.supercell {
            if s.len() != self.dimension || s.iter().any(|&c| c == 0) {
                return Err(LatticeError::Config(format!(
                    "supercell needs {} positive entries",
                    self.dimension
                )));
            }
            return Ok([s[0], if self.dimension == 2 { s[1] } else { 1 }]);
        }
        match self.flux_reduced()? {
            Some(f) if f.p != 0 => {
                let q = f.q as usize;
                Ok(match self.gauge {
                    LandauGauge::LandauX => [q, 1],
                    LandauGauge::LandauY => [1, q],
                })
            }
            _ => Ok([1, 1]),
        }
    }

    /// Validates every structural requirement before any computation.
    pub fn validate(&self) -> Result<(), LatticeError> {
        let cfg = |m: String| Err(LatticeError::Config(m));
        if self.dimension != 1 && self.dimension != 2 {
            return cfg(format!("dimension must be 1 or 2, got {}", self.dimension));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return cfg(format!("coupling μ must be positive, got {}", self.mu));
        }
        match self.discretization {
            Discretization::FiniteDifference if self.points_per_cell < 16 => {
                return Err(LatticeError::GridTooCoarse(self.points_per_cell));
            }
            Discretization::TightBinding if self.points_per_cell != 1 => {
                return cfg("tight binding uses exactly one site per unit cell".into());
            }
            _ => {}
        }
        if self.k_points == 0 {
            return cfg("k_points must be positive".into());
        }
        if let Some(f) = self.flux {
            if self.dimension != 2 {
                return cfg("a magnetic flux needs dimension 2".into());
            }
            let f = f.reduced()?;
            let cells = self.supercell_cells()?;
            if f.p != 0 && (cells[0] * cells[1]) as i64 % f.q != 0 {
                return Err(LatticeError::IncommensurateFlux {
                    p: f.p,
                    q: f.q,
                    cells,
                });
            }
        }
        self.supercell_cells()?;
        self.fiber_endo()?;
        self.validate_potential()?;
        if let Some(b) = self.bands {
            if b == 0 {
                return cfg("bands must be positive".into());
            }
        }
        Ok(())
    }

    fn validate_potential(&self) -> Result<(), LatticeError> {
        let d = self.dimension;
        match &self.potential {
            PotentialSpec::Trig { terms, .. } => {
                if terms.iter().any(|t| t.frequency.len() != d) {
                    return Err(LatticeError::Config(format!(
                        "every frequency vector needs {d} entries"
                    )));
                }
            }
            PotentialSpec::Gaussian {
                depth,
                width,
                centers,
            } => {
                if !(*depth > 0.0)
                    || !(*width > 0.0)
                    || centers.is_empty()
                    || centers.iter().any(|c| c.len() != d)
                {
                    return Err(LatticeError::Config(
                        "Gaussian wells need positive depth and width and centres of the right dimension".into(),
                    ));
                }
            }
            PotentialSpec::Zero => {}
        }
        let m = self.points_per_cell;
        let scale = 1.0 + self.potential_max();
        let n2 = if d == 2 { m } else { 1 };
        for i in 0..m {
            for j in 0..n2 {
                let x: Vec<f64> = [i, j][..d].iter().map(|&t| t as f64 / m as f64).collect();
                let v = self.potential.eval(&x);
                if v < -1e-12 * scale {
                    return Err(LatticeError::NegativePotential { value: v, at: x });
                }
            }
        }
        for w in &self.well_positions() {
            if w.len() != d {
                return Err(LatticeError::Config(format!(
                    "well {w:?} needs {d} coordinates"
                )));
            }
            let v = self.potential.eval(w);
            let g = self
                .potential
                .gradient(w)
                .iter()
                .fold(0.0f64, |a, b| a.max(b.abs()));
            if v.abs() > 1e-10 * scale || g > 1e-6 * scale {
                return Err(LatticeError::BadWell {
                    at: w.clone(),
                    value: v,
                    gradient: g,
                });
            }
            if self.discretization == Discretization::FiniteDifference
                && w.iter()
                    .any(|x| (x * m as f64 - (x * m as f64).round()).abs() > 1e-9)
            {
                return Err(LatticeError::Config(format!(
                    "well {w:?} is not a grid point"
                )));
            }
            let h = self.potential.hessian(w);
            let min_eig = h
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if !(min_eig > 0.0) {
                return Err(LatticeError::BadWell {
                    at: w.clone(),
                    value: v,
                    gradient: g,
                });
            }
        }
        Ok(())
    }

    fn potential_max(&self) -> f64 {
        match &self.potential {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Trig { constant, terms } => {
                constant.abs() + terms.iter().map(|t| t.amplitude.abs()).sum::<f64>()
            }
            PotentialSpec::Gaussian { depth, .. } => depth.abs(),
        }
    }

    /// Model-operator wells: `G = I`, `W = ½∇²V`, `B̄ = B`.
    pub fn model_wells(&self) -> Result<Vec<WellSpec>, LatticeError> {
        let b = self.fiber_endo()?;
        self.well_positions()
            .iter()
            .map(|w| {
                let d = w.len();
                WellSpec::new(
                    DMatrix::identity(d, d),
                    self.potential.hessian(w) * 0.5,
                    b.clone(),
                )
                .map_err(LatticeError::from)
            })
            .collect()
    }
}
