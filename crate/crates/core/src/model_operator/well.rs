use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::ModelError;

/// Quadratic data of the model oscillator at one Morse well:
/// `K = −Σ g^{ik} ∂ᵢ∂_k + xᵀWx + B̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct WellSpec {
    /// Inverse metric `G = (g^{ik})` at the well, symmetric positive definite.
    pub metric: DMatrix<f64>,
    /// Half Hessian `W = ½ ∇²V` at the well, symmetric positive definite.
    pub hessian_half: DMatrix<f64>,
    /// Frozen fiber endomorphism `B̄`, Hermitian.
    pub fiber_endo: DMatrix<Complex64>,
}

impl WellSpec {
    pub fn new(
        metric: DMatrix<f64>,
        hessian_half: DMatrix<f64>,
        fiber_endo: DMatrix<Complex64>,
    ) -> Result<Self, ModelError> {
        let n = metric.nrows();
        if metric.ncols() != n || hessian_half.nrows() != n || hessian_half.ncols() != n {
            return Err(ModelError::Shape(format!(
                "metric and Hessian must both be {n}×{n}"
            )));
        }
        if fiber_endo.nrows() != fiber_endo.ncols() || fiber_endo.nrows() == 0 {
            return Err(ModelError::Shape(
                "fiber endomorphism must be square and nonempty".into(),
            ));
        }
        let herm = (&fiber_endo - fiber_endo.adjoint())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > 1e-12 {
            return Err(ModelError::NotHermitian(herm));
        }
        let w = Self {
            metric,
            hessian_half,
            fiber_endo,
        };
        check_spd("metric", &w.metric)?;
        check_spd("Hessian", &w.hessian_half)?;
        Ok(w)
    }

    /// Scalar well with `G = I` and `B̄ = 0` on a one-dimensional fiber.
    pub fn isotropic(hessian_half: DMatrix<f64>) -> Result<Self, ModelError> {
        let n = hessian_half.nrows();
        Self::new(DMatrix::identity(n, n), hessian_half, DMatrix::zeros(1, 1))
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_endo.nrows()
    }

    /// Eigenvalues of `B̄`, ascending.
    pub fn fiber_levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .fiber_endo
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Warns (returns `false`) when `det G` is far from one, i.e. the
    /// coordinates are not volume-normalised at the well.
    pub fn volume_normalised(&self) -> bool {
        (self.metric.determinant() - 1.0).abs() < 1e-8
    }
}

pub(crate) fn check_spd(name: &str, m: &DMatrix<f64>) -> Result<(), ModelError> {
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * m.amax().max(1.0) {
        return Err(ModelError::NotSpd(format!(
            "{name} is not symmetric (defect {asym:.3e})"
        )));
    }
    let ev = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(ModelError::NotSpd(format!(
            "{name} has smallest eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// Cholesky factor `S` with `G = S Sᵀ`; the map `x = S y` turns the kinetic
/// term into the flat Laplacian in `y`.
pub(crate) fn metric_factor(g: &DMatrix<f64>) -> Result<DMatrix<f64>, ModelError> {
    g.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| ModelError::NotSpd("metric is not positive definite".into()))
}

/// Oscillator frequencies `ωᵢ = √eig(G W)`, ascending.
pub fn well_frequencies(w: &WellSpec) -> Result<Vec<f64>, ModelError> {
    check_spd("metric", &w.metric)?;
    check_spd("Hessian", &w.hessian_half)?;
    let s = metric_factor(&w.metric)?;
    let m = s.transpose() * &w.hessian_half * &s;
    let m = (&m + m.transpose()) * 0.5;
    let mut om: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|l| l.sqrt())
        .collect();
    om.sort_by(f64::total_cmp);
    Ok(om)
}
