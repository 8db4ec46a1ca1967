use serde::{Deserialize, Serialize};

use super::cutoff::CutoffProfile;
use super::params::{certify_gap, CertificateParams, GapInterval};
use super::CertificateError;

/// How the distortion parameters `ρ, β, ε` are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimatorMode {
    /// Operators agree exactly near the wells: `ρ = β = 1`, `ε = 0`.
    Flat,
    /// `ρ = 1 + C_ρ μ^κ`, `β = 1 + C_β μ^κ`, `ε = C_ε μ^{3κ−1}`.
    General { c_rho: f64, c_beta: f64, c_eps: f64 },
}

impl EstimatorMode {
    pub fn general_default() -> Self {
        Self::General {
            c_rho: 1.0,
            c_beta: 1.0,
            c_eps: 1.0,
        }
    }
}

/// Geometric input of the parameter estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateProblem {
    /// Upper bounds of the principal symbol on unit covectors, `sup g^{ik}ξᵢξ_k / |ξ|²`,
    /// for the model operator and for the true operator.
    pub metric_bound: [f64; 2],
    /// Morse constant `c₀` with `V ≥ c₀|x − x̄|²` near every well.
    pub morse_constant: f64,
    /// Lower bounds of both spectra; `λ₀ₗ = min(bound, 0)`.
    pub spectral_bottom: [f64; 2],
    pub mode: EstimatorMode,
}

/// `s(κ) = min(3κ − 1, 1 − 2κ)`, the exponent in `a₂ = a₁ + O(μ^s)`.
pub fn convergence_rate(kappa: f64) -> f64 {
    (3.0 * kappa - 1.0).min(1.0 - 2.0 * kappa)
}

/// Maximiser of [`convergence_rate`] and its value, where the two branches meet.
pub fn optimal_kappa() -> (f64, f64) {
    let kappa = 2.0 / 5.0;
    (kappa, convergence_rate(kappa))
}

/// Parameters of the equivalence theorem for coupling `μ` and cutoff radius `μ^κ`.
///
/// `γₗ` is the norm of the IMS double commutator `[J,[J,−μΔ_g]] = −2μ|dJ|²_g`
/// for the rescaled cutoff, bounded by `2μ^{1−2κ}·gₗ·sup max(|φ_r|², |φ'_r|²)`.
pub fn estimate_parameters(
    mu: f64,
    kappa: f64,
    cutoff: &CutoffProfile,
    problem: &CertificateProblem,
) -> Result<CertificateParams, CertificateError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(CertificateError::Invalid(format!(
            "coupling must be positive, got {mu}"
        )));
    }
    let range_ok = match problem.mode {
        EstimatorMode::Flat => kappa > 0.0 && kappa < 0.5,
        EstimatorMode::General { .. } => kappa > 1.0 / 3.0 && kappa < 0.5,
    };
    if !range_ok {
        return Err(CertificateError::KappaOutOfRange {
            kappa,
            flat: problem.mode == EstimatorMode::Flat,
        });
    }
    if !(problem.morse_constant > 0.0) || problem.metric_bound.iter().any(|g| !(*g > 0.0)) {
        return Err(CertificateError::Invalid(
            "Morse constant and metric bounds must be positive".into(),
        ));
    }
    let grad = cutoff.sup_gradient_sq();
    let scale = mu.powf(1.0 - 2.0 * kappa);
    let gamma = |g: f64| 2.0 * scale * g * grad;
    let alpha = problem.morse_constant * mu.powf(2.0 * kappa - 1.0);
    let (rho, beta, eps) = match problem.mode {
        EstimatorMode::Flat => (1.0, 1.0, 0.0),
        EstimatorMode::General {
            c_rho,
            c_beta,
            c_eps,
        } => (
            1.0 + c_rho * mu.powf(kappa),
            1.0 + c_beta * mu.powf(kappa),
            c_eps * mu.powf(3.0 * kappa - 1.0),
        ),
    };
    let p = CertificateParams {
        lambda01: problem.spectral_bottom[0].min(0.0),
        lambda02: problem.spectral_bottom[1].min(0.0),
        alpha1: alpha,
        alpha2: alpha,
        beta1: beta,
        beta2: beta,
        gamma1: gamma(problem.metric_bound[0]),
        gamma2: gamma(problem.metric_bound[1]),
        eps1: eps,
        eps2: eps,
        rho,
    };
    p.validate()?;
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub params: CertificateParams,
    pub a2: Option<f64>,
    pub b2: Option<f64>,
    pub certified: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateSweep {
    pub kappa: f64,
    pub model_gap: GapInterval,
    pub rows: Vec<SweepRow>,
    /// First coupling in sweep order whose certificate was issued.
    pub first_certified_mu: Option<f64>,
}

/// Runs the estimator and the certificate for every `μ`, in the given order.
pub fn certificate_sweep(
    problem: &CertificateProblem,
    kappa: f64,
    cutoff: &CutoffProfile,
    model_gap: GapInterval,
    mus: &[f64],
) -> Result<CertificateSweep, CertificateError> {
    let mut rows = Vec::with_capacity(mus.len());
    for &mu in mus {
        let params = estimate_parameters(mu, kappa, cutoff, problem)?;
        let row = match certify_gap(&params, &model_gap) {
            Ok(g) => SweepRow {
                mu,
                params,
                a2: Some(g.a),
                b2: Some(g.b),
                certified: true,
                reason: None,
            },
            Err(r) => SweepRow {
                mu,
                params,
                a2: r.a2,
                b2: r.b2,
                certified: false,
                reason: Some(r.reason.to_string()),
            },
        };
        rows.push(row);
    }
    let first_certified_mu = rows.iter().find(|r| r.certified).map(|r| r.mu);
    Ok(CertificateSweep {
        kappa,
        model_gap,
        rows,
        first_certified_mu,
    })
}

/// `count` logarithmically spaced values from `from` to `to`, both included.
pub fn log_spaced(from: f64, to: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![from];
    }
    let (la, lb) = (from.ln(), to.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                from
            } else if i + 1 == count {
                to
            } else {
                (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
