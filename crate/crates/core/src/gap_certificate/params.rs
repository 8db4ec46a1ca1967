use std::fmt;

use serde::{Deserialize, Serialize};

use super::CertificateError;

/// Nonempty open energy interval `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapInterval {
    pub a: f64,
    pub b: f64,
}

impl GapInterval {
    pub fn new(a: f64, b: f64) -> Result<Self, CertificateError> {
        if !(a < b) {
            return Err(CertificateError::Invalid(format!(
                "interval ({a}, {b}) is empty"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    /// `self ⊆ other` as open intervals.
    pub fn is_within(&self, other: &GapInterval) -> bool {
        other.a <= self.a && self.b <= other.b
    }
}

/// The eleven scalars of the equivalence theorem's hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub lambda01: f64,
    pub lambda02: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub rho: f64,
}

impl CertificateParams {
    /// Checks the sign and range constraints of every parameter.
    pub fn validate(&self) -> Result<(), CertificateError> {
        let all = [
            self.lambda01,
            self.lambda02,
            self.alpha1,
            self.alpha2,
            self.beta1,
            self.beta2,
            self.gamma1,
            self.gamma2,
            self.eps1,
            self.eps2,
            self.rho,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(CertificateError::Invalid(
                "all parameters must be finite".into(),
            ));
        }
        let checks = [
            (self.lambda01 <= 0.0, "λ01 ≤ 0"),
            (self.lambda02 <= 0.0, "λ02 ≤ 0"),
            (self.alpha1 > 0.0, "α1 > 0"),
            (self.alpha2 > 0.0, "α2 > 0"),
            (self.beta1 >= 1.0, "β1 ≥ 1"),
            (self.beta2 >= 1.0, "β2 ≥ 1"),
            (self.gamma1 >= 0.0, "γ1 ≥ 0"),
            (self.gamma2 >= 0.0, "γ2 ≥ 0"),
            (self.eps1 >= 0.0, "ε1 ≥ 0"),
            (self.eps2 >= 0.0, "ε2 ≥ 0"),
            (self.rho >= 1.0, "ρ ≥ 1"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(CertificateError::Invalid(format!(
                    "parameter constraint {what} violated"
                )));
            }
        }
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.rho == 1.0
            && self.beta1 == 1.0
            && self.beta2 == 1.0
            && self.eps1 == 0.0
            && self.eps2 == 0.0
    }
}

/// Which hypothesis of the theorem failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefusalReason {
    InvalidParameters,
    EmptyModelGap,
    Alpha1TooSmall,
    UpperEdgeBelowEps,
    DenominatorNonPositive,
    Alpha2TooSmall,
    EmptyInterval,
}

impl fmt::Display for RefusalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InvalidParameters => "parameter constraints violated",
            Self::EmptyModelGap => "a1 ≥ b1",
            Self::Alpha1TooSmall => "α1 ≤ a1+γ1",
            Self::UpperEdgeBelowEps => "b1/ρ ≤ ε2",
            Self::DenominatorNonPositive => "α2 − 2λ02 + (b1/ρ − ε2)/β2 ≤ 0",
            Self::Alpha2TooSmall => "α2 ≤ b2+γ2",
            Self::EmptyInterval => "b2 ≤ a2",
        })
    }
}

/// A certificate that could not be issued, with whatever edges were computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refusal {
    pub reason: RefusalReason,
    pub a2: Option<f64>,
    pub b2: Option<f64>,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certificate refused: {}", self.reason)
    }
}

fn refuse(reason: RefusalReason) -> CertificateError {
    CertificateError::Refused(Refusal {
        reason,
        a2: None,
        b2: None,
    })
}

/// `a₂ = ρ[β₁(a₁+γ₁ + (a₁+γ₁−λ₀₁)²/(α₁−a₁−γ₁)) + ε₁]`.
pub fn a2_of(p: &CertificateParams, a1: f64) -> Result<f64, CertificateError> {
    p.validate()?;
    let s = a1 + p.gamma1;
    if !(p.alpha1 > s) {
        return Err(refuse(RefusalReason::Alpha1TooSmall));
    }
    Ok(p.rho * (p.beta1 * (s + (s - p.lambda01).powi(2) / (p.alpha1 - s)) + p.eps1))
}

/// `b₂ = (t(α₂−γ₂) − α₂γ₂ + 2λ₀₂γ₂ − λ₀₂²)/(α₂ − 2λ₀₂ + t)` with `t = β₂⁻¹(b₁/ρ − ε₂)`.
pub fn b2_of(p: &CertificateParams, b1: f64) -> Result<f64, CertificateError> {
    p.validate()?;
    let t0 = b1 / p.rho - p.eps2;
    if !(t0 > 0.0) {
        return Err(refuse(RefusalReason::UpperEdgeBelowEps));
    }
    let t = t0 / p.beta2;
    let den = p.alpha2 - 2.0 * p.lambda02 + t;
    if !(den > 0.0) {
        return Err(refuse(RefusalReason::DenominatorNonPositive));
    }
    let (a, g, l) = (p.alpha2, p.gamma2, p.lambda02);
    Ok((t * (a - g) - a * g + 2.0 * l * g - l * l) / den)
}

/// Inverse of [`b2_of`]: `b₁ = ρ[β₂(b₂+γ₂ + (b₂+γ₂−λ₀₂)²/(α₂−b₂−γ₂)) + ε₂]`.
pub fn b1_from_b2(p: &CertificateParams, b2: f64) -> Result<f64, CertificateError> {
    p.validate()?;
    let s = b2 + p.gamma2;
    if !(p.alpha2 > s) {
        return Err(refuse(RefusalReason::Alpha2TooSmall));
    }
    Ok(p.rho * (p.beta2 * (s + (s - p.lambda02).powi(2) / (p.alpha2 - s)) + p.eps2))
}

/// Returns the certified gap `(a₂, b₂)` of the second operator when every
/// hypothesis holds, and the failed hypothesis otherwise.
pub fn certify_gap(p: &CertificateParams, g1: &GapInterval) -> Result<GapInterval, Refusal> {
    let fail = |reason, a2, b2| Refusal { reason, a2, b2 };
    if !(g1.a < g1.b) {
        return Err(fail(RefusalReason::EmptyModelGap, None, None));
    }
    let unwrap = |r: Result<f64, CertificateError>, a2: Option<f64>| match r {
        Ok(v) => Ok(v),
        Err(CertificateError::Refused(mut rf)) => {
            rf.a2 = a2;
            Err(rf)
        }
        Err(_) => Err(fail(RefusalReason::InvalidParameters, a2, None)),
    };
    if p.validate().is_err() {
        return Err(fail(RefusalReason::InvalidParameters, None, None));
    }
    let a2 = unwrap(a2_of(p, g1.a), None)?;
    let b2 = unwrap(b2_of(p, g1.b), Some(a2))?;
    if !(p.alpha2 > b2 + p.gamma2) {
        return Err(fail(RefusalReason::Alpha2TooSmall, Some(a2), Some(b2)));
    }
    if !(b2 > a2) {
        return Err(fail(RefusalReason::EmptyInterval, Some(a2), Some(b2)));
    }
    Ok(GapInterval { a: a2, b: b2 })
}
