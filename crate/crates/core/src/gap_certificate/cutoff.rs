use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn bump_derivative(t: f64) -> f64 {
    if t > 0.0 {
        bump(t) / (t * t)
    } else {
        0.0
    }
}

/// `s(t) = f(t)/(f(t)+f(1−t))` with `f(t) = e^{−1/t}`, a smooth step from 0 to 1 on `[0,1]`.
pub fn smoothstep(t: f64) -> f64 {
    let (a, b) = (bump(t), bump(1.0 - t));
    if a + b == 0.0 {
        return if t >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

pub fn smoothstep_derivative(t: f64) -> f64 {
    let (a, b) = (bump(t), bump(1.0 - t));
    if a + b == 0.0 {
        return 0.0;
    }
    (bump_derivative(t) * b + a * bump_derivative(1.0 - t)) / ((a + b) * (a + b))
}

/// Quadratic partition of unity `φ² + φ'² = 1` in the radial variable:
/// `φ = cos θ(r)`, `φ' = sin θ(r)` with `θ(r) = (π/2) s(r − 1)`, so `φ = 1` for
/// `r ≤ 1` and `φ = 0` for `r ≥ 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    /// Number of sample points on `[1, 2]` used for suprema.
    pub samples: usize,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self { samples: 10_000 }
    }
}

impl CutoffProfile {
    pub fn theta(&self, r: f64) -> f64 {
        FRAC_PI_2 * smoothstep(r - 1.0)
    }

    pub fn theta_derivative(&self, r: f64) -> f64 {
        FRAC_PI_2 * smoothstep_derivative(r - 1.0)
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.theta(r).cos()
    }

    /// The complementary profile `φ' = (1 − φ²)^{1/2}`.
    pub fn phi_complement(&self, r: f64) -> f64 {
        self.theta(r).sin()
    }

    pub fn phi_derivative(&self, r: f64) -> f64 {
        -self.theta(r).sin() * self.theta_derivative(r)
    }

    pub fn phi_complement_derivative(&self, r: f64) -> f64 {
        self.theta(r).cos() * self.theta_derivative(r)
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.samples.max(2);
        (0..n).map(move |i| 1.0 + i as f64 / (n - 1) as f64)
    }

    /// Sampled `sup_r max(|φ_r|², |φ'_r|²)`.
    pub fn sup_gradient_sq(&self) -> f64 {
        self.grid()
            .map(|r| {
                self.phi_derivative(r)
                    .powi(2)
                    .max(self.phi_complement_derivative(r).powi(2))
            })
            .fold(0.0, f64::max)
    }

    /// Sampled `sup_r |φ_r|` and `sup_r |φ'_r|`.
    pub fn sup_derivatives(&self) -> (f64, f64) {
        self.grid().fold((0.0f64, 0.0f64), |(a, b), r| {
            (
                a.max(self.phi_derivative(r).abs()),
                b.max(self.phi_complement_derivative(r).abs()),
            )
        })
    }

    /// Cutoff rescaled to radius `μ^κ` around a well: `φ(|x|/μ^κ)`.
    pub fn scaled(&self, x: f64, mu: f64, kappa: f64) -> f64 {
        self.phi(x.abs() / mu.powf(kappa))
    }
}
