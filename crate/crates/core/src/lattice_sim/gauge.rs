use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::LatticeConfig;
use super::LatticeError;
use crate::twisted_algebra::{LandauGauge, Multiplier};

/// Uniform magnetic field of flux `θ` per unit cell in a Landau gauge.
///
/// With field strength `b = −2πθ` the potential is `A = (0, b·x)` in the
/// first gauge and `A = (−b·y, 0)` in the second. Translations by lattice
/// vectors change `A` by an exact differential, `γ*A − A = dψ_γ`, where
/// `ψ_γ(r) = b·γ₁·y` or `ψ_γ(r) = −b·γ₂·x` respectively.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeData {
    pub dimension: usize,
    /// Reduced flux `(p, q)`, or `(0, 1)` without a field.
    pub flux: (i64, i64),
    pub gauge: LandauGauge,
    /// Base point `x₀` of the multiplier formula.
    pub base_point: [f64; 2],
}

impl GaugeData {
    pub fn from_config(c: &LatticeConfig) -> Result<Self, LatticeError> {
        let flux = c.flux_reduced()?.map_or((0, 1), |f| (f.p, f.q));
        Ok(Self {
            dimension: c.dimension,
            flux,
            gauge: c.gauge,
            base_point: [0.0, 0.0],
        })
    }

    pub fn theta(&self) -> f64 {
        self.flux.0 as f64 / self.flux.1 as f64
    }

    /// Field strength `b = dA`.
    pub fn field(&self) -> f64 {
        -2.0 * PI * self.theta()
    }

    pub fn vector_potential(&self, r: [f64; 2]) -> [f64; 2] {
        let b = self.field();
        match self.gauge {
            LandauGauge::LandauX => [0.0, b * r[0]],
            LandauGauge::LandauY => [-b * r[1], 0.0],
        }
    }

    /// `∫ A·dl` along the straight segment `r → s`; exact because `A` is linear.
    pub fn link_phase(&self, r: [f64; 2], s: [f64; 2]) -> f64 {
        let a = self.vector_potential([(r[0] + s[0]) / 2.0, (r[1] + s[1]) / 2.0]);
        a[0] * (s[0] - r[0]) + a[1] * (s[1] - r[1])
    }

    /// Gauge primitive `ψ_γ(r)` with `ψ_γ(0) = 0`, for any real translation `γ`.
    pub fn psi(&self, gamma: [f64; 2], r: [f64; 2]) -> f64 {
        let b = self.field();
        match self.gauge {
            LandauGauge::LandauX => b * gamma[0] * r[1],
            LandauGauge::LandauY => -b * gamma[1] * r[0],
        }
    }

    /// `σ(γ, γ') = exp(−iψ_γ(γ'·x₀))`, with `γ'·x₀ = x₀ + γ'`.
    pub fn sigma(&self, g: [i64; 2], h: [i64; 2]) -> Complex64 {
        let x = [
            self.base_point[0] + h[0] as f64,
            self.base_point[1] + h[1] as f64,
        ];
        let x0 = self.base_point;
        let gf = [g[0] as f64, g[1] as f64];
        Complex64::from_polar(1.0, -(self.psi(gf, x) - self.psi(gf, x0)))
    }

    /// The same multiplier as an exact element of the twisted-algebra layer.
    pub fn multiplier(&self) -> Result<Multiplier, LatticeError> {
        if self.dimension == 1 {
            return Ok(Multiplier::trivial(1));
        }
        Multiplier::magnetic(self.flux.0, self.flux.1, self.gauge)
            .map_err(|e| LatticeError::Config(e.to_string()))
    }

    /// Largest deviation of the plaquette circulation of `A` from `b·h²` over
    /// one period of the `nx × ny` grid with spacing `h`.
    pub fn curl_defect(&self, nx: usize, ny: usize, h: f64) -> f64 {
        let want = self.field() * h * h;
        let mut worst = 0.0f64;
        for i in 0..nx {
            for j in 0..ny {
                let p = |a: usize, b: usize| [a as f64 * h, b as f64 * h];
                let (r00, r10, r11, r01) = (p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
                let circ = self.link_phase(r00, r10)
                    + self.link_phase(r10, r11)
                    + self.link_phase(r11, r01)
                    + self.link_phase(r01, r00);
                worst = worst.max((circ - want).abs());
            }
        }
        worst
    }
}
