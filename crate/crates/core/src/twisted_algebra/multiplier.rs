use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Anything that assigns a unimodular phase to a pair of lattice points.
///
/// Implemented by [`Multiplier`] and by [`PhaseFn`], which wraps an arbitrary
/// closure so that corrupted or experimental phases can be validated too.
pub trait PhaseFunction {
    fn rank(&self) -> usize;
    fn phase(&self, a: &[i64], b: &[i64]) -> Complex64;
}

/// Closure-backed phase function.
pub struct PhaseFn<F> {
    pub rank: usize,
    pub f: F,
}

impl<F> PhaseFunction for PhaseFn<F>
where
    F: Fn(&[i64], &[i64]) -> Complex64,
{
    fn rank(&self) -> usize {
        self.rank
    }

    fn phase(&self, a: &[i64], b: &[i64]) -> Complex64 {
        (self.f)(a, b)
    }
}

/// Bilinear multiplier `σ(m, n) = exp(iπ mᵀΘn)` on `ℤ^d` with rational `Θ`.
///
/// `Θ` is stored exactly as an integer matrix over a common positive
/// denominator, so the exponent of every phase is an exact rational number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    rank: usize,
    numerators: Vec<i64>,
    denominator: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Landau gauge used to realise a uniform field on `ℤ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LandauGauge {
    /// Vector potential along the second axis, growing with the first coordinate.
    LandauX,
    /// Vector potential along the first axis, growing with the second coordinate.
    LandauY,
}

impl Multiplier {
    pub fn trivial(rank: usize) -> Self {
        Self {
            rank,
            numerators: vec![0; rank * rank],
            denominator: 1,
        }
    }

    /// Builds `Θ = numerators / denominator` (row-major, `rank × rank`).
    pub fn new(rank: usize, numerators: Vec<i64>, denominator: i64) -> Result<Self, AlgebraError> {
        if numerators.len() != rank * rank {
            return Err(AlgebraError::Shape(format!(
                "multiplier needs {} numerators, got {}",
                rank * rank,
                numerators.len()
            )));
        }
        if denominator == 0 {
            return Err(AlgebraError::Shape("multiplier denominator is zero".into()));
        }
        let sign = denominator.signum();
        let mut g = denominator.abs();
        for &n in &numerators {
            g = gcd(g, n);
        }
        let g = g.max(1);
        Ok(Self {
            rank,
            numerators: numerators.iter().map(|n| sign * n / g).collect(),
            denominator: denominator.abs() / g,
        })
    }

    /// Builds `Θ` from `(numerator, denominator)` pairs, row-major.
    pub fn from_rationals(rank: usize, entries: &[(i64, i64)]) -> Result<Self, AlgebraError> {
        if entries.len() != rank * rank {
            return Err(AlgebraError::Shape(format!(
                "multiplier needs {} entries, got {}",
                rank * rank,
                entries.len()
            )));
        }
        let mut den = 1i64;
        for &(_, d) in entries {
            if d == 0 {
                return Err(AlgebraError::Shape(
                    "zero denominator in multiplier entry".into(),
                ));
            }
            den = den / gcd(den, d) * d.abs();
        }
        let nums = entries
            .iter()
            .map(|&(n, d)| n * d.signum() * (den / d.abs()))
            .collect();
        Self::new(rank, nums, den)
    }

    /// Multiplier of the magnetic translations of a uniform field with `p/q`
    /// flux quanta per unit cell, in the given gauge.
    ///
    /// Both gauges produce `T₁T₂T₁⁻¹T₂⁻¹ = exp(2πi p/q)`.
    pub fn magnetic(p: i64, q: i64, gauge: LandauGauge) -> Result<Self, AlgebraError> {
        match gauge {
            LandauGauge::LandauX => Self::new(2, vec![0, 2 * p, 0, 0], q),
            LandauGauge::LandauY => Self::new(2, vec![0, 0, -2 * p, 0], q),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn is_trivial(&self) -> bool {
        self.numerators.iter().all(|&n| n == 0)
    }

    /// Numerator of `aᵀΘb` over [`Multiplier::denominator`].
    pub fn exponent(&self, a: &[i64], b: &[i64]) -> i128 {
        let d = self.rank;
        let mut acc = 0i128;
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                let n = self.numerators[i * d + j];
                if n != 0 {
                    acc += a[i] as i128 * n as i128 * b[j] as i128;
                }
            }
        }
        acc
    }

    /// `exp(iπ · num / den)` with the exponent reduced modulo 2 first, and
    /// quarter turns returned exactly.
    pub fn phase_of_exponent(&self, num: i128) -> Complex64 {
        let den = self.denominator as i128;
        let r = num.rem_euclid(2 * den);
        if (2 * r) % den == 0 {
            return match (2 * r) / den {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        let angle = std::f64::consts::PI * (r as f64) / (den as f64);
        Complex64::new(angle.cos(), angle.sin())
    }

    pub fn phase(&self, a: &[i64], b: &[i64]) -> Complex64 {
        self.phase_of_exponent(self.exponent(a, b))
    }

    pub fn conj_phase(&self, a: &[i64], b: &[i64]) -> Complex64 {
        self.phase_of_exponent(-self.exponent(a, b))
    }
}

impl PhaseFunction for Multiplier {
    fn rank(&self) -> usize {
        self.rank
    }

    fn phase(&self, a: &[i64], b: &[i64]) -> Complex64 {
        Multiplier::phase(self, a, b)
    }
}

/// Outcome of [`validate_multiplier`].
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierReport {
    pub pass: bool,
    pub samples: usize,
    pub max_unimodularity_defect: f64,
    pub max_normalization_defect: f64,
    pub max_cocycle_defect: f64,
}

/// Checks `|σ| = 1`, `σ(γ,e) = σ(e,γ) = 1` and the 2-cocycle identity
/// `σ(a,b)σ(a+b,c) = σ(a,b+c)σ(b,c)` on the given sample triples.
pub fn validate_multiplier<P: PhaseFunction>(
    sigma: &P,
    samples: &[[Vec<i64>; 3]],
    tol: f64,
) -> MultiplierReport {
    let zero = vec![0i64; sigma.rank()];
    let mut uni = 0.0f64;
    let mut norm = 0.0f64;
    let mut coc = 0.0f64;
    for [a, b, c] in samples {
        let ab = add(a, b);
        let bc = add(b, c);
        let s_ab = sigma.phase(a, b);
        uni = uni.max((s_ab.norm() - 1.0).abs());
        norm = norm
            .max((sigma.phase(a, &zero) - 1.0).norm())
            .max((sigma.phase(&zero, a) - 1.0).norm());
        let lhs = s_ab * sigma.phase(&ab, c);
        let rhs = sigma.phase(a, &bc) * sigma.phase(b, c);
        coc = coc.max((lhs - rhs).norm());
    }
    MultiplierReport {
        pass: uni <= tol && norm <= tol && coc <= tol,
        samples: samples.len(),
        max_unimodularity_defect: uni,
        max_normalization_defect: norm,
        max_cocycle_defect: coc,
    }
}

pub(crate) fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}
