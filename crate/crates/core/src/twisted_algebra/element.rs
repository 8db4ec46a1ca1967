use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multiplier::{add, neg, Multiplier};
use super::{word_length, AlgebraError};

/// Blocks whose Frobenius norm falls below this are dropped from the support.
pub const PRUNE_TOL: f64 = 1e-15;

/// Finitely supported element of the twisted algebra `ℂ(ℤ^d, σ̄) ⊗ M_N(ℂ)`,
/// stored as a map from lattice points to `N × N` blocks.
///
/// Products use the conjugate multiplier: `δ_a * δ_b = σ̄(a, b) δ_{a+b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    multiplier: Multiplier,
    fiber_dim: usize,
    blocks: BTreeMap<Vec<i64>, DMatrix<Complex64>>,
}

fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl AlgebraElement {
    pub fn zero(multiplier: Multiplier, fiber_dim: usize) -> Self {
        Self {
            multiplier,
            fiber_dim,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(multiplier: Multiplier, fiber_dim: usize) -> Self {
        let e = vec![0; multiplier.rank()];
        Self::delta(multiplier, &e, DMatrix::identity(fiber_dim, fiber_dim))
    }

    /// `δ_γ ⊗ block`.
    pub fn delta(multiplier: Multiplier, gamma: &[i64], block: DMatrix<Complex64>) -> Self {
        let mut out = Self::zero(multiplier, block.nrows());
        out.insert(gamma.to_vec(), block);
        out
    }

    pub fn scalar_delta(multiplier: Multiplier, gamma: &[i64], value: Complex64) -> Self {
        Self::delta(multiplier, gamma, DMatrix::from_element(1, 1, value))
    }

    pub fn from_blocks(
        multiplier: Multiplier,
        fiber_dim: usize,
        blocks: impl IntoIterator<Item = (Vec<i64>, DMatrix<Complex64>)>,
    ) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(multiplier, fiber_dim);
        for (g, b) in blocks {
            if g.len() != out.multiplier.rank() {
                return Err(AlgebraError::RankMismatch {
                    expected: out.multiplier.rank(),
                    found: g.len(),
                });
            }
            if b.nrows() != fiber_dim || b.ncols() != fiber_dim {
                return Err(AlgebraError::FiberMismatch {
                    expected: fiber_dim,
                    found: b.nrows().max(b.ncols()),
                });
            }
            out.accumulate(g, &b);
        }
        Ok(out)
    }

    fn insert(&mut self, g: Vec<i64>, b: DMatrix<Complex64>) {
        if frob(&b) >= PRUNE_TOL {
            self.blocks.insert(g, b);
        } else {
            self.blocks.remove(&g);
        }
    }

    fn accumulate(&mut self, g: Vec<i64>, b: &DMatrix<Complex64>) {
        let entry = self
            .blocks
            .entry(g.clone())
            .or_insert_with(|| DMatrix::zeros(b.nrows(), b.ncols()));
        *entry += b;
        if frob(entry) < PRUNE_TOL {
            self.blocks.remove(&g);
        }
    }

    pub fn multiplier(&self) -> &Multiplier {
        &self.multiplier
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn rank(&self) -> usize {
        self.multiplier.rank()
    }

    pub fn blocks(&self) -> &BTreeMap<Vec<i64>, DMatrix<Complex64>> {
        &self.blocks
    }

    pub fn block(&self, gamma: &[i64]) -> Option<&DMatrix<Complex64>> {
        self.blocks.get(gamma)
    }

    /// Scalar coefficient at `γ` (fiber dimension one).
    pub fn coeff(&self, gamma: &[i64]) -> Complex64 {
        self.blocks
            .get(gamma)
            .map(|b| b[(0, 0)])
            .unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.blocks.keys()
    }

    pub fn support_radius(&self) -> u64 {
        self.blocks
            .keys()
            .map(|g| word_length(g))
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.multiplier != other.multiplier {
            return Err(AlgebraError::MultiplierMismatch);
        }
        if self.fiber_dim != other.fiber_dim {
            return Err(AlgebraError::FiberMismatch {
                expected: self.fiber_dim,
                found: other.fiber_dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (g, b) in &other.blocks {
            out.accumulate(g.clone(), b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self::zero(self.multiplier.clone(), self.fiber_dim);
        for (g, b) in &self.blocks {
            out.insert(g.clone(), b * z);
        }
        out
    }

    /// Twisted convolution `(f * g)(γ) = Σ_{γ₁+γ₂=γ} f(γ₁) g(γ₂) σ̄(γ₁, γ₂)`.
    pub fn convolve(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut acc: BTreeMap<Vec<i64>, DMatrix<Complex64>> = BTreeMap::new();
        for (g1, a) in &self.blocks {
            for (g2, b) in &other.blocks {
                let phase = self.multiplier.conj_phase(g1, g2);
                let prod = a * b * phase;
                acc.entry(add(g1, g2))
                    .and_modify(|m| *m += &prod)
                    .or_insert(prod);
            }
        }
        let mut out = Self::zero(self.multiplier.clone(), self.fiber_dim);
        for (g, b) in acc {
            out.insert(g, b);
        }
        Ok(out)
    }

    /// Involution `(Σ δ_γ ⊗ A_γ)* = Σ σ(γ, −γ) δ_{−γ} ⊗ A_γ^†`.
    pub fn involute(&self) -> Self {
        let mut out = Self::zero(self.multiplier.clone(), self.fiber_dim);
        for (g, b) in &self.blocks {
            let ng = neg(g);
            let phase = self.multiplier.phase(g, &ng);
            out.insert(ng, b.adjoint() * phase);
        }
        out
    }

    /// Canonical trace `Tr_Γ(f) = Tr f(e)`.
    pub fn trace(&self) -> Complex64 {
        let e = vec![0; self.rank()];
        self.blocks.get(&e).map(|b| b.trace()).unwrap_or_default()
    }

    /// Weighted seminorm `ν_k(f) = (Σ_γ (1+ℓ(γ))^{2k} |f(γ)|²)^{1/2}` for
    /// scalar elements, and its Frobenius aggregate `N_k` for matrix blocks.
    pub fn nu_norm(&self, k: f64) -> f64 {
        self.blocks
            .iter()
            .map(|(g, b)| (1.0 + word_length(g) as f64).powf(2.0 * k) * frob(b).powi(2))
            .fold(0.0, |acc, x| acc + x)
            .sqrt()
    }

    /// Bounds on the operator norm in the left-regular representation:
    /// `(max_γ ‖f(γ)‖, Σ_γ ‖f(γ)‖)`.
    pub fn norm_bounds(&self) -> (f64, f64) {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for b in self.blocks.values() {
            let n = spectral_norm(b);
            lo = lo.max(n);
            hi += n;
        }
        (lo, hi)
    }

    /// Serialises to a JSON record that round-trips bit for bit.
    pub fn to_record(&self) -> String {
        let record = ElementRecord {
            format: RECORD_FORMAT.to_string(),
            multiplier: self.multiplier.clone(),
            fiber_dim: self.fiber_dim,
            blocks: self
                .blocks
                .iter()
                .map(|(g, b)| BlockRecord {
                    gamma: g.clone(),
                    entries: (0..self.fiber_dim)
                        .flat_map(|i| (0..self.fiber_dim).map(move |j| (i, j)))
                        .map(|(i, j)| format!("{:?},{:?}", b[(i, j)].re, b[(i, j)].im))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&record).expect("element record serialises")
    }

    pub fn from_record(text: &str) -> Result<Self, AlgebraError> {
        let record: ElementRecord =
            serde_json::from_str(text).map_err(|e| AlgebraError::Parse(e.to_string()))?;
        if record.format != RECORD_FORMAT {
            return Err(AlgebraError::Parse(format!(
                "unknown record format {:?}",
                record.format
            )));
        }
        let multiplier = Multiplier::new(
            record.multiplier.rank(),
            record.multiplier.numerators().to_vec(),
            record.multiplier.denominator(),
        )?;
        let n = record.fiber_dim;
        let mut blocks = Vec::with_capacity(record.blocks.len());
        for br in record.blocks {
            if br.entries.len() != n * n {
                return Err(AlgebraError::Parse(format!(
                    "block at {:?} has {} entries, expected {}",
                    br.gamma,
                    br.entries.len(),
                    n * n
                )));
            }
            let mut m = DMatrix::zeros(n, n);
            for (idx, s) in br.entries.iter().enumerate() {
                let (re, im) = s
                    .split_once(',')
                    .ok_or_else(|| AlgebraError::Parse(format!("bad complex entry {s:?}")))?;
                let re: f64 = re
                    .trim()
                    .parse()
                    .map_err(|_| AlgebraError::Parse(format!("bad real part {re:?}")))?;
                let im: f64 = im
                    .trim()
                    .parse()
                    .map_err(|_| AlgebraError::Parse(format!("bad imaginary part {im:?}")))?;
                m[(idx / n, idx % n)] = Complex64::new(re, im);
            }
            blocks.push((br.gamma, m));
        }
        Self::from_blocks(multiplier, n, blocks)
    }
}

const RECORD_FORMAT: &str = "twisted-element/1";

#[derive(Serialize, Deserialize)]
struct ElementRecord {
    format: String,
    multiplier: Multiplier,
    fiber_dim: usize,
    blocks: Vec<BlockRecord>,
}

#[derive(Serialize, Deserialize)]
struct BlockRecord {
    gamma: Vec<i64>,
    entries: Vec<String>,
}

/// Largest singular value of a complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}
