use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PairingError;
use crate::twisted_algebra::word_length;

/// Additive homomorphism `ξ: ℤ^d → ℝ^{2g}`, given as a `2g × d` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticData {
    rank: usize,
    rows: Vec<Vec<f64>>,
}

impl SymplecticData {
    pub fn new(rank: usize, rows: Vec<Vec<f64>>) -> Result<Self, PairingError> {
        if rows.is_empty() || rows.len() % 2 != 0 {
            return Err(PairingError::OddGenus(rows.len()));
        }
        if rows.iter().any(|r| r.len() != rank) {
            return Err(PairingError::Shape(format!(
                "every row of ξ needs {rank} entries"
            )));
        }
        Ok(Self { rank, rows })
    }

    /// The identity `ℤ² → ℝ²`.
    pub fn planar() -> Self {
        Self {
            rank: 2,
            rows: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn genus_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn genus(&self) -> usize {
        self.rows.len() / 2
    }

    pub fn component(&self, j: usize, gamma: &[i64]) -> f64 {
        self.rows[j]
            .iter()
            .zip(gamma)
            .map(|(a, &g)| a * g as f64)
            .sum()
    }

    pub fn apply(&self, gamma: &[i64]) -> Vec<f64> {
        (0..self.rows.len())
            .map(|j| self.component(j, gamma))
            .collect()
    }

    fn max_entry(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Declared polynomial growth `|c(γ₁,…,γ_k)| ≤ C Π (1+ℓ(γᵢ))^{aᵢ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyBound {
    pub constant: f64,
    pub exponents: Vec<i32>,
}

pub type CocycleFn = Arc<dyn Fn(&[&[i64]]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CocycleKind {
    /// `c(γ) = ⟨v, γ⟩`.
    Linear(Vec<f64>),
    /// Symplectic area cocycle of a homomorphism into `ℝ^{2g}`.
    Area(SymplecticData),
    /// Explicit values on tuples inside a box of the given ℓ¹ radius, zero elsewhere.
    Table {
        radius: u64,
        values: BTreeMap<Vec<Vec<i64>>, f64>,
    },
    Custom(CocycleFn),
}

impl fmt::Debug for CocycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear(v) => f.debug_tuple("Linear").field(v).finish(),
            Self::Area(x) => f.debug_tuple("Area").field(x).finish(),
            Self::Table { radius, values } => f
                .debug_struct("Table")
                .field("radius", radius)
                .field("entries", &values.len())
                .finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Real-valued group `k`-cocycle on `ℤ^d`.
#[derive(Clone, Debug)]
pub struct GroupCocycle {
    pub rank: usize,
    pub degree: usize,
    pub kind: CocycleKind,
    pub normalized: bool,
    pub bound: PolyBound,
}

impl GroupCocycle {
    pub fn linear(v: Vec<f64>) -> Self {
        let c = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Self {
            rank: v.len(),
            degree: 1,
            kind: CocycleKind::Linear(v),
            normalized: true,
            bound: PolyBound {
                constant: c,
                exponents: vec![1],
            },
        }
    }

    pub fn custom(
        rank: usize,
        degree: usize,
        normalized: bool,
        bound: PolyBound,
        f: CocycleFn,
    ) -> Self {
        Self {
            rank,
            degree,
            kind: CocycleKind::Custom(f),
            normalized,
            bound,
        }
    }

    pub fn table(
        rank: usize,
        degree: usize,
        radius: u64,
        values: BTreeMap<Vec<Vec<i64>>, f64>,
        normalized: bool,
    ) -> Self {
        let c = values.values().fold(0.0f64, |m, x| m.max(x.abs()));
        Self {
            rank,
            degree,
            kind: CocycleKind::Table { radius, values },
            normalized,
            bound: PolyBound {
                constant: c,
                exponents: vec![0; degree],
            },
        }
    }

    pub fn eval(&self, args: &[&[i64]]) -> f64 {
        match &self.kind {
            CocycleKind::Linear(v) => v.iter().zip(args[0]).map(|(a, &g)| a * g as f64).sum(),
            CocycleKind::Area(xi) => area_value(xi, args[0], args[1]),
            CocycleKind::Table { radius, values } => {
                if args.iter().any(|g| word_length(g) > *radius) {
                    return 0.0;
                }
                let key: Vec<Vec<i64>> = args.iter().map(|g| g.to_vec()).collect();
                values.get(&key).copied().unwrap_or(0.0)
            }
            CocycleKind::Custom(f) => f(args),
        }
    }
}

/// `Ψ(γ₁,γ₂) = Σⱼ [ξⱼ(−γ₁)ξ_{j+g}(γ₂) − ξ_{j+g}(−γ₁)ξⱼ(γ₂)]`.
fn area_value(xi: &SymplecticData, g1: &[i64], g2: &[i64]) -> f64 {
    let g = xi.genus();
    let mut acc = 0.0;
    for j in 0..g {
        acc += -xi.component(j, g1) * xi.component(j + g, g2)
            + xi.component(j + g, g1) * xi.component(j, g2);
    }
    acc
}

/// Degree-2 symplectic area cocycle of `ξ`. On `ℤ²` with `ξ = id` this is
/// `Ψ(m, n) = −(m₁n₂ − m₂n₁)`.
pub fn build_area_cocycle(xi: &SymplecticData) -> Result<GroupCocycle, PairingError> {
    if xi.genus_dim() % 2 != 0 {
        return Err(PairingError::OddGenus(xi.genus_dim()));
    }
    let m = xi.max_entry();
    let d = xi.rank() as f64;
    Ok(GroupCocycle {
        rank: xi.rank(),
        degree: 2,
        kind: CocycleKind::Area(xi.clone()),
        normalized: true,
        bound: PolyBound {
            constant: (xi.genus_dim() as f64) * (m * d).powi(2),
            exponents: vec![2, 2],
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleReport {
    pub pass: bool,
    pub samples: usize,
    pub max_identity_defect: f64,
    pub normalization_ok: bool,
    pub max_normalization_defect: f64,
    pub bound_ok: bool,
    pub max_bound_ratio: f64,
}

/// Alternating coboundary sum `(δc)(γ₀,…,γ_k)` of a `k`-cochain.
pub fn coboundary(c: &GroupCocycle, tuple: &[Vec<i64>]) -> f64 {
    let k = c.degree;
    let refs = |v: &[Vec<i64>]| -> f64 {
        let r: Vec<&[i64]> = v.iter().map(|g| g.as_slice()).collect();
        c.eval(&r)
    };
    let mut total = refs(&tuple[1..=k]);
    for i in 0..k {
        let mut merged: Vec<Vec<i64>> = Vec::with_capacity(k);
        merged.extend_from_slice(&tuple[..i]);
        merged.push(
            tuple[i]
                .iter()
                .zip(&tuple[i + 1])
                .map(|(a, b)| a + b)
                .collect(),
        );
        merged.extend_from_slice(&tuple[i + 2..]);
        let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * refs(&merged);
    }
    let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    total + sign * refs(&tuple[..k])
}

/// Checks the cocycle identity on `(k+1)`-tuples, the declared normalisation
/// and the declared polynomial bound.
pub fn verify_group_cocycle(c: &GroupCocycle, samples: &[Vec<Vec<i64>>]) -> CocycleReport {
    let k = c.degree;
    let zero = vec![0i64; c.rank];
    let mut identity = 0.0f64;
    let mut norm = 0.0f64;
    let mut ratio = 0.0f64;
    for tuple in samples {
        identity = identity.max(coboundary(c, tuple).abs());
        let args: Vec<&[i64]> = tuple[..k].iter().map(|g| g.as_slice()).collect();
        let value = c.eval(&args);
        let weight: f64 = args
            .iter()
            .zip(&c.bound.exponents)
            .map(|(g, &a)| (1.0 + word_length(g) as f64).powi(a))
            .product();
        if c.bound.constant * weight > 0.0 {
            ratio = ratio.max(value.abs() / (c.bound.constant * weight));
        } else if value != 0.0 {
            ratio = f64::INFINITY;
        }
        if c.normalized && k > 0 {
            for slot in 0..k {
                let mut a: Vec<&[i64]> = args.clone();
                a[slot] = &zero;
                norm = norm.max(c.eval(&a).abs());
            }
            let mut closing: Vec<Vec<i64>> = tuple[..k].to_vec();
            let partial: Vec<i64> = (0..c.rank)
                .map(|i| closing[..k - 1].iter().map(|g| g[i]).sum::<i64>())
                .collect();
            closing[k - 1] = partial.iter().map(|x| -x).collect();
            let a: Vec<&[i64]> = closing.iter().map(|g| g.as_slice()).collect();
            norm = norm.max(c.eval(&a).abs());
        }
    }
    let normalization_ok = norm <= 1e-10;
    let bound_ok = ratio <= 1.0 + 1e-12;
    CocycleReport {
        pass: identity < 1e-10 && normalization_ok && bound_ok,
        samples: samples.len(),
        max_identity_defect: identity,
        normalization_ok,
        max_normalization_defect: norm,
        bound_ok,
        max_bound_ratio: ratio,
    }
}
