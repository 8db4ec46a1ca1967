use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::group::GroupCocycle;
use super::PairingError;
use crate::twisted_algebra::{AlgebraElement, Multiplier};

/// Multilinear functional on `(k+1)`-tuples of algebra elements.
pub trait CyclicCocycle {
    fn degree(&self) -> usize;
    fn eval(&self, args: &[&AlgebraElement]) -> Result<Complex64, PairingError>;
}

/// The cyclic cocycle `τ_c#Tr` induced by a normalised group cocycle; on
/// scalar fibers it is `τ_c`.
pub struct TauC {
    pub cocycle: GroupCocycle,
}

impl CyclicCocycle for TauC {
    fn degree(&self) -> usize {
        self.cocycle.degree
    }

    fn eval(&self, args: &[&AlgebraElement]) -> Result<Complex64, PairingError> {
        eval_tau_c_tr(&self.cocycle, args)
    }
}

fn check_args(k: usize, args: &[&AlgebraElement]) -> Result<(), PairingError> {
    if args.len() != k + 1 {
        return Err(PairingError::Arity {
            expected: k + 1,
            found: args.len(),
        });
    }
    for a in &args[1..] {
        if a.multiplier() != args[0].multiplier() {
            return Err(PairingError::Algebra(
                crate::twisted_algebra::AlgebraError::MultiplierMismatch,
            ));
        }
        if a.fiber_dim() != args[0].fiber_dim() {
            return Err(PairingError::Algebra(
                crate::twisted_algebra::AlgebraError::FiberMismatch {
                    expected: args[0].fiber_dim(),
                    found: a.fiber_dim(),
                },
            ));
        }
    }
    Ok(())
}

/// `τ_c(f₀,…,f_k) = Σ_{γ₀+…+γ_k=0} f₀(γ₀)…f_k(γ_k) c(γ₁,…,γ_k) Tr_Γ(δ_{γ₀}*…*δ_{γ_k})`
/// for scalar-fiber elements.
pub fn eval_tau_c(c: &GroupCocycle, args: &[&AlgebraElement]) -> Result<Complex64, PairingError> {
    if let Some(a) = args.iter().find(|a| a.fiber_dim() != 1) {
        return Err(PairingError::Shape(format!(
            "τ_c needs scalar fibers, found dimension {}",
            a.fiber_dim()
        )));
    }
    eval_tau_c_tr(c, args)
}

/// `τ_c#Tr(F₀,…,F_k) = Σ Tr(F₀(γ₀)…F_k(γ_k)) c(γ₁,…,γ_k) Tr_Γ(δ_{γ₀}*…*δ_{γ_k})`.
pub fn eval_tau_c_tr(
    c: &GroupCocycle,
    args: &[&AlgebraElement],
) -> Result<Complex64, PairingError> {
    if !c.normalized {
        return Err(PairingError::NotNormalized);
    }
    let k = c.degree;
    check_args(k, args)?;
    if args[0].rank() != c.rank {
        return Err(PairingError::Shape(format!(
            "cocycle on ℤ^{} applied to elements over ℤ^{}",
            c.rank,
            args[0].rank()
        )));
    }
    let head: HashMap<&[i64], &DMatrix<Complex64>> = args[0]
        .blocks()
        .iter()
        .map(|(g, b)| (g.as_slice(), b))
        .collect();
    let tails: Vec<Vec<(&Vec<i64>, &DMatrix<Complex64>)>> = args[1..]
        .iter()
        .map(|a| a.blocks().iter().collect())
        .collect();
    let mut walker = Walker {
        cocycle: c,
        multiplier: args[0].multiplier(),
        head,
        tails,
        rank: c.rank,
        chosen: Vec::with_capacity(k),
        total: Complex64::default(),
    };
    let sum = vec![0i64; c.rank];
    walker.recurse(&sum);
    Ok(walker.total)
}

struct Walker<'a> {
    cocycle: &'a GroupCocycle,
    multiplier: &'a Multiplier,
    head: HashMap<&'a [i64], &'a DMatrix<Complex64>>,
    tails: Vec<Vec<(&'a Vec<i64>, &'a DMatrix<Complex64>)>>,
    rank: usize,
    chosen: Vec<(&'a Vec<i64>, &'a DMatrix<Complex64>)>,
    total: Complex64,
}

impl<'a> Walker<'a> {
    fn recurse(&mut self, sum: &[i64]) {
        let depth = self.chosen.len();
        if depth == self.tails.len() {
            let g0: Vec<i64> = sum.iter().map(|x| -x).collect();
            let Some(&f0) = self.head.get(g0.as_slice()) else {
                return;
            };
            let args: Vec<&[i64]> = self.chosen.iter().map(|(g, _)| g.as_slice()).collect();
            let cval = if args.is_empty() {
                1.0
            } else {
                self.cocycle.eval(&args)
            };
            if cval == 0.0 {
                return;
            }
            let mut prod = f0.clone();
            let mut acc = g0.clone();
            let mut exponent = 0i128;
            for (g, b) in &self.chosen {
                prod = &prod * *b;
                exponent -= self.multiplier.exponent(&acc, g);
                for i in 0..self.rank {
                    acc[i] += g[i];
                }
            }
            let phase = self.multiplier.phase_of_exponent(exponent);
            self.total += prod.trace() * phase * cval;
            return;
        }
        for idx in 0..self.tails[depth].len() {
            let (g, b) = self.tails[depth][idx];
            let next: Vec<i64> = sum.iter().zip(g).map(|(a, b)| a + b).collect();
            self.chosen.push((g, b));
            self.recurse(&next);
            self.chosen.pop();
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclicReport {
    pub pass: bool,
    pub samples: usize,
    pub max_cyclic_defect: f64,
    pub max_hochschild_defect: f64,
}

/// Checks `φ(f_k, f₀, …, f_{k−1}) = (−1)^k φ(f₀,…,f_k)` and `bφ = 0` on
/// samples of `k+2` elements each (the cyclicity check uses the first `k+1`).
pub fn verify_cyclic<C: CyclicCocycle + ?Sized>(
    phi: &C,
    samples: &[Vec<AlgebraElement>],
    tol: f64,
) -> Result<CyclicReport, PairingError> {
    let k = phi.degree();
    let mut cyc = 0.0f64;
    let mut hoch = 0.0f64;
    for s in samples {
        if s.len() != k + 2 {
            return Err(PairingError::Arity {
                expected: k + 2,
                found: s.len(),
            });
        }
        let base: Vec<&AlgebraElement> = s[..=k].iter().collect();
        let mut rotated: Vec<&AlgebraElement> = vec![base[k]];
        rotated.extend_from_slice(&base[..k]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = phi.eval(&rotated)?;
        let rhs = phi.eval(&base)? * sign;
        cyc = cyc.max((lhs - rhs).norm());

        let mut b = Complex64::default();
        for j in 0..=k {
            let prod = s[j].convolve(&s[j + 1])?;
            let mut args: Vec<&AlgebraElement> = Vec::with_capacity(k + 1);
            args.extend(s[..j].iter());
            args.push(&prod);
            args.extend(s[j + 2..].iter());
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            b += phi.eval(&args)? * sign;
        }
        let wrap = s[k + 1].convolve(&s[0])?;
        let mut args: Vec<&AlgebraElement> = vec![&wrap];
        args.extend(s[1..=k].iter());
        let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        b += phi.eval(&args)? * sign;
        hoch = hoch.max(b.norm());
    }
    Ok(CyclicReport {
        pass: cyc <= tol && hoch <= tol,
        samples: samples.len(),
        max_cyclic_defect: cyc,
        max_hochschild_defect: hoch,
    })
}
