use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::levels::{merge_levels, ModelSpectrum};
use super::well::{check_spd, metric_factor};
use super::ModelError;
use crate::linalg::dense_eigh;

/// Model well whose quadratic potential is matrix valued in the fiber:
/// `K = −Σ g^{ik}∂ᵢ∂_k + Σ_{ik} xᵢx_k W_{ik} + B̄` with Hermitian `N × N`
/// blocks `W_{ik} = W_{ki}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixWellSpec {
    pub metric: DMatrix<f64>,
    /// Row-major `n × n` array of `N × N` blocks.
    pub hessian_fiber: Vec<DMatrix<Complex64>>,
    pub fiber_endo: DMatrix<Complex64>,
}

impl MatrixWellSpec {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_endo.nrows()
    }

    fn block(&self, i: usize, k: usize) -> &DMatrix<Complex64> {
        &self.hessian_fiber[i * self.dim() + k]
    }
}

fn multi_indices(d: usize, max_degree: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &out {
            let used: u32 = p.iter().sum();
            for k in 0..=(max_degree as u32 - used) {
                let mut q = p.clone();
                q.push(k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// `t = (a + a†)/√2` applied to one mode of a Hermite basis state.
fn apply_position(state: &[(Vec<u32>, f64)], mode: usize) -> Vec<(Vec<u32>, f64)> {
    let mut out = Vec::with_capacity(2 * state.len());
    for (n, c) in state {
        let m = n[mode] as f64;
        if n[mode] > 0 {
            let mut lo = n.clone();
            lo[mode] -= 1;
            out.push((lo, c * (m / 2.0).sqrt()));
        }
        let mut hi = n.clone();
        hi[mode] += 1;
        out.push((hi, c * ((m + 1.0) / 2.0).sqrt()));
    }
    out
}

/// Truncated Hermite-basis approximation of the spectrum of a matrix-valued
/// well. Not exact: the result carries `exact = false` and its cutoff is
/// lowered to half the energy up to which the unperturbed basis is complete.
pub fn hermite_levels(
    w: &MatrixWellSpec,
    max_degree: usize,
    cutoff: f64,
) -> Result<ModelSpectrum, ModelError> {
    let d = w.dim();
    let nf = w.fiber_dim();
    if w.hessian_fiber.len() != d * d
        || w.hessian_fiber
            .iter()
            .any(|b| b.nrows() != nf || b.ncols() != nf)
    {
        return Err(ModelError::Shape(format!(
            "need {} Hessian blocks of size {nf}×{nf}",
            d * d
        )));
    }
    check_spd("metric", &w.metric)?;
    let mut w0 = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for k in 0..d {
            w0[(i, k)] = w.block(i, k).trace().re / nf as f64;
        }
    }
    check_spd("fiber-averaged Hessian", &w0)?;
    let s = metric_factor(&w.metric)?;
    let w0p = s.transpose() * &w0 * &s;
    let eig = SymmetricEigen::new((&w0p + w0p.transpose()) * 0.5);
    let omega: Vec<f64> = eig.eigenvalues.iter().map(|l| l.sqrt()).collect();
    let mut m = &s * &eig.eigenvectors;
    for (i, om) in omega.iter().enumerate() {
        let f = 1.0 / om.sqrt();
        m.column_mut(i).scale_mut(f);
    }
    let mut delta: Vec<DMatrix<Complex64>> = Vec::with_capacity(d * d);
    for i in 0..d {
        for k in 0..d {
            let mut acc = DMatrix::<Complex64>::zeros(nf, nf);
            for p in 0..d {
                for q in 0..d {
                    acc += w.block(p, q) * Complex64::new(m[(p, i)] * m[(q, k)], 0.0);
                }
            }
            if i == k {
                for a in 0..nf {
                    acc[(a, a)] -= omega[i];
                }
            }
            delta.push(acc);
        }
    }

    let basis = multi_indices(d, max_degree);
    let index: HashMap<&Vec<u32>, usize> = basis.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let dim = basis.len() * nf;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, n) in basis.iter().enumerate() {
        let e0: f64 = n
            .iter()
            .zip(&omega)
            .map(|(&k, w)| (2.0 * k as f64 + 1.0) * w)
            .sum();
        for a in 0..nf {
            h[(col * nf + a, col * nf + a)] += e0;
            for b in 0..nf {
                h[(col * nf + a, col * nf + b)] += w.fiber_endo[(a, b)];
            }
        }
        for i in 0..d {
            for k in i..d {
                let weight = if i == k { 1.0 } else { 2.0 };
                let image = apply_position(&apply_position(&[(n.clone(), 1.0)], k), i);
                for (np, c) in image {
                    if let Some(&row) = index.get(&np) {
                        let blk = &delta[i * d + k];
                        for a in 0..nf {
                            for b in 0..nf {
                                h[(row * nf + a, col * nf + b)] += blk[(a, b)] * (weight * c);
                            }
                        }
                    }
                }
            }
        }
    }
    let trusted = omega.iter().sum::<f64>() + 2.0 * omega[0] * (max_degree as f64 + 1.0);
    let effective = cutoff.min(0.5 * trusted);
    let values: Vec<f64> = dense_eigh(&h)
        .values
        .into_iter()
        .filter(|&v| v <= effective)
        .collect();
    Ok(ModelSpectrum {
        levels: merge_levels(values),
        cutoff: effective,
        complete_below: true,
        exact: false,
    })
}
