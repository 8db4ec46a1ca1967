//! Sparse Hermitian matrices, banded Cholesky and eigensolvers.

mod banded;
mod eigen;
mod sparse;

pub use banded::BandedCholesky;
pub use eigen::{dense_eigh, lowest_eigenpairs, EigenPairs, SolverOptions};
pub use sparse::CsrMatrix;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite after shifting (pivot {pivot}, value {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("eigensolver converged {converged} of {wanted} requested pairs")]
    NoConvergence { converged: usize, wanted: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ring_laplacian(n: usize, flux: f64) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            let ph = Complex64::from_polar(1.0, flux / n as f64);
            t.push((
                i,
                i,
                Complex64::new(2.0 + 1e-4 * (i as f64 - n as f64 / 2.0).powi(2), 0.0),
            ));
            t.push((i, j, -ph));
            t.push((j, i, -ph.conj()));
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn krylov_matches_dense() {
        let h = ring_laplacian(600, 0.7);
        assert!(h.hermiticity_defect() < 1e-15);
        let dense = dense_eigh(&h.to_dense());
        let opts = SolverOptions {
            dense_threshold: 10,
            ..Default::default()
        };
        let sparse = lowest_eigenpairs(&h, 8, &opts, None).unwrap();
        for k in 0..8 {
            assert!((dense.values[k] - sparse.values[k]).abs() < 1e-9, "{k}");
        }
    }

    #[test]
    fn banded_solve_inverts() {
        let h = ring_laplacian(200, 1.3);
        let chol = BandedCholesky::factor(&h, -1.0, h.rcm_ordering()).unwrap();
        assert!(chol.bandwidth() <= 2);
        let x: Vec<Complex64> = (0..200).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut b = vec![Complex64::default(); 200];
        h.matvec(&x, &mut b);
        for (bi, xi) in b.iter_mut().zip(&x) {
            *bi += xi;
        }
        chol.solve(&mut b);
        let err: f64 = b
            .iter()
            .zip(&x)
            .map(|(a, c)| (a - c).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }
}
