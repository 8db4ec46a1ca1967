use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BandedCholesky, CsrMatrix, LinalgError};

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl EigenPairs {
    pub fn truncate(mut self, k: usize) -> Self {
        let k = k.min(self.values.len());
        self.values.truncate(k);
        self.vectors = self.vectors.columns(0, k).into_owned();
        self
    }
}

/// Full eigendecomposition of a dense Hermitian matrix.
pub fn dense_eigh(h: &DMatrix<Complex64>) -> EigenPairs {
    let n = h.nrows();
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (new, &old) in idx.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    EigenPairs { values, vectors }
}

/// Knobs for [`lowest_eigenpairs`].
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Matrices up to this size are diagonalised densely.
    pub dense_threshold: usize,
    /// Relative residual `‖Hx − λx‖ ≤ tol·max(1, |λ|)` required for every returned pair.
    pub tol: f64,
    pub max_restarts: usize,
    /// Extra Ritz vectors carried along beyond the requested count.
    pub guard: usize,
    /// Number of block Krylov steps per restart cycle.
    pub krylov_steps: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 256,
            tol: 1e-10,
            max_restarts: 60,
            guard: 4,
            krylov_steps: 6,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthogonalises `w` against `basis` (two passes) and normalises it.
/// Returns `false` when `w` is numerically inside the span.
fn orthonormalize_into(basis: &[Vec<Complex64>], w: &mut [Complex64]) -> bool {
    let before = norm(w);
    if before == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    let after = norm(w);
    if after <= 1e-13 * before {
        return false;
    }
    for wi in w.iter_mut() {
        *wi /= after;
    }
    true
}

const LANCZOS_STEPS: usize = 40;

/// Smallest Ritz value of a short Lanczos run, an upper bound on `λ_min`.
fn ritz_floor(h: &CsrMatrix, seed: u64) -> f64 {
    let n = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1a2c);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0))
        .collect();
    let mut images: Vec<Vec<Complex64>> = Vec::new();
    while basis.len() < LANCZOS_STEPS.min(n) && orthonormalize_into(&basis, &mut v) {
        let mut hv = vec![Complex64::default(); n];
        h.matvec(&v, &mut hv);
        basis.push(v);
        images.push(hv.clone());
        v = hv;
    }
    let k = basis.len();
    let t = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
    let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
    dense_eigh(&t).values.first().copied().unwrap_or(0.0)
}

/// Cholesky factor of `H − s` for a shift `s` below the spectrum, stepping
/// down from a Lanczos estimate of `λ_min` with doubling offsets and falling
/// back to the Gershgorin bound.
fn shifted_factor(h: &CsrMatrix, seed: u64) -> Result<BandedCholesky, LinalgError> {
    let perm = h.rcm_ordering();
    let lower = h.gershgorin_lower();
    let floor = lower - 1.0f64.max(1e-3 * lower.abs());
    let theta = ritz_floor(h, seed);
    let mut offset = 1.0f64.max(0.05 * theta.abs());
    while theta - offset > floor {
        match BandedCholesky::factor(h, theta - offset, perm.clone()) {
            Ok(c) => return Ok(c),
            Err(LinalgError::NotPositiveDefinite { .. }) => offset *= 4.0,
            Err(e) => return Err(e),
        }
    }
    BandedCholesky::factor(h, floor, perm)
}

/// Lowest `nev` eigenpairs of a sparse Hermitian matrix.
///
/// Small matrices go to the dense solver. Larger ones use a restarted block
/// Krylov iteration with full reorthogonalisation on `(H − s)⁻¹`. The inverse
/// is applied with a banded Cholesky factor in reverse Cuthill-McKee order,
/// with the shift `s` placed just below a Lanczos estimate of `λ_min`. Ritz pairs are
/// extracted with `H` itself so that residuals are measured where they count. `start` may supply
/// an initial block, for instance eigenvectors from a neighbouring Bloch momentum.
pub fn lowest_eigenpairs(
    h: &CsrMatrix,
    nev: usize,
    opts: &SolverOptions,
    start: Option<&DMatrix<Complex64>>,
) -> Result<EigenPairs, LinalgError> {
    let n = h.dim();
    if nev == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: DMatrix::zeros(n, 0),
        });
    }
    if n <= opts.dense_threshold || nev + opts.guard >= n / 2 {
        return Ok(dense_eigh(&h.to_dense()).truncate(nev));
    }
    let chol = shifted_factor(h, opts.seed)?;
    let p = (nev + opts.guard).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut block: Vec<Vec<Complex64>> = Vec::with_capacity(p);
    if let Some(s) = start {
        for j in 0..s.ncols().min(p) {
            let mut v: Vec<Complex64> = s.column(j).iter().cloned().collect();
            if v.len() == n && orthonormalize_into(&block, &mut v) {
                block.push(v);
            }
        }
    }
    while block.len() < p {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        if orthonormalize_into(&block, &mut v) {
            block.push(v);
        }
    }

    let mut hv = vec![Complex64::default(); n];
    let mut converged = 0;
    for _ in 0..opts.max_restarts {
        let mut q: Vec<Vec<Complex64>> = block.clone();
        let mut solved = 0usize;
        let mut newest = 0..q.len();
        for step in 0..opts.krylov_steps {
            let mut fresh = Vec::new();
            for j in newest.clone() {
                let mut w = q[j].clone();
                chol.solve(&mut w);
                solved += 1;
                fresh.push(w);
            }
            if step + 1 == opts.krylov_steps {
                break;
            }
            let start_len = q.len();
            for mut w in fresh {
                if orthonormalize_into(&q, &mut w) {
                    q.push(w);
                }
            }
            if q.len() == start_len {
                break;
            }
            newest = start_len..q.len();
        }
        let m = solved;
        let q = &q[..m];
        let hq: Vec<Vec<Complex64>> = q
            .iter()
            .map(|v| {
                let mut w = vec![Complex64::default(); n];
                h.matvec(v, &mut w);
                w
            })
            .collect();
        let mut t = DMatrix::<Complex64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = dot(&q[i], &hq[j]);
                t[(i, j)] = v;
                t[(j, i)] = v.conj();
            }
        }
        let eig = dense_eigh(&t);
        let take = p.min(m);
        let mut ritz: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(take);
        for col in 0..take {
            let y = eig.vectors.column(col);
            let mut x = vec![Complex64::default(); n];
            for (k, qk) in q.iter().enumerate() {
                let yk = y[k];
                for (xi, qi) in x.iter_mut().zip(qk) {
                    *xi += yk * qi;
                }
            }
            let nx = norm(&x);
            for xi in x.iter_mut() {
                *xi /= nx;
            }
            h.matvec(&x, &mut hv);
            let lambda = dot(&x, &hv).re;
            ritz.push((lambda, x));
        }
        ritz.sort_by(|a, b| a.0.total_cmp(&b.0));
        converged = 0;
        for (lambda, x) in ritz.iter().take(nev) {
            h.matvec(x, &mut hv);
            let r = hv
                .iter()
                .zip(x)
                .map(|(a, b)| (a - lambda * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if r <= opts.tol * lambda.abs().max(1.0) {
                converged += 1;
            }
        }
        if converged == nev && ritz.len() >= nev {
            let values = ritz.iter().take(nev).map(|r| r.0).collect();
            let mut vectors = DMatrix::zeros(n, nev);
            for (j, (_, x)) in ritz.iter().take(nev).enumerate() {
                vectors.column_mut(j).copy_from_slice(x);
            }
            return Ok(EigenPairs { values, vectors });
        }
        block.clear();
        for (_, mut x) in ritz {
            if orthonormalize_into(&block, &mut x) {
                block.push(x);
            }
        }
        while block.len() < p {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            if orthonormalize_into(&block, &mut v) {
                block.push(v);
            }
        }
    }
    Err(LinalgError::NoConvergence {
        converged,
        wanted: nev,
    })
}
