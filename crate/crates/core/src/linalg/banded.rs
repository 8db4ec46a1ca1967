use num_complex::Complex64;

use super::{CsrMatrix, LinalgError};

/// Cholesky factor `A = L Lᴴ` of a Hermitian positive definite matrix stored in
/// a permuted band.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    perm: Vec<usize>,
    /// Row `i` holds `L[i, i-bw ..= i]`, left padded with zeros.
    rows: Vec<Complex64>,
}

impl BandedCholesky {
    /// Factors `A − shift·I` using the ordering `perm` (`perm[new] = old`).
    pub fn factor(a: &CsrMatrix, shift: f64, perm: Vec<usize>) -> Result<Self, LinalgError> {
        let n = a.dim();
        let bw = a.bandwidth(&perm);
        let w = bw + 1;
        let mut pos = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            pos[old] = new;
        }
        let mut rows = vec![Complex64::default(); n * w];
        for old_i in 0..n {
            let i = pos[old_i];
            for (old_j, v) in a.row(old_i) {
                let j = pos[old_j];
                if j <= i {
                    rows[i * w + (bw - (i - j))] += v;
                }
            }
            rows[i * w + bw] -= Complex64::new(shift, 0.0);
        }
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let mut s = rows[i * w + (bw - (i - j))];
                for k in lo..j {
                    s -= rows[i * w + (bw - (i - k))] * rows[j * w + (bw - (j - k))].conj();
                }
                if j == i {
                    if !(s.re > 0.0) || !s.re.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite {
                            pivot: i,
                            value: s.re,
                        });
                    }
                    rows[i * w + bw] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    rows[i * w + (bw - (i - j))] = s / rows[j * w + bw].re;
                }
            }
        }
        Ok(Self { n, bw, perm, rows })
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Solves `(A − shift·I) x = b` in place.
    pub fn solve(&self, b: &mut [Complex64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y: Vec<Complex64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.rows[i * w + (bw - (i - k))] * y[k];
            }
            y[i] = s / self.rows[i * w + bw].re;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = y[i];
            for k in i + 1..=hi {
                s -= self.rows[k * w + (bw - (k - i))].conj() * y[k];
            }
            y[i] = s / self.rows[i * w + bw].re;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}
