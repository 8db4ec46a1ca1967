use nalgebra::DMatrix;
use num_complex::Complex64;

/// Compressed sparse row matrix with complex entries.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Assembles from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..self.n {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    t.push((i, j, a * b));
                }
            }
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    /// `self − other`.
    pub fn sub(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, -v)));
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    pub fn adjoint(&self) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (j, i, v.conj())));
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    pub fn identity(n: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(
            n,
            (0..n).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, c: Complex64) -> CsrMatrix {
        let mut out = self.clone();
        for v in out.vals.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .cloned()
            .zip(self.vals[r].iter().cloned())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.n {
            let mut acc = Complex64::default();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn apply(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.n, x.ncols());
        let mut buf = vec![Complex64::default(); self.n];
        for j in 0..x.ncols() {
            self.matvec(x.column(j).as_slice(), &mut buf);
            out.column_mut(j).copy_from_slice(&buf);
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// `max |A_ij − conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Lower bound on the spectrum from Gershgorin discs of a Hermitian matrix.
    pub fn gershgorin_lower(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut diag = 0.0;
                let mut off = 0.0;
                for (j, v) in self.row(i) {
                    if j == i {
                        diag += v.re;
                    } else {
                        off += v.norm();
                    }
                }
                diag - off
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Reverse Cuthill-McKee ordering of the symmetrised sparsity pattern.
    /// Returns `perm` with `perm[new] = old`.
    pub fn rcm_ordering(&self) -> Vec<usize> {
        let n = self.n;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for (j, _) in self.row(i) {
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let start = (0..n)
                .filter(|&i| !visited[i])
                .min_by_key(|&i| (deg[i], i))
                .unwrap();
            let start = pseudo_peripheral(start, &adj);
            visited[start] = true;
            let mut head = order.len();
            order.push(start);
            while head < order.len() {
                let v = order[head];
                head += 1;
                let mut nb: Vec<usize> = adj[v].iter().cloned().filter(|&w| !visited[w]).collect();
                nb.sort_by_key(|&w| (deg[w], w));
                for w in nb {
                    visited[w] = true;
                    order.push(w);
                }
            }
        }
        order.reverse();
        order
    }

    /// Half bandwidth after applying `perm` (`perm[new] = old`).
    pub fn bandwidth(&self, perm: &[usize]) -> usize {
        let mut pos = vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            pos[old] = new;
        }
        let mut bw = 0;
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                bw = bw.max(pos[i].abs_diff(pos[j]));
            }
        }
        bw
    }
}

fn pseudo_peripheral(start: usize, adj: &[Vec<usize>]) -> usize {
    let mut v = start;
    let mut ecc = 0;
    for _ in 0..8 {
        let (far, depth) = bfs_farthest(v, adj);
        if depth <= ecc {
            break;
        }
        ecc = depth;
        v = far;
    }
    v
}

fn bfs_farthest(start: usize, adj: &[Vec<usize>]) -> (usize, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    let mut best = (start, 0);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d > best.1 || (d == best.1 && adj[v].len() < adj[best.0].len()) {
            best = (v, d);
        }
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    best
}
