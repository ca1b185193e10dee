//! Small sparse and dense linear algebra: symmetric CSR matrices, Jacobi
//! preconditioned conjugate gradients and a cyclic Jacobi eigensolver.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("zero diagonal entry at row {0}; Jacobi preconditioner undefined")]
    ZeroDiagonal(usize),
    #[error("CG did not converge in {iterations} iterations (relative residual {residual:e})")]
    MaxIterationsExceeded {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("reference matrix does not annihilate the kernel vector (relative {0:e})")]
    KernelMismatch(f64),
}

/// Symmetric matrix in compressed-row form with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds the matrix from (row, col, value) triplets, summing duplicates.
    ///
    /// The caller supplies both triangles; symmetry is checked by
    /// [`SparseSymMatrix::symmetry_defect`], not enforced here.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self, LinalgError> {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::IndexOutOfRange { row: i, col: j, n });
            }
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        let mut next = counts.clone();
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }

        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            // stable sort keeps the summation order of duplicates fixed
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                if v.abs() > 1e-300 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Largest |a_ij - a_ji| relative to the largest |a_ij|.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

/// Outcome of a converged CG solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final ‖Ax − b‖₂ / ‖b‖₂.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradients from x₀ = 0.
///
/// Stops once ‖Ax − b‖₂ ≤ tol·‖b‖₂, measured on the true residual.
pub fn cg_solve(
    a: &SparseSymMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgSolution, LinalgError> {
    let n = a.dim();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|d| *d == 0.0) {
        return Err(LinalgError::ZeroDiagonal(i));
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();

    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }

    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut best = (f64::INFINITY, x.clone());

    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm2(&r) / bnorm;
        if rel <= tol {
            // confirm against the true residual, the recurrence drifts
            a.matvec(&x, &mut ap);
            let true_rel = ap
                .iter()
                .zip(b)
                .map(|(ax, bi)| (bi - ax) * (bi - ax))
                .sum::<f64>()
                .sqrt()
                / bnorm;
            if true_rel <= tol {
                return Ok(CgSolution {
                    x,
                    iterations: it,
                    residual: true_rel,
                });
            }
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
        }
        if rel < best.0 {
            best = (rel, x.clone());
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LinalgError::MaxIterationsExceeded {
        iterations: max_iter,
        residual: best.0,
        best: best.1,
    })
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Solves `self · X = rhs` for a square system by Gaussian elimination
    /// with partial pivoting. Returns `None` when a pivot vanishes.
    pub fn solve(&self, rhs: &DenseMatrix) -> Option<DenseMatrix> {
        let n = self.rows;
        assert_eq!(n, self.cols, "solve needs a square matrix");
        assert_eq!(n, rhs.rows, "solve rhs shape mismatch");
        let m = rhs.cols;
        let mut a = self.clone();
        let mut x = rhs.clone();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .unwrap();
            if a[(p, k)] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                for j in 0..m {
                    x.data.swap(k * m + j, p * m + j);
                }
            }
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                if f == 0.0 {
                    continue;
                }
                for j in k..n {
                    a.data[i * n + j] -= f * a.data[k * n + j];
                }
                for j in 0..m {
                    x.data[i * m + j] -= f * x.data[k * m + j];
                }
            }
        }
        for k in (0..n).rev() {
            for j in 0..m {
                let mut s = x[(k, j)];
                for i in k + 1..n {
                    s -= a[(k, i)] * x[(i, j)];
                }
                x[(k, j)] = s / a[(k, k)];
            }
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DenseMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops to 1e-12 of the
/// matrix norm, or fails after 100 sweeps.
pub fn sym_eigen(m: &DenseMatrix) -> Result<SymEigen, LinalgError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: m.cols(),
        });
    }
    let mut a = m.clone();
    // symmetrize so rotations act on an exactly symmetric array
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let mut q = DenseMatrix::identity(n);
    let norm = a.frobenius_norm();
    let target = 1e-12 * norm;

    let off = |a: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, k| q[(i, order[k])]);
    Ok(SymEigen { values, vectors })
}

/// Extremal generalized Rayleigh quotients vᵀAv / vᵀMv over the complement
/// of a shared kernel vector.
///
/// Both matrices are restricted to an orthonormal basis of the complement,
/// the reference is whitened through its own eigen-decomposition, and the
/// whitened pencil is diagonalized.
pub fn generalized_eig_bounds(
    a: &DenseMatrix,
    reference: &DenseMatrix,
    kernel: &[f64],
) -> Result<(f64, f64), LinalgError> {
    let n = a.rows();
    if reference.rows() != n || kernel.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: reference.rows().min(kernel.len()),
        });
    }
    let knorm = norm2(kernel);
    let mk = reference.matvec(kernel);
    let rel = norm2(&mk) / (reference.frobenius_norm() * knorm).max(f64::MIN_POSITIVE);
    if rel > 1e-8 {
        return Err(LinalgError::KernelMismatch(rel));
    }

    let basis = complement_basis(kernel);
    let ar = basis.transpose().matmul(a).matmul(&basis);
    let mr = basis.transpose().matmul(reference).matmul(&basis);

    let me = sym_eigen(&mr)?;
    let m = n - 1;
    // columns of W = V Λ^{-1/2}
    let w = DenseMatrix::from_fn(m, m, |i, k| me.vectors[(i, k)] / me.values[k].sqrt());
    let c = w.transpose().matmul(&ar).matmul(&w);
    let ce = sym_eigen(&c)?;
    Ok((ce.values[0], ce.values[m - 1]))
}

/// Orthonormal basis (as n × (n−1) columns) of the complement of `v`,
/// built from a Householder reflector.
fn complement_basis(v: &[f64]) -> DenseMatrix {
    let n = v.len();
    let vn = norm2(v);
    let mut u: Vec<f64> = v.iter().map(|x| x / vn).collect();
    // reflector H maps u to ±e_0; columns 1.. of H span u⊥
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    u[0] += sign;
    let un2 = dot(&u, &u);
    DenseMatrix::from_fn(n, n - 1, |i, k| {
        let j = k + 1;
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 2.0 * u[i] * u[j] / un2
    })
}
