//! Compressed-row sparse matrices, the splittings derived from them, and the
//! synthetic test-matrix generators used by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{DenseMatrix, DEFAULT_DENSE_CAP};
use crate::error::{check_len, Error, Result};

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Validates and wraps raw CSR arrays.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidStructure("row_offsets must start at 0".into()));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidStructure("row_offsets must be non-decreasing".into()));
        }
        let nnz = row_offsets[n_rows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(Error::InvalidStructure(format!(
                "row_offsets declare {nnz} entries but {} indices and {} values were given",
                col_indices.len(),
                values.len()
            )));
        }
        for i in 0..n_rows {
            let cols = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if let Some(&c) = cols.iter().find(|&&c| c >= n_cols) {
                return Err(Error::InvalidStructure(format!(
                    "column index {c} out of range in row {i}"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "column indices of row {i} are not strictly increasing"
                )));
            }
            for (k, v) in values[row_offsets[i]..row_offsets[i + 1]].iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: cols[k] });
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed;
    /// explicit zeros are kept.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, v) in &sorted {
            if r >= n_rows || c >= n_cols {
                return Err(Error::InvalidStructure(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::new(n_rows, n_cols, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Stores every nonzero of a dense matrix.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.n_rows() {
            for j in 0..m.n_cols() {
                if m[(i, j)] != 0.0 {
                    triplets.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.n_rows(), m.n_cols(), &triplets).expect("dense input is finite")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Dot product of row `i` with `x`.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
    }

    /// `y = A x`, accumulated left to right along each row.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_cols, x.len())?;
        Ok((0..self.n_rows).map(|i| self.row_dot(i, x)).collect())
    }

    /// `x = Aᵀ y`.
    pub fn spmv_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_rows, y.len())?;
        let mut x = vec![0.0; self.n_cols];
        for (i, yi) in y.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                x[j] += v * yi;
            }
        }
        Ok(x)
    }

    /// Squared Euclidean norm of every row.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().map(|v| v * v).sum())
            .collect()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &t).expect("transpose of a valid matrix")
    }

    /// Returns `diag(scale) * A`.
    pub fn scale_rows(&self, scale: &[f64]) -> Result<SparseMatrix> {
        check_len(self.n_rows, scale.len())?;
        let mut out = self.clone();
        for i in 0..self.n_rows {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                out.values[k] *= scale[i];
            }
        }
        if let Some(k) = out.values.iter().position(|v| !v.is_finite()) {
            let row = out.row_offsets.partition_point(|&o| o <= k) - 1;
            return Err(Error::NonFinite {
                row,
                col: out.col_indices[k],
            });
        }
        Ok(out)
    }

    /// Densifies with the default cap.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<DenseMatrix> {
        let dim = self.n_rows.max(self.n_cols);
        if dim > cap {
            return Err(Error::DenseCapExceeded { dim, cap });
        }
        let mut m = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        Ok(m)
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            })
        }
    }
}

/// Splits a square matrix into its symmetric part `H = (A + Aᵀ)/2` and
/// skew-symmetric part `S = (A − Aᵀ)/2`.
pub fn symmetric_split(a: &SparseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    a.require_square()?;
    let d = a.to_dense()?;
    let n = d.n_rows();
    let mut h = DenseMatrix::zeros(n, n);
    let mut s = DenseMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = d[(i, i)];
        for j in 0..i {
            let (aij, aji) = (d[(i, j)], d[(j, i)]);
            let sym = 0.5 * (aij + aji);
            let skew = 0.5 * (aij - aji);
            h[(i, j)] = sym;
            h[(j, i)] = sym;
            s[(i, j)] = skew;
            s[(j, i)] = -skew;
        }
    }
    Ok((h, s))
}

/// Jacobi row scaling: `Â = diag(F)⁻¹ A`, `b̂ = diag(F)⁻¹ b`, where `F` is the
/// diagonal of `A` with zero entries replaced by one.
pub fn diagonal_precondition(
    a: &SparseMatrix,
    b: &[f64],
) -> Result<(SparseMatrix, Vec<f64>, Vec<f64>)> {
    a.require_square()?;
    check_len(a.n_rows(), b.len())?;
    let f: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d == 0.0 { 1.0 } else { d })
        .collect();
    let inv: Vec<f64> = f.iter().map(|d| 1.0 / d).collect();
    let a_hat = a.scale_rows(&inv)?;
    let b_hat = b.iter().zip(&inv).map(|(bi, s)| bi * s).collect();
    Ok((a_hat, b_hat, f))
}

/// Symmetric tridiagonal matrix with 10 on the diagonal and 2 beside it.
pub fn gen_tridiagonal(n: usize) -> Result<SparseMatrix> {
    if n == 0 {
        return Err(Error::InvalidConfig("tridiagonal dimension must be positive".into()));
    }
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, 2.0));
        }
        t.push((i, i, 10.0));
        if i + 1 < n {
            t.push((i, i + 1, 2.0));
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

/// Off-diagonal fill probability of [`gen_random`].
pub const RANDOM_DENSITY: f64 = 0.1;

/// Seeded random sparse matrix with uniform(−1, 1) off-diagonal entries at
/// density 0.1. The diagonal is `max(row abs sum, column abs sum) + 1`, so
/// the matrix is strictly diagonally dominant by rows and its symmetric part
/// is positive definite.
pub fn gen_random(n: usize, seed: u64) -> Result<SparseMatrix> {
    if n == 0 {
        return Err(Error::InvalidConfig("random matrix dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    let mut row_sum = vec![0.0; n];
    let mut col_sum = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < RANDOM_DENSITY {
                let v: f64 = rng.random_range(-1.0..1.0);
                row_sum[i] += v.abs();
                col_sum[j] += v.abs();
                t.push((i, j, v));
            }
        }
    }
    for i in 0..n {
        t.push((i, i, row_sum[i].max(col_sum[i]) + 1.0));
    }
    SparseMatrix::from_triplets(n, n, &t)
}
