//! Desk-scale dense matrices and factorizations.
//!
//! Dense storage hosts the splittings, block factors and iteration matrices
//! that the oracles inspect. Every conversion from sparse storage goes through
//! a size cap so large problems fail loudly instead of thrashing.

use std::ops::{Index, IndexMut};

use crate::error::{check_len, Error, Result};

/// Largest dimension a sparse matrix may be densified to by default.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major values.
    pub fn from_row_major(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        check_len(n_rows * n_cols, values.len())?;
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_cols.max(1),
                col: pos % n_cols.max(1),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            check_len(n_cols, row.len())?;
            values.extend_from_slice(row);
        }
        Self::from_row_major(n_rows, n_cols, values)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[f64]) {
        for (i, v) in col.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_cols, x.len())?;
        Ok((0..self.n_rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.n_cols, other.n_rows)?;
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.values[i * other.n_cols..(i + 1) * other.n_cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<DenseMatrix> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows * self.n_cols,
                found: other.n_rows * other.n_cols,
            });
        }
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self + shift * I`
    pub fn shifted(&self, shift: f64) -> DenseMatrix {
        let mut m = self.clone();
        for i in 0..self.n_rows.min(self.n_cols) {
            m[(i, i)] += shift;
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_rows.min(self.n_cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.n_rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Extracts the sub-block with the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), cols.len());
        for (bi, i) in rows.clone().enumerate() {
            for (bj, j) in cols.clone().enumerate() {
                out[(bi, bj)] = self[(i, j)];
            }
        }
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &DenseMatrix) {
        for i in 0..block.n_rows {
            for j in 0..block.n_cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Dense inverse through LU. Only for oracles and explicit iteration matrices.
    pub fn inverse(&self) -> Result<DenseMatrix> {
        let lu = LuFactor::new(self)?;
        let n = self.n_rows;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            inv.set_column(j, &lu.solve(&e)?);
        }
        Ok(inv)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.n_rows, self.n_cols, &self.values)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.values[i * self.n_cols + j]
    }
}

fn require_square(m: &DenseMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.n_rows,
            cols: m.n_cols,
        })
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        require_square(a)?;
        let n = a.n_rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in (k + 1)..n {
                        lu[(i, j)] -= factor * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        check_len(n, b.len())?;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Upper-triangular Cholesky factor `U` with `Uᵀ U = M`.
///
/// Only the upper triangle of `m` is read. A non-positive pivot yields
/// [`Error::NotPositiveDefinite`] with the 0-based pivot index.
pub fn cholesky_upper(m: &DenseMatrix) -> Result<DenseMatrix> {
    require_square(m)?;
    let n = m.n_rows;
    let mut u = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut d = m[(i, i)];
        for k in 0..i {
            d -= u[(k, i)] * u[(k, i)];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: i });
        }
        let uii = d.sqrt();
        u[(i, i)] = uii;
        for j in (i + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..i {
                s -= u[(k, i)] * u[(k, j)];
            }
            u[(i, j)] = s / uii;
        }
    }
    Ok(u)
}

/// Solves `U x = b` for upper-triangular `U`.
pub fn solve_upper(u: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = u.n_rows;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= u[(i, j)] * x[j];
        }
        x[i] = s / u[(i, i)];
    }
    x
}

/// Solves `Uᵀ x = b` for upper-triangular `U`.
pub fn solve_upper_transpose(u: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = u.n_rows;
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= u[(k, i)] * x[k];
        }
        x[i] = s / u[(i, i)];
    }
    x
}

/// Solves `UᵀU x = b` given the Cholesky factor `U`.
pub fn cholesky_solve(u: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    solve_upper(u, &solve_upper_transpose(u, b))
}

/// Either a Cholesky or an LU factorization of a square matrix.
#[derive(Debug, Clone)]
pub enum Factorization {
    Cholesky(DenseMatrix),
    Lu(LuFactor),
}

impl Factorization {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            Factorization::Cholesky(u) => {
                check_len(u.n_rows(), b.len())?;
                Ok(cholesky_solve(u, b))
            }
            Factorization::Lu(lu) => lu.solve(b),
        }
    }

    pub fn is_cholesky(&self) -> bool {
        matches!(self, Factorization::Cholesky(_))
    }
}
