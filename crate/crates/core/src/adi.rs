//! Alternating-direction implicit iteration on the symmetric / skew-symmetric
//! splitting `Â = H + S` of the Jacobi-scaled matrix:
//!
//! ```text
//! (H + αI) x_{k+½} = (αI − S) x_k     + b̂
//! (S + αI) x_{k+1} = (αI − H) x_{k+½} + b̂
//! ```

use std::time::Instant;

use crate::dense::{cholesky_upper, DenseMatrix, Factorization, LuFactor};
use crate::error::{check_len, Error, Result};
use crate::history::ConvergenceHistory;
use crate::preconditioner::InnerMethod;
use crate::sparse::{diagonal_precondition, symmetric_split, SparseMatrix};
use crate::vector::{dist2, norm2};

/// Shifted half-step factorizations, reused across sweeps.
#[derive(Debug, Clone)]
pub struct AdiOperator {
    pub alpha: f64,
    pub h: DenseMatrix,
    pub s: DenseMatrix,
    factor_h: Factorization,
    factor_s: Factorization,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("ADI shift α = {alpha} must be positive")))
    }
}

/// Factors `H + αI` (Cholesky, LU when `H` is indefinite) and `S + αI` (LU).
pub fn adi_setup(a_hat: &SparseMatrix, alpha: f64) -> Result<AdiOperator> {
    check_alpha(alpha)?;
    let (h, s) = symmetric_split(a_hat)?;
    let h_shift = h.shifted(alpha);
    let factor_h = match cholesky_upper(&h_shift) {
        Ok(u) => Factorization::Cholesky(u),
        Err(Error::NotPositiveDefinite { .. }) => {
            Factorization::Lu(LuFactor::new(&h_shift).map_err(|e| e.context("H + αI"))?)
        }
        Err(e) => return Err(e),
    };
    let factor_s = Factorization::Lu(LuFactor::new(&s.shifted(alpha)).map_err(|e| e.context("S + αI"))?);
    Ok(AdiOperator {
        alpha,
        h,
        s,
        factor_h,
        factor_s,
    })
}

impl AdiOperator {
    pub fn dim(&self) -> usize {
        self.h.n_rows()
    }

    /// Whether `H + αI` was factored by Cholesky.
    pub fn h_is_cholesky(&self) -> bool {
        self.factor_h.is_cholesky()
    }

    /// `(αI − M) x + b`
    fn shifted_rhs(&self, m: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let mx = m.matvec(x)?;
        Ok(x
            .iter()
            .zip(&mx)
            .zip(b)
            .map(|((xi, mi), bi)| self.alpha * xi - mi + bi)
            .collect())
    }

    /// One full sweep (both half steps).
    pub fn sweep(&self, x: &[f64], b_hat: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), b_hat.len())?;
        let half = self.factor_h.solve(&self.shifted_rhs(&self.s, x, b_hat)?)?;
        self.factor_s.solve(&self.shifted_rhs(&self.h, &half, b_hat)?)
    }
}

/// `T_α = (S+αI)⁻¹(αI−H)(H+αI)⁻¹(αI−S)` and the constant `c` with
/// `sweep(x) = T_α x + c`.
pub fn adi_iteration_matrix(a_hat: &SparseMatrix, b_hat: &[f64], alpha: f64) -> Result<(DenseMatrix, Vec<f64>)> {
    check_alpha(alpha)?;
    check_len(a_hat.n_rows(), b_hat.len())?;
    let (h, s) = symmetric_split(a_hat)?;
    let n = h.n_rows();
    let h_plus = h.shifted(alpha).inverse()?;
    let s_plus = s.shifted(alpha).inverse()?;
    let alpha_minus_h = DenseMatrix::identity(n).scaled(alpha).sub(&h)?;
    let alpha_minus_s = DenseMatrix::identity(n).scaled(alpha).sub(&s)?;
    let left = s_plus.matmul(&alpha_minus_h)?.matmul(&h_plus)?;
    let t = left.matmul(&alpha_minus_s)?;
    let c: Vec<f64> = left
        .matvec(b_hat)?
        .iter()
        .zip(s_plus.matvec(b_hat)?)
        .map(|(p, q)| p + q)
        .collect();
    Ok((t, c))
}

/// Jacobi scaling followed by ADI sweeps from `x = 0` until
/// `‖b̂ − Âx‖ ≤ tol·‖b̂‖` or `maxit` sweeps.
pub fn adi_solve(
    a: &SparseMatrix,
    b: &[f64],
    alpha: f64,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    let start = Instant::now();
    let (a_hat, b_hat, _) = diagonal_precondition(a, b)?;
    let op = adi_setup(&a_hat, alpha)?;
    let b_norm = norm2(&b_hat);
    let mut hist = ConvergenceHistory::new(b_norm);
    let mut x = vec![0.0; a.n_cols()];
    let mut res = b_norm;
    hist.residual_norms.push(res);
    for _ in 0..maxit {
        if res <= tol * b_norm {
            break;
        }
        x = op.sweep(&x, &b_hat)?;
        res = dist2(&b_hat, &a_hat.spmv(&x)?);
        hist.residual_norms.push(res);
    }
    hist.elapsed = start.elapsed();
    Ok((x, hist))
}

/// ADI as an inner method for `Az = v`: sweeps on `Â z = F⁻¹ v`. One inner
/// step is one sweep.
pub struct AdiInner {
    op: AdiOperator,
    inv_scale: Vec<f64>,
    rhs: Vec<f64>,
}

impl AdiInner {
    pub fn new(a: &SparseMatrix, alpha: f64) -> Result<Self> {
        let zero = vec![0.0; a.n_rows()];
        let (a_hat, _, scale) = diagonal_precondition(a, &zero)?;
        Ok(Self {
            op: adi_setup(&a_hat, alpha)?,
            inv_scale: scale.iter().map(|f| 1.0 / f).collect(),
            rhs: Vec::new(),
        })
    }

    pub fn operator(&self) -> &AdiOperator {
        &self.op
    }
}

impl InnerMethod for AdiInner {
    fn name(&self) -> &'static str {
        "adi"
    }

    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn begin(&mut self, v: &[f64]) -> Result<()> {
        self.rhs = v.iter().zip(&self.inv_scale).map(|(a, b)| a * b).collect();
        Ok(())
    }

    fn step(&mut self, _k: usize, _v: &[f64], z: &mut [f64]) -> Result<()> {
        let next = self.op.sweep(z, &self.rhs)?;
        z.copy_from_slice(&next);
        Ok(())
    }
}
