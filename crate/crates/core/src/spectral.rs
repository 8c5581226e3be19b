//! Dense spectral computations used by the rate constants and the property
//! tests: eigenvalues, spectral radius, condition numbers, the Kaczmarz
//! geometry constants and the semi-convergence check.
//!
//! Eigenvalues come from a Hessenberg reduction followed by shifted QR
//! (nalgebra's real Schur decomposition); symmetric inputs use the symmetric
//! tridiagonal QR path so their spectra are exactly real.

use nalgebra::linalg::{Schur, SymmetricEigen, SVD};

use crate::dense::{DenseMatrix, DEFAULT_DENSE_CAP};
use crate::error::{check_len, Error, Result};
use crate::sparse::SparseMatrix;

pub type Complex64 = nalgebra::Complex<f64>;

const MAX_QR_SWEEPS: usize = 10_000;

const SCHUR_DEFLATION_TOLS: [f64; 4] = [f64::EPSILON, 8.0 * f64::EPSILON, 1e-13, 1e-12];

/// Relative threshold below which Gram eigenvalues count as zero.
pub const NONZERO_EIG_TOL: f64 = 1e-10;

/// Distance from the unit circle within which an eigenvalue counts as unit-modulus.
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;

/// Relative tolerance for the numerical rank of `H − I`.
pub const SEMISIMPLE_RANK_TOL: f64 = 1e-8;

/// Summary of a dense matrix's spectrum.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    /// Smallest nonzero eigenvalue, only for symmetric positive semidefinite input.
    pub min_nonzero_eig: Option<f64>,
    /// 2-norm condition number, `None` when the matrix is singular.
    pub condition_2: Option<f64>,
}

fn check_square_capped(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        });
    }
    if m.n_rows() > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            dim: m.n_rows(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    Ok(())
}

/// All eigenvalues of a square matrix.
pub fn dense_eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    check_square_capped(m)?;
    if m.is_symmetric() {
        return Ok(symmetric_eigenvalues(m)?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect());
    }
    // the shifted QR can stall at machine epsilon on clustered spectra;
    // relaxing the deflation threshold a few times recovers those cases
    let nm = m.to_nalgebra();
    for eps in SCHUR_DEFLATION_TOLS {
        if let Some(schur) = Schur::try_new(nm.clone(), eps, MAX_QR_SWEEPS) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(Error::NoConvergence)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    check_square_capped(m)?;
    let eig = SymmetricEigen::try_new(m.to_nalgebra(), f64::EPSILON, MAX_QR_SWEEPS)
        .ok_or(Error::NoConvergence)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn spectral_radius(m: &DenseMatrix) -> Result<f64> {
    Ok(dense_eigenvalues(m)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Singular values in descending order.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    let svd = SVD::try_new(m.to_nalgebra(), false, false, f64::EPSILON, MAX_QR_SWEEPS)
        .ok_or(Error::NoConvergence)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Number of singular values above `rel_tol · ‖M‖_F`.
pub fn numerical_rank(m: &DenseMatrix, rel_tol: f64) -> Result<usize> {
    let threshold = rel_tol * m.frobenius_norm();
    Ok(singular_values(m)?.iter().filter(|&&s| s > threshold).count())
}

/// Euclidean condition number `σ_max / σ_min`.
pub fn condition_2(m: &DenseMatrix) -> Result<f64> {
    check_square_capped(m)?;
    let s = singular_values(m)?;
    let (max, min) = (s[0], *s.last().expect("nonempty"));
    let n = m.n_rows() as f64;
    if max == 0.0 || min <= n * f64::EPSILON * max {
        return Err(Error::Singular);
    }
    Ok(max / min)
}

/// Smallest eigenvalue of a symmetric positive semidefinite matrix that
/// exceeds `1e-10 · λ_max`.
pub fn min_nonzero_eig_sym(m: &DenseMatrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(m)?;
    let max = eig.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    eig.into_iter()
        .find(|&v| v > NONZERO_EIG_TOL * max)
        .ok_or(Error::ZeroMatrix)
}

/// Which Gram matrix of `A` to inspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSide {
    /// `AᵀA` (n × n)
    AtA,
    /// `AAᵀ` (m × m)
    AAt,
}

pub fn gram(a: &DenseMatrix, side: GramSide) -> DenseMatrix {
    let at = a.transpose();
    match side {
        GramSide::AtA => at.matmul(a),
        GramSide::AAt => a.matmul(&at),
    }
    .expect("Gram dimensions agree")
}

/// `λ_min^{nz}` of `AᵀA` or `AAᵀ`.
pub fn min_nonzero_eig_gram(a: &DenseMatrix, side: GramSide) -> Result<f64> {
    min_nonzero_eig_sym(&gram(a, side))
}

/// Largest eigenvalue of `A_Jᵀ diag(w̄) A_J` for the rows `J` of `A`.
///
/// Evaluated on the |J| × |J| weighted row Gram matrix, which shares the
/// nonzero spectrum.
pub fn lambda_max_block(a: &SparseMatrix, rows: &[usize], weights: &[f64]) -> Result<f64> {
    check_len(rows.len(), weights.len())?;
    if rows.is_empty() {
        return Err(Error::InvalidConfig("block must be nonempty".into()));
    }
    let tau = rows.len();
    let mut dense_rows = vec![vec![0.0; a.n_cols()]; tau];
    for (r, &i) in rows.iter().enumerate() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            dense_rows[r][j] = v;
        }
    }
    let mut g = DenseMatrix::zeros(tau, tau);
    for p in 0..tau {
        for q in 0..=p {
            let d: f64 = dense_rows[p].iter().zip(&dense_rows[q]).map(|(x, y)| x * y).sum();
            let v = (weights[p] * weights[q]).sqrt() * d;
            g[(p, q)] = v;
            g[(q, p)] = v;
        }
    }
    Ok(symmetric_eigenvalues(&g)?.last().copied().unwrap_or(0.0).max(0.0))
}

/// `W = Aᵀ diag(p_i / ‖a_i‖²) A`. Zero rows are skipped; the probabilities
/// on nonzero rows must sum to one.
pub fn build_w(a: &SparseMatrix, probabilities: &[f64]) -> Result<DenseMatrix> {
    check_len(a.n_rows(), probabilities.len())?;
    if a.n_cols() > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            dim: a.n_cols(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let norms = a.row_norms_sq();
    let mut total = 0.0;
    for (&p, &nrm) in probabilities.iter().zip(&norms) {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidConfig(format!("invalid probability {p}")));
        }
        if nrm > 0.0 {
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "probabilities over nonzero rows sum to {total}, expected 1"
        )));
    }
    let n = a.n_cols();
    let mut w = DenseMatrix::zeros(n, n);
    for i in 0..a.n_rows() {
        if norms[i] == 0.0 || probabilities[i] == 0.0 {
            continue;
        }
        let c = probabilities[i] / norms[i];
        let (cols, vals) = a.row(i);
        for (p, (&j, &vj)) in cols.iter().zip(vals).enumerate() {
            for (&k, &vk) in cols[..=p].iter().zip(vals) {
                let add = c * vj * vk;
                w[(j, k)] += add;
                if j != k {
                    w[(k, j)] += add;
                }
            }
        }
    }
    Ok(w)
}

/// Whether `lim_{i→∞} Hⁱ` exists.
///
/// True when `ρ(H) < 1`, or when every unit-modulus eigenvalue equals 1 and
/// is semisimple. Semisimplicity compares the number of eigenvalues in the
/// cluster at 1 with the nullity of `H − I`, measured by numerical rank.
pub fn is_semi_convergent(h: &DenseMatrix) -> Result<bool> {
    let eig = dense_eigenvalues(h)?;
    let n = h.n_rows();
    let mut at_one = 0usize;
    for z in &eig {
        let modulus = z.norm();
        if modulus > 1.0 + UNIT_CIRCLE_TOL {
            return Ok(false);
        }
        if modulus >= 1.0 - UNIT_CIRCLE_TOL {
            if (z - Complex64::new(1.0, 0.0)).norm() > UNIT_CIRCLE_TOL {
                return Ok(false);
            }
            at_one += 1;
        }
    }
    if at_one == 0 {
        return Ok(true);
    }
    let h_minus_i = h.shifted(-1.0);
    let threshold = SEMISIMPLE_RANK_TOL * h.frobenius_norm().max(1.0);
    let rank = singular_values(&h_minus_i)?
        .iter()
        .filter(|&&s| s > threshold)
        .count();
    Ok(n - rank == at_one)
}

/// Eigenvalues, spectral radius and the derived scalar constants.
pub fn summarize(m: &DenseMatrix) -> Result<SpectralSummary> {
    let eigenvalues = dense_eigenvalues(m)?;
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let psd = m.is_symmetric() && eigenvalues.iter().all(|z| z.re >= -1e-12 * scale);
    let min_nonzero_eig = if psd {
        min_nonzero_eig_sym(m).ok()
    } else {
        None
    };
    Ok(SpectralSummary {
        eigenvalues,
        spectral_radius,
        min_nonzero_eig,
        condition_2: condition_2(m).ok(),
    })
}
