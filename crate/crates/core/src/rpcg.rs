//! Block factorization `A = P·blkdiag(T, S)·Q` with Schur complement
//! `S = D − C T⁻¹ B`, the restricted preconditioned conjugate gradient method
//! built on it, and plain (preconditioned) CG.
//!
//! With `G = blkdiag(T, Ŝ)` where `Ŝ` symmetrizes `S` from its upper triangle,
//! the preconditioner is `M = P G Q` and the auxiliary map is `W = Q⁻¹ Pᵀ`.
//! RPCG is CG on `(P Lᵀ)⁻¹ A (L Q)⁻¹` for `G = Lᵀ L`, run in the original
//! variables.

use std::time::Instant;

use crate::dense::{cholesky_solve, cholesky_upper, DenseMatrix};
use crate::error::{check_len, Error, Result};
use crate::history::ConvergenceHistory;
use crate::preconditioner::InnerMethod;
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, dot, norm2};

/// Shift retries applied when `Ŝ` fails Cholesky.
pub const SHIFT_RETRIES: usize = 4;
/// Initial shift relative to `‖Ŝ‖_F`.
pub const SHIFT_FACTOR: f64 = 1e-8;

/// `A = [[T, B], [C, D]]` split after row and column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub split: usize,
    pub t: DenseMatrix,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
    pub d: DenseMatrix,
}

impl BlockPartition {
    pub fn from_dense(a: &DenseMatrix, split: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.n_rows(),
                cols: a.n_cols(),
            });
        }
        let n = a.n_rows();
        if split == 0 || split >= n {
            return Err(Error::InvalidConfig(format!("split index {split} outside (0, {n})")));
        }
        Ok(Self {
            split,
            t: a.block(0..split, 0..split),
            b: a.block(0..split, split..n),
            c: a.block(split..n, 0..split),
            d: a.block(split..n, split..n),
        })
    }

    pub fn dim(&self) -> usize {
        self.split + self.d.n_rows()
    }

    pub fn assemble(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.dim(), self.dim());
        a.set_block(0, 0, &self.t);
        a.set_block(0, self.split, &self.b);
        a.set_block(self.split, 0, &self.c);
        a.set_block(self.split, self.split, &self.d);
        a
    }
}

pub fn build_partition(a: &SparseMatrix, split: usize) -> Result<BlockPartition> {
    BlockPartition::from_dense(&a.to_dense()?, split)
}

/// `⌊n/2⌋`.
pub fn default_split(n: usize) -> usize {
    n / 2
}

/// Upper-triangular `U` with `UᵀU = M`; reads the upper triangle only.
pub fn dense_cholesky(m: &DenseMatrix) -> Result<DenseMatrix> {
    cholesky_upper(m)
}

/// `upper(S) + strict_upper(S)ᵀ`.
pub fn symmetrize_upper(s: &DenseMatrix) -> DenseMatrix {
    let n = s.n_rows();
    let mut out = s.clone();
    for i in 0..n {
        for j in 0..i {
            out[(i, j)] = s[(j, i)];
        }
    }
    out
}

fn solve_columns(u: &DenseMatrix, rhs: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(rhs.n_rows(), rhs.n_cols());
    for j in 0..rhs.n_cols() {
        out.set_column(j, &cholesky_solve(u, &rhs.column(j)));
    }
    out
}

fn factor_t(p: &BlockPartition) -> Result<DenseMatrix> {
    let scale = p.t.max_abs().max(f64::MIN_POSITIVE);
    let k = p.split;
    for i in 0..k {
        for j in 0..i {
            if (p.t[(i, j)] - p.t[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::InvalidStructure("leading block T is not symmetric".into()));
            }
        }
    }
    cholesky_upper(&p.t).map_err(|e| e.context("leading block T"))
}

/// `S = D − C T⁻¹ B`.
pub fn schur_complement(p: &BlockPartition) -> Result<DenseMatrix> {
    let e = factor_t(p)?;
    let t_inv_b = solve_columns(&e, &p.b);
    p.d.sub(&p.c.matmul(&t_inv_b)?)
}

/// Dense factors of the block preconditioner. `M⁻¹` and `W⁻¹` are applied
/// through triangular solves with the stored Cholesky factors.
#[derive(Debug, Clone)]
pub struct RpcgFactors {
    split: usize,
    /// `EᵀE = T`
    pub e: DenseMatrix,
    /// `FᵀF = Ŝ + γI`
    pub f: DenseMatrix,
    pub schur: DenseMatrix,
    pub s_hat: DenseMatrix,
    /// Diagonal shift needed for `Ŝ` to factor; zero in the usual case.
    pub shift: f64,
    t: DenseMatrix,
    t_inv_b: DenseMatrix,
    t_inv_ct: DenseMatrix,
}

impl RpcgFactors {
    pub fn new(p: &BlockPartition) -> Result<Self> {
        let e = factor_t(p)?;
        let t_inv_b = solve_columns(&e, &p.b);
        let t_inv_ct = solve_columns(&e, &p.c.transpose());
        let schur = p.d.sub(&p.c.matmul(&t_inv_b)?)?;
        let s_hat = symmetrize_upper(&schur);
        let (f, shift) = factor_shifted(&s_hat)?;
        Ok(Self {
            split: p.split,
            e,
            f,
            schur,
            s_hat,
            shift,
            t: p.t.clone(),
            t_inv_b,
            t_inv_ct,
        })
    }

    pub fn from_matrix(a: &SparseMatrix, split: usize) -> Result<Self> {
        Self::new(&build_partition(a, split)?)
    }

    pub fn dim(&self) -> usize {
        self.split + self.schur.n_rows()
    }

    pub fn split(&self) -> usize {
        self.split
    }

    /// `P = [[I, 0], [C T⁻¹, I]]`.
    pub fn p_matrix(&self) -> DenseMatrix {
        let mut p = DenseMatrix::identity(self.dim());
        p.set_block(self.split, 0, &self.t_inv_ct.transpose());
        p
    }

    /// `Q = [[I, T⁻¹ B], [0, I]]`.
    pub fn q_matrix(&self) -> DenseMatrix {
        let mut q = DenseMatrix::identity(self.dim());
        q.set_block(0, self.split, &self.t_inv_b);
        q
    }

    /// `blkdiag(T, S)`.
    pub fn h_matrix(&self) -> DenseMatrix {
        self.blkdiag(&self.schur)
    }

    /// `G = blkdiag(T, Ŝ + γI)`.
    pub fn g_matrix(&self) -> DenseMatrix {
        self.blkdiag(&self.s_hat.shifted(self.shift))
    }

    /// `L = blkdiag(E, F)`, upper triangular with `LᵀL = G`.
    pub fn l_matrix(&self) -> DenseMatrix {
        let mut l = DenseMatrix::zeros(self.dim(), self.dim());
        l.set_block(0, 0, &self.e);
        l.set_block(self.split, self.split, &self.f);
        l
    }

    fn blkdiag(&self, lower: &DenseMatrix) -> DenseMatrix {
        let mut h = DenseMatrix::zeros(self.dim(), self.dim());
        h.set_block(0, 0, &self.t);
        h.set_block(self.split, self.split, lower);
        h
    }

    /// `z = M⁻¹ r = Q⁻¹ G⁻¹ P⁻¹ r`.
    pub fn apply_m_inv(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), r.len())?;
        let k = self.split;
        let (r1, r2) = r.split_at(k);
        // P⁻¹: y2 = r2 − C T⁻¹ r1
        let mut y2 = r2.to_vec();
        for (i, yi) in y2.iter_mut().enumerate() {
            *yi -= (0..k).map(|j| self.t_inv_ct[(j, i)] * r1[j]).sum::<f64>();
        }
        let u1 = cholesky_solve(&self.e, r1);
        let u2 = cholesky_solve(&self.f, &y2);
        // Q⁻¹: z1 = u1 − T⁻¹B u2
        let mut z = u1;
        for (j, zj) in z.iter_mut().enumerate() {
            *zj -= dot(self.t_inv_b.row(j), &u2);
        }
        z.extend_from_slice(&u2);
        Ok(z)
    }

    /// `v = W⁻¹ z = P⁻ᵀ Q z`.
    pub fn apply_w_inv(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), z.len())?;
        let k = self.split;
        let (z1, z2) = z.split_at(k);
        let mut v = z.to_vec();
        for j in 0..k {
            v[j] = z1[j] + dot(self.t_inv_b.row(j), z2) - dot(self.t_inv_ct.row(j), z2);
        }
        Ok(v)
    }
}

/// Cholesky of `Ŝ`, retrying with `Ŝ + γI`, `γ = 1e-8‖Ŝ‖_F` doubled up to four times.
fn factor_shifted(s_hat: &DenseMatrix) -> Result<(DenseMatrix, f64)> {
    match cholesky_upper(s_hat) {
        Ok(f) => return Ok((f, 0.0)),
        Err(Error::NotPositiveDefinite { .. }) => {}
        Err(e) => return Err(e),
    }
    let mut gamma = SHIFT_FACTOR * s_hat.frobenius_norm();
    let mut last = Error::NotPositiveDefinite { pivot: 0 };
    for _ in 0..=SHIFT_RETRIES {
        match cholesky_upper(&s_hat.shifted(gamma)) {
            Ok(f) => return Ok((f, gamma)),
            Err(e) => last = e,
        }
        gamma *= 2.0;
    }
    Err(last.context(
        "symmetrized Schur complement is not positive definite even after shifting; \
         choose a different split index",
    ))
}

/// Tolerances for the CG family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub tol: f64,
    pub maxit: usize,
    pub record_iterates: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            maxit: 300,
            record_iterates: false,
        }
    }
}

struct Recorder<'h> {
    hist: &'h mut ConvergenceHistory,
    record_iterates: bool,
}

impl Recorder<'_> {
    fn push(&mut self, x: &[f64], r_norm: f64) {
        self.hist.residual_norms.push(r_norm);
        if self.record_iterates {
            self.hist.iterates.push(x.to_vec());
        }
    }
}

/// Preconditioned CG; `precond` applies `M⁻¹`. The residual is updated
/// recursively and checked against `tol · ‖b‖`.
pub fn pcg_solve(
    a: &SparseMatrix,
    mut precond: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    x0: &[f64],
    opts: &CgOptions,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    a.require_square()?;
    check_len(a.n_rows(), b.len())?;
    check_len(a.n_cols(), x0.len())?;
    let start = Instant::now();
    let b_norm = norm2(b);
    let mut hist = ConvergenceHistory::new(b_norm);
    let mut x = x0.to_vec();
    let ax = a.spmv(&x)?;
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut rec = Recorder {
        hist: &mut hist,
        record_iterates: opts.record_iterates,
    };
    let mut r_norm = norm2(&r);
    rec.push(&x, r_norm);
    let mut z = precond(&r)?;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..opts.maxit {
        if r_norm <= opts.tol * b_norm {
            break;
        }
        let ap = a.spmv(&p)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Breakdown("matrix not SPD along Krylov direction".into()));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        r_norm = norm2(&r);
        rec.push(&x, r_norm);
        z = precond(&r)?;
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    hist.elapsed = start.elapsed();
    Ok((x, hist))
}

/// Jacobi preconditioner `v ↦ D⁻¹v`; zero diagonal entries act as one.
pub fn jacobi_preconditioner(a: &SparseMatrix) -> impl Fn(&[f64]) -> Result<Vec<f64>> {
    let inv: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d == 0.0 { 1.0 } else { 1.0 / d })
        .collect();
    move |r: &[f64]| Ok(r.iter().zip(&inv).map(|(ri, di)| ri * di).collect())
}

/// RPCG in the original variables:
/// `α = vᵀr/(qᵀAp)`, `z = M⁻¹r`, `v = W⁻¹z`, `p ← z + βp`, `q ← v + βq`.
pub fn rpcg_solve(
    a: &SparseMatrix,
    f: &RpcgFactors,
    b: &[f64],
    x0: &[f64],
    opts: &CgOptions,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    a.require_square()?;
    check_len(f.dim(), a.n_rows())?;
    check_len(a.n_rows(), b.len())?;
    check_len(a.n_cols(), x0.len())?;
    let start = Instant::now();
    let b_norm = norm2(b);
    let mut hist = ConvergenceHistory::new(b_norm);
    let mut x = x0.to_vec();
    let ax = a.spmv(&x)?;
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut rec = Recorder {
        hist: &mut hist,
        record_iterates: opts.record_iterates,
    };
    let mut r_norm = norm2(&r);
    rec.push(&x, r_norm);
    let mut p = f.apply_m_inv(&r)?;
    let mut q = f.apply_w_inv(&p)?;
    let mut vr = dot(&q, &r);
    for _ in 0..opts.maxit {
        if r_norm <= opts.tol * b_norm {
            break;
        }
        let ap = a.spmv(&p)?;
        let qap = dot(&q, &ap);
        if qap == 0.0 || !qap.is_finite() {
            return Err(Error::Breakdown("qᵀAp vanished".into()));
        }
        let alpha = vr / qap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        r_norm = norm2(&r);
        rec.push(&x, r_norm);
        let z = f.apply_m_inv(&r)?;
        let v = f.apply_w_inv(&z)?;
        let vr_next = dot(&v, &r);
        let beta = vr_next / vr;
        vr = vr_next;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
            q[i] = v[i] + beta * q[i];
        }
    }
    hist.elapsed = start.elapsed();
    Ok((x, hist))
}

/// Recorded CG coefficients replayed after the first application.
#[derive(Debug, Clone, Default)]
struct Coefficients {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Coefficients {
    fn get_or(&mut self, k: usize, compute: impl FnOnce() -> Result<(f64, f64)>) -> Result<(f64, f64)> {
        if k >= self.alpha.len() {
            debug_assert_eq!(k, self.alpha.len());
            let (a, b) = compute()?;
            self.alpha.push(a);
            self.beta.push(b);
        }
        Ok((self.alpha[k], self.beta[k]))
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Jacobi-preconditioned CG as an inner method. One inner step is one CG iteration.
pub struct PcgInner<'a> {
    a: &'a SparseMatrix,
    inv_diag: Vec<f64>,
    coef: Coefficients,
    r: Vec<f64>,
    p: Vec<f64>,
    rz: f64,
}

impl<'a> PcgInner<'a> {
    pub fn new(a: &'a SparseMatrix) -> Result<Self> {
        a.require_square()?;
        let inv_diag = a
            .diagonal()
            .iter()
            .map(|&d| if d == 0.0 { 1.0 } else { 1.0 / d })
            .collect();
        Ok(Self {
            a,
            inv_diag,
            coef: Coefficients::default(),
            r: Vec::new(),
            p: Vec::new(),
            rz: 0.0,
        })
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        r.iter().zip(&self.inv_diag).map(|(a, b)| a * b).collect()
    }
}

impl InnerMethod for PcgInner<'_> {
    fn name(&self) -> &'static str {
        "pcg"
    }

    fn dim(&self) -> usize {
        self.inv_diag.len()
    }

    fn begin(&mut self, v: &[f64]) -> Result<()> {
        self.r = v.to_vec();
        self.p = self.precondition(v);
        self.rz = dot(&self.r, &self.p);
        Ok(())
    }

    fn step(&mut self, k: usize, _v: &[f64], z: &mut [f64]) -> Result<()> {
        let ap = self.a.spmv(&self.p)?;
        let (rz, p) = (self.rz, &self.p);
        let mut trial_r = self.r.clone();
        let (alpha, beta) = self.coef.get_or(k, || {
            let pap = dot(p, &ap);
            if rz != 0.0 && !(pap > 0.0) {
                return Err(Error::Breakdown("matrix not SPD along Krylov direction".into()));
            }
            let alpha = ratio(rz, pap);
            axpy(-alpha, &ap, &mut trial_r);
            let zt: Vec<f64> = trial_r.iter().zip(&self.inv_diag).map(|(a, b)| a * b).collect();
            Ok((alpha, ratio(dot(&trial_r, &zt), rz)))
        })?;
        axpy(alpha, &self.p, z);
        axpy(-alpha, &ap, &mut self.r);
        let zr = self.precondition(&self.r);
        self.rz = dot(&self.r, &zr);
        for (pi, zi) in self.p.iter_mut().zip(&zr) {
            *pi = zi + beta * *pi;
        }
        Ok(())
    }
}

/// RPCG as an inner method. One inner step is one RPCG iteration.
pub struct RpcgInner<'a> {
    a: &'a SparseMatrix,
    factors: RpcgFactors,
    coef: Coefficients,
    r: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
    vr: f64,
}

impl<'a> RpcgInner<'a> {
    pub fn new(a: &'a SparseMatrix, factors: RpcgFactors) -> Result<Self> {
        check_len(a.n_rows(), factors.dim())?;
        Ok(Self {
            a,
            factors,
            coef: Coefficients::default(),
            r: Vec::new(),
            p: Vec::new(),
            q: Vec::new(),
            vr: 0.0,
        })
    }
}

impl InnerMethod for RpcgInner<'_> {
    fn name(&self) -> &'static str {
        "rpcg"
    }

    fn dim(&self) -> usize {
        self.factors.dim()
    }

    fn begin(&mut self, v: &[f64]) -> Result<()> {
        self.r = v.to_vec();
        self.p = self.factors.apply_m_inv(v)?;
        self.q = self.factors.apply_w_inv(&self.p)?;
        self.vr = dot(&self.q, &self.r);
        Ok(())
    }

    fn step(&mut self, k: usize, _v: &[f64], z: &mut [f64]) -> Result<()> {
        let ap = self.a.spmv(&self.p)?;
        let (vr, q, factors) = (self.vr, &self.q, &self.factors);
        let mut trial_r = self.r.clone();
        let (alpha, beta) = self.coef.get_or(k, || {
            let qap = dot(q, &ap);
            if vr != 0.0 && (qap == 0.0 || !qap.is_finite()) {
                return Err(Error::Breakdown("qᵀAp vanished".into()));
            }
            let alpha = ratio(vr, qap);
            axpy(-alpha, &ap, &mut trial_r);
            let v = factors.apply_w_inv(&factors.apply_m_inv(&trial_r)?)?;
            Ok((alpha, ratio(dot(&v, &trial_r), vr)))
        })?;
        axpy(alpha, &self.p, z);
        axpy(-alpha, &ap, &mut self.r);
        let zr = self.factors.apply_m_inv(&self.r)?;
        let vv = self.factors.apply_w_inv(&zr)?;
        self.vr = dot(&vv, &self.r);
        for i in 0..self.p.len() {
            self.p[i] = zr[i] + beta * self.p[i];
            self.q[i] = vv[i] + beta * self.q[i];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap()
    }

    #[test]
    fn partition_and_schur_by_hand() {
        let p = BlockPartition::from_dense(&two_by_two(), 1).unwrap();
        assert_eq!(p.t.values(), &[4.0]);
        assert_eq!(p.b.values(), &[1.0]);
        assert_eq!(p.c.values(), &[1.0]);
        assert_eq!(p.d.values(), &[3.0]);
        assert_eq!(schur_complement(&p).unwrap().values(), &[2.75]);
        assert!(BlockPartition::from_dense(&two_by_two(), 0).is_err());
        assert!(BlockPartition::from_dense(&two_by_two(), 2).is_err());
    }

    #[test]
    fn factors_by_hand() {
        let f = RpcgFactors::new(&BlockPartition::from_dense(&two_by_two(), 1).unwrap()).unwrap();
        assert_eq!(f.p_matrix().to_rows(), vec![vec![1.0, 0.0], vec![0.25, 1.0]]);
        assert_eq!(f.q_matrix().to_rows(), vec![vec![1.0, 0.25], vec![0.0, 1.0]]);
        assert_eq!(f.shift, 0.0);
    }

    #[test]
    fn symmetrize_examples() {
        let s = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(symmetrize_upper(&s).to_rows(), vec![vec![2.0, 1.0], vec![1.0, 3.0]]);
    }

    #[test]
    fn cholesky_examples() {
        let u = dense_cholesky(&DenseMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_eq!(u.to_rows(), vec![vec![2.0, 0.0], vec![0.0, 3.0]]);
        let indefinite = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(
            dense_cholesky(&indefinite).unwrap_err(),
            Error::NotPositiveDefinite { pivot: 1 }
        );
    }

    #[test]
    fn nonsymmetric_t_is_rejected() {
        let a = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![0.0, 4.0, 0.0],
            vec![0.0, 0.0, 4.0],
        ])
        .unwrap();
        let p = BlockPartition::from_dense(&a, 2).unwrap();
        assert!(matches!(RpcgFactors::new(&p), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn cg_on_identity_and_diagonal() {
        let i = SparseMatrix::identity(4);
        let b = [1.0, 2.0, 3.0, 4.0];
        let (x, h) = pcg_solve(&i, |r| Ok(r.to_vec()), &b, &[0.0; 4], &CgOptions::default()).unwrap();
        assert_eq!(h.iterations(), 1);
        assert_eq!(x, b.to_vec());
        let d = SparseMatrix::from_dense(&DenseMatrix::from_diagonal(&[2.0, 5.0, 7.0]));
        let (_, h) = pcg_solve(&d, jacobi_preconditioner(&d), &[1.0, 1.0, 1.0], &[0.0; 3], &CgOptions::default())
            .unwrap();
        assert_eq!(h.iterations(), 1);
    }

    #[test]
    fn block_diagonal_spd_converges_at_once() {
        let a = SparseMatrix::from_dense(&DenseMatrix::from_diagonal(&[3.0, 1.0, 4.0, 2.0]));
        let f = RpcgFactors::from_matrix(&a, 2).unwrap();
        assert_eq!(f.p_matrix(), DenseMatrix::identity(4));
        assert_eq!(f.q_matrix(), DenseMatrix::identity(4));
        let (x, h) = rpcg_solve(&a, &f, &[3.0, 1.0, 4.0, 2.0], &[0.0; 4], &CgOptions::default()).unwrap();
        assert_eq!(h.iterations(), 1);
        assert!(crate::vector::dist2(&x, &[1.0; 4]) < 1e-14);
    }
}
