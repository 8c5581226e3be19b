//! Seeded problem generators shared by the integration tests.
#![allow(dead_code)]

use bagmres::{DenseMatrix, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Entries uniform in (−1, 1).
pub fn random_dense(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_row_major(m, n, random_vec(m * n, rng)).unwrap()
}

/// `(A, x*, b = Ax*)` with a dense random `A`.
pub fn consistent_system(m: usize, n: usize, seed: u64) -> (SparseMatrix, Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let a = SparseMatrix::from_dense(&random_dense(m, n, &mut r));
    let x = random_vec(n, &mut r);
    let b = a.spmv(&x).unwrap();
    (a, x, b)
}

/// Rows of a random `m × n` matrix scaled to unit norm.
pub fn unit_row_system(m: usize, n: usize, seed: u64) -> (SparseMatrix, Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let mut rows = random_dense(m, n, &mut r).to_rows();
    for row in &mut rows {
        let nrm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        row.iter_mut().for_each(|v| *v /= nrm);
    }
    let a = SparseMatrix::from_dense(&DenseMatrix::from_rows(&rows).unwrap());
    let x = random_vec(n, &mut r);
    let b = a.spmv(&x).unwrap();
    (a, x, b)
}

/// `GᵀG/n + I`, symmetric positive definite with κ of order ten.
pub fn spd_dense(n: usize, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    let g = random_dense(n, n, &mut r);
    let mut m = g.transpose().matmul(&g).unwrap().scaled(1.0 / n as f64).shifted(1.0);
    symmetrize(&mut m);
    m
}

/// SPD part `GᵀG/n + ½I` plus a random skew-symmetric part.
pub fn positive_real_dense(n: usize, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    let h = spd_dense(n, seed ^ 0x9e37_79b9).shifted(-0.5);
    let k = random_dense(n, n, &mut r);
    let skew = k.sub(&k.transpose()).unwrap().scaled(0.5);
    h.add(&skew).unwrap()
}

pub fn symmetrize(m: &mut DenseMatrix) {
    let n = m.n_rows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
    let d = bagmres::vector::dist2(x, y);
    let s = bagmres::vector::norm2(y).max(f64::MIN_POSITIVE);
    d / s
}

pub fn frob_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm()
}

/// Plain CG recurrence on a dense matrix; returns every iterate from `x0`.
/// Stops after `iters` steps or once `‖r‖ ≤ tol·‖b‖`.
pub fn dense_cg(r: &DenseMatrix, b: &[f64], x0: &[f64], iters: usize, tol: f64) -> Vec<Vec<f64>> {
    use bagmres::vector::{axpy, dot, norm2};
    let mut x = x0.to_vec();
    let rx = r.matvec(&x).unwrap();
    let mut res: Vec<f64> = b.iter().zip(&rx).map(|(p, q)| p - q).collect();
    let mut p = res.clone();
    let mut rr = dot(&res, &res);
    let b_norm = norm2(b);
    let mut out = vec![x.clone()];
    for _ in 0..iters {
        if rr.sqrt() <= tol * b_norm {
            break;
        }
        let rp = r.matvec(&p).unwrap();
        let alpha = rr / dot(&p, &rp);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &rp, &mut res);
        out.push(x.clone());
        let next = dot(&res, &res);
        let beta = next / rr;
        rr = next;
        for (pi, ri) in p.iter_mut().zip(&res) {
            *pi = ri + beta * *pi;
        }
    }
    out
}

/// The change of variables behind RPCG: with `LᵀL = G`, the system
/// `R x̃ = b̃` has `R = (P Lᵀ)⁻¹ A (L Q)⁻¹` and `x = (L Q)⁻¹ x̃`.
pub struct Transformed {
    pub r: DenseMatrix,
    pub left_inv: DenseMatrix,
    pub lq: DenseMatrix,
    pub lq_inv: DenseMatrix,
}

pub fn transformed(f: &bagmres::rpcg::RpcgFactors, a: &DenseMatrix) -> Transformed {
    let l = f.l_matrix();
    let lq = l.matmul(&f.q_matrix()).unwrap();
    let lq_inv = lq.inverse().unwrap();
    let left_inv = f.p_matrix().matmul(&l.transpose()).unwrap().inverse().unwrap();
    let r = left_inv.matmul(a).unwrap().matmul(&lq_inv).unwrap();
    Transformed { r, left_inv, lq, lq_inv }
}

/// SPD `A` with the lower-left block perturbed, so `C ≠ Bᵀ` and the Schur
/// complement is nonsymmetric while `T` stays SPD.
pub fn nonsymmetric_schur_matrix(n: usize, split: usize, eps: f64, seed: u64) -> DenseMatrix {
    let mut a = spd_dense(n, seed);
    let mut r = rng(seed ^ 0xabc);
    for i in split..n {
        for j in 0..split {
            a[(i, j)] += eps * r.random_range(-1.0..1.0);
        }
    }
    a
}

/// Whether `lim Hⁱ` exists, decided by repeated squaring: the powers
/// `H^{2^j}` must settle to some `P` with `HP = P` within twenty squarings.
pub fn power_limit_exists(h: &DenseMatrix) -> bool {
    let mut p = h.clone();
    for _ in 0..20 {
        let next = p.matmul(&p).unwrap();
        let scale = next.frobenius_norm().max(1.0);
        if !(scale < 1e12) {
            return false;
        }
        if frob_diff(&next, &p) <= 1e-8 * scale {
            let hp = h.matmul(&next).unwrap();
            return frob_diff(&hp, &next) <= 1e-8 * scale;
        }
        p = next;
    }
    false
}

/// The spectral shapes exercised by the semi-convergence comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Inside,
    SemisimpleOne,
    JordanOne,
    MinusOne,
    UnitRotation,
    Outside,
}

pub const SPECTRUM_KINDS: [SpectrumKind; 6] = [
    SpectrumKind::Inside,
    SpectrumKind::SemisimpleOne,
    SpectrumKind::JordanOne,
    SpectrumKind::MinusOne,
    SpectrumKind::UnitRotation,
    SpectrumKind::Outside,
];

/// `V D V⁻¹` where `D` is block diagonal with the requested unit-circle
/// feature and all other eigenvalues of modulus at most 0.9.
pub fn spectrum_case(kind: SpectrumKind, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    let n = r.random_range(4..10usize);
    let mut d = DenseMatrix::zeros(n, n);
    let mut k = 0;
    let rotation = |d: &mut DenseMatrix, k: usize, modulus: f64, theta: f64| {
        d[(k, k)] = modulus * theta.cos();
        d[(k, k + 1)] = -modulus * theta.sin();
        d[(k + 1, k)] = modulus * theta.sin();
        d[(k + 1, k + 1)] = modulus * theta.cos();
    };
    match kind {
        SpectrumKind::Inside => {}
        SpectrumKind::SemisimpleOne => {
            let mult = r.random_range(1..3usize);
            for _ in 0..mult {
                d[(k, k)] = 1.0;
                k += 1;
            }
        }
        SpectrumKind::JordanOne => {
            d[(0, 0)] = 1.0;
            d[(0, 1)] = 1.0;
            d[(1, 1)] = 1.0;
            k = 2;
        }
        SpectrumKind::MinusOne => {
            d[(0, 0)] = -1.0;
            k = 1;
        }
        SpectrumKind::UnitRotation => {
            rotation(&mut d, 0, 1.0, r.random_range(0.3..2.8));
            k = 2;
        }
        SpectrumKind::Outside => {
            d[(0, 0)] = if r.random::<bool>() { 1.0 } else { -1.0 } * r.random_range(1.05..1.5);
            k = 1;
        }
    }
    while k < n {
        if k + 1 < n && r.random::<bool>() {
            rotation(&mut d, k, r.random_range(0.0..0.9), r.random_range(0.1..3.0));
            k += 2;
        } else {
            d[(k, k)] = r.random_range(-0.9..0.9);
            k += 1;
        }
    }
    let v = random_dense(n, n, &mut r).scaled(0.3).shifted(1.0);
    v.matmul(&d).unwrap().matmul(&v.inverse().unwrap()).unwrap()
}

/// `0.5I`, `I`, the unit Jordan block and `−I`, with the expected verdicts.
pub fn semi_convergence_hand_cases() -> Vec<(&'static str, DenseMatrix, bool)> {
    vec![
        ("0.5I", DenseMatrix::identity(3).scaled(0.5), true),
        ("I", DenseMatrix::identity(3), true),
        ("Jordan(1)", DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap(), false),
        ("-I", DenseMatrix::identity(3).scaled(-1.0), false),
    ]
}
