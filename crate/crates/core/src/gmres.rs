//! Full GMRES and BA-GMRES (GMRES on `B A x = B b` with `B` realised by an
//! inner iteration). Arnoldi uses modified Gram–Schmidt; the Hessenberg
//! least-squares problem is updated with Givens rotations.

use std::time::{Duration, Instant};

use crate::adi::AdiInner;
use crate::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};
use crate::history::ConvergenceHistory;
use crate::kaczmarz::{KaczmarzConfig, KaczmarzInner};
use crate::preconditioner::{DepthMode, ExactInner, InnerMethod, InnerPreconditioner, JacobiInner};
use crate::rpcg::{default_split, PcgInner, RpcgFactors, RpcgInner};
use crate::sparse::SparseMatrix;
use crate::vector::{axpy, dist2, dot, norm2, scale};

/// `h_{k+1,k}` at or below this fraction of `‖A v_k‖` counts as breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// A second Gram-Schmidt pass runs when orthogonalization shrinks `w` below
/// this fraction of its norm.
pub const REORTHOGONALIZE: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal Krylov basis and the `(k+1) × k` Hessenberg matrix.
#[derive(Debug, Clone)]
pub struct ArnoldiState {
    pub basis: Vec<Vec<f64>>,
    /// Column `j` holds `h_{0..=j+1, j}`.
    pub hessenberg: Vec<Vec<f64>>,
    pub beta: f64,
    pub breakdown: bool,
}

impl ArnoldiState {
    /// Starts from `r`; `r` must be nonzero.
    pub fn new(r: &[f64]) -> Result<Self> {
        let beta = norm2(r);
        if !(beta > 0.0) {
            return Err(Error::Breakdown("initial vector is zero".into()));
        }
        let mut v = r.to_vec();
        scale(1.0 / beta, &mut v);
        Ok(Self {
            basis: vec![v],
            hessenberg: Vec::new(),
            beta,
            breakdown: false,
        })
    }

    /// Number of completed Arnoldi steps.
    pub fn steps(&self) -> usize {
        self.hessenberg.len()
    }

    /// Dense `H̄_k`.
    pub fn h_bar(&self) -> DenseMatrix {
        let k = self.steps();
        let mut h = DenseMatrix::zeros(k + 1, k);
        for (j, col) in self.hessenberg.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                h[(i, j)] = v;
            }
        }
        h
    }

    /// `x0 + V_k y`.
    pub fn combine(&self, x0: &[f64], y: &[f64]) -> Vec<f64> {
        let mut x = x0.to_vec();
        for (v, &yi) in self.basis.iter().zip(y) {
            axpy(yi, v, &mut x);
        }
        x
    }
}

/// Extends the basis by one vector. Returns the number of inner products taken.
pub fn arnoldi_extend(
    op: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    state: &mut ArnoldiState,
) -> Result<usize> {
    if state.breakdown {
        return Err(Error::Breakdown("Arnoldi already broke down".into()));
    }
    let k = state.steps();
    let mut w = op(&state.basis[k])?;
    let w_norm = norm2(&w);
    let mut col = Vec::with_capacity(k + 2);
    for v in &state.basis {
        let h = dot(v, &w);
        axpy(-h, v, &mut w);
        col.push(h);
    }
    let mut h_next = norm2(&w);
    let mut dots = k + 2;
    // heavy cancellation leaves rounding noise along the basis: one more pass
    if h_next <= REORTHOGONALIZE * w_norm {
        for (v, c) in state.basis.iter().zip(col.iter_mut()) {
            let h = dot(v, &w);
            axpy(-h, v, &mut w);
            *c += h;
        }
        h_next = norm2(&w);
        dots += k + 2;
    }
    col.push(h_next);
    state.hessenberg.push(col);
    if h_next <= BREAKDOWN_TOL * w_norm || h_next == 0.0 {
        state.breakdown = true;
    } else {
        scale(1.0 / h_next, &mut w);
        state.basis.push(w);
    }
    Ok(dots)
}

/// Incremental QR of `H̄_k` by Givens rotations.
#[derive(Debug, Clone, Default)]
pub struct GivensLsq {
    /// Column `j` of the triangular factor.
    r: Vec<Vec<f64>>,
    rotations: Vec<(f64, f64)>,
    g: Vec<f64>,
}

impl GivensLsq {
    pub fn new(beta: f64) -> Self {
        Self {
            r: Vec::new(),
            rotations: Vec::new(),
            g: vec![beta],
        }
    }

    /// Adds column `h_{0..=k+1, k}`; returns `|g_{k+1}| = min ‖βe₁ − H̄y‖`.
    pub fn push_column(&mut self, h: &[f64]) -> f64 {
        let k = self.r.len();
        debug_assert_eq!(h.len(), k + 2);
        let mut col = h.to_vec();
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let (a, b) = (col[k], col[k + 1]);
        let rho = a.hypot(b);
        let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
        col[k] = rho;
        col.truncate(k + 1);
        self.rotations.push((c, s));
        let gk = self.g[k];
        self.g[k] = c * gk;
        self.g.push(-s * gk);
        self.r.push(col);
        self.residual()
    }

    pub fn residual(&self) -> f64 {
        self.g.last().map_or(0.0, |g| g.abs())
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Back substitution for `y`.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let k = self.r.len();
        let scale = self
            .r
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            let rii = self.r[i][i];
            if rii.abs() <= 1e-14 * scale || rii == 0.0 {
                return Err(Error::RankDeficient(i));
            }
            let mut s = y[i];
            for j in (i + 1)..k {
                s -= self.r[j][i] * y[j];
            }
            y[i] = s / rii;
        }
        Ok(y)
    }
}

/// `argmin_y ‖βe₁ − H̄y‖` and the minimal residual.
pub fn hessenberg_lsq(h_bar: &DenseMatrix, beta: f64) -> Result<(Vec<f64>, f64)> {
    let k = h_bar.n_cols();
    check_len(k + 1, h_bar.n_rows())?;
    let mut lsq = GivensLsq::new(beta);
    for j in 0..k {
        let col: Vec<f64> = (0..=j + 1).map(|i| h_bar[(i, j)]).collect();
        lsq.push_column(&col);
    }
    Ok((lsq.solve()?, lsq.residual()))
}

/// Inner method selection for BA-GMRES.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerSpec {
    /// Weighted Jacobi splitting.
    Jacobi { omega: f64 },
    /// Dense LU solve.
    Exact,
    Kaczmarz(KaczmarzConfig),
    Adi { alpha: f64 },
    /// Jacobi-preconditioned CG.
    Pcg,
    Rpcg { split: Option<usize> },
}

impl InnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            InnerSpec::Jacobi { .. } => "jacobi",
            InnerSpec::Exact => "exact",
            InnerSpec::Kaczmarz(_) => "kaczmarz",
            InnerSpec::Adi { .. } => "adi",
            InnerSpec::Pcg => "pcg",
            InnerSpec::Rpcg { .. } => "rpcg",
        }
    }

    /// Default `ℓ_max`.
    pub fn default_max_depth(&self) -> usize {
        match self {
            InnerSpec::Exact => 1,
            InnerSpec::Kaczmarz(_) | InnerSpec::Adi { .. } => 20,
            InnerSpec::Jacobi { .. } | InnerSpec::Pcg | InnerSpec::Rpcg { .. } => 50,
        }
    }

    pub fn build<'a>(&self, a: &'a SparseMatrix) -> Result<Box<dyn InnerMethod + 'a>> {
        Ok(match self {
            InnerSpec::Jacobi { omega } => Box::new(JacobiInner::new(a, *omega)?),
            InnerSpec::Exact => Box::new(ExactInner::new(a)?),
            InnerSpec::Kaczmarz(cfg) => Box::new(KaczmarzInner::new(a, cfg)?),
            InnerSpec::Adi { alpha } => Box::new(AdiInner::new(a, *alpha)?),
            InnerSpec::Pcg => Box::new(PcgInner::new(a)?),
            InnerSpec::Rpcg { split } => {
                let k = split.unwrap_or_else(|| default_split(a.n_rows()));
                Box::new(RpcgInner::new(a, RpcgFactors::from_matrix(a, k)?)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Relative residual target.
    pub tol: f64,
    pub maxit: usize,
    /// `ℓ_max`; `None` uses the inner method's default.
    pub inner_max: Option<usize>,
    /// Inner residual factor `η`.
    pub eta: f64,
    pub depth_mode: DepthMode,
    pub record_iterates: bool,
    /// Known solution, for error tracking.
    pub exact_solution: Option<Vec<f64>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            maxit: 300,
            inner_max: None,
            eta: 0.5,
            depth_mode: DepthMode::FirstApplication,
            record_iterates: false,
            exact_solution: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol = {} must be positive", self.tol)));
        }
        if self.maxit == 0 {
            return Err(Error::InvalidConfig("maxit must be at least 1".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidConfig(format!("η = {} outside (0, 1]", self.eta)));
        }
        if self.inner_max == Some(0) {
            return Err(Error::InvalidConfig("inner depth limit must be at least 1".into()));
        }
        if matches!(self.depth_mode, DepthMode::Fixed(0)) {
            return Err(Error::InvalidConfig("fixed inner depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    Failed,
}

/// Work done by a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperationCounts {
    /// Products with `A` in the outer iteration, including the initial residual.
    pub matvecs: usize,
    /// Extra products with `A` for true-residual checks (outer confirmation
    /// and inner depth selection).
    pub residual_checks: usize,
    /// Inner steps over all outer iterations, excluding the initial application.
    pub inner_steps: usize,
    /// Inner steps of the initial residual's preconditioning.
    pub initial_inner_steps: usize,
    /// Inner products in Gram–Schmidt, including the normalisation.
    pub orthogonalization_dots: usize,
    /// `2n` flops per orthogonalization inner product.
    pub orthogonalization_flops: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub label: String,
    pub status: SolveStatus,
    pub iterations: usize,
    /// `‖b − Ax‖ / ‖b − Ax₀‖`.
    pub relative_residual: f64,
    /// `‖x − x*‖ / ‖x*‖` when the exact solution was supplied.
    pub relative_error: Option<f64>,
    /// Final least-squares residual estimate divided by `β`.
    pub estimate: f64,
    pub breakdown: bool,
    /// Depth mode, `None` for unpreconditioned GMRES.
    pub depth_mode: Option<DepthMode>,
    pub initial_depth: Option<usize>,
    pub inner_depths: Vec<usize>,
    pub counts: OperationCounts,
    pub history: ConvergenceHistory,
    pub x: Vec<f64>,
    pub elapsed: Duration,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn operation_counts(&self) -> OperationCounts {
        self.counts
    }
}

/// Full GMRES on `Ax = b`.
pub fn gmres_solve(a: &SparseMatrix, b: &[f64], x0: &[f64], config: &SolveConfig) -> Result<SolveReport> {
    krylov(a, b, x0, None, config, "gmres")
}

/// BA-GMRES with the given inner method.
pub fn ba_gmres_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    inner: &InnerSpec,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let method = inner
        .build(a)
        .map_err(|e| e.context(format!("building {} inner method", inner.name())))?;
    let max_depth = config.inner_max.unwrap_or_else(|| inner.default_max_depth());
    let precond = InnerPreconditioner::new(a, method, config.depth_mode, max_depth, config.eta);
    ba_gmres_with(a, b, x0, precond, config)
}

/// BA-GMRES with a prebuilt preconditioner.
pub fn ba_gmres_with(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    mut precond: InnerPreconditioner<'_>,
    config: &SolveConfig,
) -> Result<SolveReport> {
    let label = format!("ba-gmres/{}", precond.name());
    krylov(a, b, x0, Some(&mut precond), config, &label)
}

fn krylov(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    mut precond: Option<&mut InnerPreconditioner<'_>>,
    config: &SolveConfig,
    label: &str,
) -> Result<SolveReport> {
    config.validate()?;
    a.require_square()?;
    check_len(a.n_rows(), b.len())?;
    check_len(a.n_cols(), x0.len())?;
    if let Some(xs) = &config.exact_solution {
        check_len(a.n_cols(), xs.len())?;
    }
    let start = Instant::now();
    let n = a.n_rows();
    let mut counts = OperationCounts {
        matvecs: 1,
        ..OperationCounts::default()
    };
    let ax0 = a.spmv(x0)?;
    let r0: Vec<f64> = b.iter().zip(&ax0).map(|(bi, ai)| bi - ai).collect();
    let r0_norm = norm2(&r0);
    let x_star = config.exact_solution.as_deref();
    let rel_error = |x: &[f64]| {
        x_star.map(|xs| {
            let d = norm2(xs);
            let e = dist2(x, xs);
            if d > 0.0 { e / d } else { e }
        })
    };
    let mut report = SolveReport {
        label: label.to_string(),
        status: SolveStatus::Converged,
        iterations: 0,
        relative_residual: 0.0,
        relative_error: rel_error(x0),
        estimate: 0.0,
        breakdown: false,
        depth_mode: precond.as_ref().map(|p| p.mode()),
        initial_depth: None,
        inner_depths: Vec::new(),
        counts,
        history: ConvergenceHistory::new(0.0),
        x: x0.to_vec(),
        elapsed: Duration::ZERO,
    };
    if r0_norm == 0.0 {
        report.history.residual_norms.push(0.0);
        report.elapsed = start.elapsed();
        return Ok(report);
    }

    let u0 = match precond.as_deref_mut() {
        Some(p) => {
            let u = p.apply(&r0)?;
            report.initial_depth = Some(p.last_depth());
            counts.initial_inner_steps = p.last_depth();
            u
        }
        None => r0.clone(),
    };
    let mut state = match ArnoldiState::new(&u0) {
        Ok(s) => s,
        Err(_) => {
            // B r0 = 0 with r0 ≠ 0: the preconditioner annihilates the residual
            report.status = SolveStatus::Failed;
            report.breakdown = true;
            report.relative_residual = 1.0;
            report.history.residual_norms.push(0.0);
            report.elapsed = start.elapsed();
            return Ok(report);
        }
    };
    let beta = state.beta;
    let mut hist = ConvergenceHistory::new(beta);
    hist.residual_norms.push(beta);
    if let Some(xs) = x_star {
        if config.record_iterates {
            hist.errors.push(dist2(x0, xs));
        }
    }
    if config.record_iterates {
        hist.iterates.push(x0.to_vec());
    }
    let mut lsq = GivensLsq::new(beta);
    let mut x = x0.to_vec();
    let mut status = SolveStatus::Failed;
    let mut true_res = r0_norm;

    for _ in 0..config.maxit {
        let mut depth = 0;
        let dots = {
            let mut op = |v: &[f64]| -> Result<Vec<f64>> {
                let av = a.spmv(v)?;
                match precond.as_deref_mut() {
                    Some(p) => {
                        let z = p.apply(&av)?;
                        depth = p.last_depth();
                        Ok(z)
                    }
                    None => Ok(av),
                }
            };
            arnoldi_extend(&mut op, &mut state)?
        };
        counts.matvecs += 1;
        counts.orthogonalization_dots += dots;
        if precond.is_some() {
            report.inner_depths.push(depth);
            counts.inner_steps += depth;
            hist.inner_steps.push(depth);
        }
        let k = state.steps();
        let est = lsq.push_column(&state.hessenberg[k - 1]);
        hist.residual_norms.push(est);
        let want_iterate = config.record_iterates;
        let reached = est <= config.tol * beta || state.breakdown;
        if want_iterate || reached {
            let Ok(y) = lsq.solve() else {
                // singular B·A: the least-squares problem lost rank
                state.breakdown = true;
                break;
            };
            x = state.combine(x0, &y);
            if want_iterate {
                if let Some(xs) = x_star {
                    hist.errors.push(dist2(&x, xs));
                }
                hist.iterates.push(x.clone());
            }
        }
        if reached {
            true_res = dist2(b, &a.spmv(&x)?);
            counts.residual_checks += 1;
            if true_res <= config.tol * r0_norm {
                status = SolveStatus::Converged;
                break;
            }
            if state.breakdown {
                break;
            }
        }
    }

    if status == SolveStatus::Failed {
        if let Ok(y) = lsq.solve() {
            x = state.combine(x0, &y);
        }
        true_res = dist2(b, &a.spmv(&x)?);
        counts.residual_checks += 1;
    }
    if let Some(p) = precond.as_deref() {
        counts.residual_checks += p.residual_checks();
    }
    counts.orthogonalization_flops = 2 * n * counts.orthogonalization_dots;
    hist.elapsed = start.elapsed();
    report.status = status;
    report.iterations = state.steps();
    report.relative_residual = true_res / r0_norm;
    report.relative_error = rel_error(&x);
    report.estimate = lsq.residual() / beta;
    report.breakdown = state.breakdown;
    report.counts = counts;
    report.history = hist;
    report.x = x;
    report.elapsed = start.elapsed();
    Ok(report)
}
