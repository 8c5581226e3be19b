//! Row-action solvers: cyclic and randomized Kaczmarz with a constant step,
//! and the averaged block variant with an extrapolated adaptive step.
//!
//! A single-row step projects onto the hyperplane `a_iᵀx = b_i`:
//! `x ← x + α (b_i − a_iᵀx)/‖a_i‖² a_i`. A block step moves along
//! `Σ_{i∈J} w̄_i r_i a_i` with `r_i = a_iᵀx − b_i` and `w̄_i = w_i/‖a_i‖²`.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::history::ConvergenceHistory;
use crate::preconditioner::InnerMethod;
use crate::sparse::SparseMatrix;
use crate::spectral;
use crate::vector::{dist2, dot, norm2};

/// Largest number of blocks enumerated when computing `λ_max^{block}` exactly.
pub const BLOCK_ENUMERATION_LIMIT: u128 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    /// Fixed relaxation `α ∈ (0, 2)`. For blocks of size τ ≥ 2 the step is
    /// `α · w_min/(w_max² λ_max^{block})`, so `α = 2 − δ` is the theorem step.
    Constant(f64),
    /// Extrapolated step `α_k = (2 − δ) L_k`, `δ ∈ (0, 1]`.
    Adaptive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSelection {
    /// Nonzero rows in index order; blocks are consecutive runs of τ rows, wrapping.
    Cyclic,
    /// Rows drawn with probability `‖a_i‖²/‖A‖_F²`; blocks drawn without replacement.
    Randomized(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaczmarzConfig {
    pub step_mode: StepMode,
    pub row_selection: RowSelection,
    pub block_size: usize,
    pub max_steps: usize,
    pub residual_factor: f64,
}

impl Default for KaczmarzConfig {
    fn default() -> Self {
        Self {
            step_mode: StepMode::Constant(1.0),
            row_selection: RowSelection::Cyclic,
            block_size: 1,
            max_steps: 1000,
            residual_factor: 1e-6,
        }
    }
}

impl KaczmarzConfig {
    pub fn validate(&self, n_rows: usize) -> Result<()> {
        match self.step_mode {
            StepMode::Constant(alpha) if !(alpha > 0.0 && alpha < 2.0) => {
                return Err(Error::InvalidConfig(format!("step α = {alpha} outside (0, 2)")));
            }
            StepMode::Adaptive(delta) if !(delta > 0.0 && delta <= 1.0) => {
                return Err(Error::InvalidConfig(format!("δ = {delta} outside (0, 1]")));
            }
            _ => {}
        }
        if self.block_size == 0 || self.block_size > n_rows {
            return Err(Error::InvalidConfig(format!(
                "block size {} outside [1, {n_rows}]",
                self.block_size
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        if !(self.residual_factor > 0.0 && self.residual_factor <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "residual factor {} outside (0, 1]",
                self.residual_factor
            )));
        }
        Ok(())
    }
}

/// A block of rows with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSample {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl BlockSample {
    pub fn uniform(indices: Vec<usize>) -> Self {
        let w = 1.0 / indices.len() as f64;
        let weights = vec![w; indices.len()];
        Self { indices, weights }
    }

    pub fn validate(&self, a: &SparseMatrix) -> Result<()> {
        check_len(self.indices.len(), self.weights.len())?;
        if self.indices.is_empty() {
            return Err(Error::InvalidConfig("block must be nonempty".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 || self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "block weights must be positive and sum to 1 (sum {total})"
            )));
        }
        for &i in &self.indices {
            if i >= a.n_rows() {
                return Err(Error::InvalidConfig(format!("row {i} out of range")));
            }
            if row_norm_sq(a, i) == 0.0 {
                return Err(Error::DegenerateRow(i));
            }
        }
        Ok(())
    }

    /// `w̄_i = w_i / ‖a_i‖²`.
    pub fn normalized_weights(&self, a: &SparseMatrix) -> Vec<f64> {
        self.indices
            .iter()
            .zip(&self.weights)
            .map(|(&i, &w)| w / row_norm_sq(a, i))
            .collect()
    }
}

fn row_norm_sq(a: &SparseMatrix, i: usize) -> f64 {
    let (_, vals) = a.row(i);
    dot(vals, vals)
}

/// One Kaczmarz projection step on row `i` with relaxation `α`.
pub fn kaczmarz_step(a: &SparseMatrix, b: &[f64], x: &[f64], i: usize, alpha: f64) -> Result<Vec<f64>> {
    check_len(a.n_rows(), b.len())?;
    check_len(a.n_cols(), x.len())?;
    let nrm = row_norm_sq(a, i);
    if nrm == 0.0 {
        return Err(Error::DegenerateRow(i));
    }
    let mut out = x.to_vec();
    let coef = alpha * (b[i] - a.row_dot(i, x)) / nrm;
    let (cols, vals) = a.row(i);
    for (&j, &v) in cols.iter().zip(vals) {
        out[j] += coef * v;
    }
    Ok(out)
}

/// Samples row indices with probability `‖a_i‖²/‖A‖_F²`.
#[derive(Debug, Clone)]
pub struct RowSampler {
    dist: WeightedIndex<f64>,
}

impl RowSampler {
    pub fn new(row_norms_sq: &[f64]) -> Result<Self> {
        let dist = WeightedIndex::new(row_norms_sq.iter().copied()).map_err(|_| Error::ZeroMatrix)?;
        Ok(Self { dist })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

/// Draws one row index with probability `row_norms_sq[i] / frobenius_sq`.
pub fn sample_row<R: Rng + ?Sized>(row_norms_sq: &[f64], frobenius_sq: f64, rng: &mut R) -> Result<usize> {
    if !(frobenius_sq > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(RowSampler::new(row_norms_sq)?.sample(rng))
}

/// `(α_k, L_k)` for the extrapolated block step at `x`.
pub fn rabk_step_size(
    a: &SparseMatrix,
    x: &[f64],
    b: &[f64],
    block: &BlockSample,
    delta: f64,
) -> Result<(f64, f64)> {
    block.validate(a)?;
    check_len(a.n_cols(), x.len())?;
    check_len(a.n_rows(), b.len())?;
    let wbar = block.normalized_weights(a);
    let residuals: Vec<f64> = block.indices.iter().map(|&i| a.row_dot(i, x) - b[i]).collect();
    let l = step_bound(a, &block.indices, &wbar, &residuals, a.n_cols())?;
    Ok(((2.0 - delta) * l, l))
}

/// `L_k` from block residuals, falling back to `1/λ_max(A_Jᵀ diag(w̄) A_J)`.
fn step_bound(a: &SparseMatrix, rows: &[usize], wbar: &[f64], residuals: &[f64], n: usize) -> Result<f64> {
    let numerator: f64 = wbar.iter().zip(residuals).map(|(w, r)| w * r * r).sum();
    if numerator > 0.0 {
        let d = block_direction(a, rows, wbar, residuals, n);
        let denom = dot(&d, &d);
        if denom > 0.0 {
            return Ok(numerator / denom);
        }
    }
    let lam = spectral::lambda_max_block(a, rows, wbar)?;
    Ok(1.0 / lam)
}

/// `Σ_{i∈J} w̄_i r_i a_i`.
fn block_direction(a: &SparseMatrix, rows: &[usize], wbar: &[f64], residuals: &[f64], n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    for ((&i, &w), &r) in rows.iter().zip(wbar).zip(residuals) {
        let c = w * r;
        if c == 0.0 {
            continue;
        }
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            d[j] += c * v;
        }
    }
    d
}

/// Produces the row blocks visited by a solve.
#[derive(Debug, Clone)]
struct BlockSequence {
    rows: Vec<usize>,
    norms_sq: Vec<f64>,
    tau: usize,
    selection: RowSelection,
    rng: ChaCha8Rng,
    sampler: Option<RowSampler>,
    cursor: usize,
    /// Draw whole epochs: a weighted random permutation of the rows cut into blocks.
    epochs: bool,
    pending: std::collections::VecDeque<Vec<usize>>,
}

impl BlockSequence {
    fn new(a: &SparseMatrix, tau: usize, selection: RowSelection) -> Result<Self> {
        let norms_sq = a.row_norms_sq();
        let rows: Vec<usize> = (0..a.n_rows()).filter(|&i| norms_sq[i] > 0.0).collect();
        if rows.is_empty() {
            return Err(Error::ZeroMatrix);
        }
        if tau > rows.len() {
            return Err(Error::InvalidConfig(format!(
                "block size {tau} exceeds the {} nonzero rows",
                rows.len()
            )));
        }
        let seed = match selection {
            RowSelection::Randomized(s) => s,
            RowSelection::Cyclic => 0,
        };
        let sampler = match selection {
            RowSelection::Randomized(_) if tau == 1 => Some(RowSampler::new(&norms_sq)?),
            _ => None,
        };
        Ok(Self {
            rows,
            norms_sq,
            tau,
            selection,
            rng: ChaCha8Rng::seed_from_u64(seed),
            sampler,
            cursor: 0,
            epochs: false,
            pending: Default::default(),
        })
    }

    /// Randomized selection draws every nonzero row once per epoch, in an order
    /// obtained by successive sampling without replacement `∝ ‖a_i‖²`.
    fn with_epochs(mut self) -> Self {
        self.epochs = true;
        self
    }

    fn push_epoch(&mut self) {
        // Efraimidis–Spirakis keys: sorting by ln(u)/w descending is
        // successive weighted sampling without replacement
        let mut keyed: Vec<(f64, usize)> = self
            .rows
            .iter()
            .map(|&i| {
                let u: f64 = 1.0 - self.rng.random::<f64>();
                (u.ln() / self.norms_sq[i], i)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let order: Vec<usize> = keyed.into_iter().map(|(_, i)| i).collect();
        let m = order.len();
        for start in (0..m).step_by(self.tau) {
            let mut blk: Vec<usize> = (0..self.tau).map(|j| order[(start + j) % m]).collect();
            blk.sort_unstable();
            self.pending.push_back(blk);
        }
    }

    /// Blocks per epoch: enough to touch every nonzero row once on average.
    fn blocks_per_sweep(&self) -> usize {
        self.rows.len().div_ceil(self.tau)
    }

    fn next_block(&mut self) -> Vec<usize> {
        let block = match self.selection {
            RowSelection::Cyclic => {
                let m = self.rows.len();
                (0..self.tau)
                    .map(|j| self.rows[(self.cursor * self.tau + j) % m])
                    .collect()
            }
            RowSelection::Randomized(_) if self.epochs => {
                if self.pending.is_empty() {
                    self.push_epoch();
                }
                self.pending.pop_front().expect("epoch has blocks")
            }
            RowSelection::Randomized(_) => match &self.sampler {
                Some(s) => vec![s.sample(&mut self.rng)],
                None => {
                    let norms = &self.norms_sq;
                    let mut idx = rand::seq::index::sample_weighted(
                        &mut self.rng,
                        norms.len(),
                        |i| norms[i],
                        self.tau,
                    )
                    .expect("row norms are finite and nonnegative")
                    .into_vec();
                    idx.sort_unstable();
                    idx
                }
            },
        };
        self.cursor += 1;
        block
    }
}

/// `λ_max^{block} = max_J λ_max(A_Jᵀ diag(1/‖a_i‖²) A_J)` over the blocks a
/// solve can visit, or an upper bound when there are too many to enumerate.
pub fn lambda_max_block_bound(a: &SparseMatrix, tau: usize, selection: RowSelection) -> Result<f64> {
    if tau == 1 {
        return Ok(1.0);
    }
    let seq = BlockSequence::new(a, tau, selection)?;
    let m = seq.rows.len();
    let unit = |rows: &[usize]| -> Result<f64> {
        let w: Vec<f64> = rows.iter().map(|&i| 1.0 / seq.norms_sq[i]).collect();
        spectral::lambda_max_block(a, rows, &w)
    };
    match selection {
        RowSelection::Cyclic => {
            let distinct = m / gcd(m, tau);
            let mut s = seq.clone();
            let mut best: f64 = 0.0;
            for _ in 0..distinct {
                best = best.max(unit(&s.next_block())?);
            }
            Ok(best)
        }
        RowSelection::Randomized(_) => {
            if binomial(m, tau) <= BLOCK_ENUMERATION_LIMIT && m <= crate::dense::DEFAULT_DENSE_CAP {
                max_over_subsets(a, &seq.rows, &seq.norms_sq, tau)
            } else {
                block_upper_bound(a, &seq.rows, &seq.norms_sq, tau)
            }
        }
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n as u128 - i) / (i + 1);
        if c > BLOCK_ENUMERATION_LIMIT {
            return c;
        }
    }
    c
}

/// Cosine Gram matrix of the given rows.
fn normalized_row_gram(a: &SparseMatrix, rows: &[usize], norms_sq: &[f64]) -> Vec<Vec<f64>> {
    let n = a.n_cols();
    let dense: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| {
            let mut r = vec![0.0; n];
            let (cols, vals) = a.row(i);
            let s = norms_sq[i].sqrt();
            for (&j, &v) in cols.iter().zip(vals) {
                r[j] = v / s;
            }
            r
        })
        .collect();
    let m = rows.len();
    let mut g = vec![vec![0.0; m]; m];
    for p in 0..m {
        for q in 0..=p {
            let d = dot(&dense[p], &dense[q]);
            g[p][q] = d;
            g[q][p] = d;
        }
    }
    g
}

fn max_over_subsets(a: &SparseMatrix, rows: &[usize], norms_sq: &[f64], tau: usize) -> Result<f64> {
    let g = normalized_row_gram(a, rows, norms_sq);
    let m = rows.len();
    let mut comb: Vec<usize> = (0..tau).collect();
    let mut sub = crate::dense::DenseMatrix::zeros(tau, tau);
    let mut best: f64 = 0.0;
    loop {
        for p in 0..tau {
            for q in 0..tau {
                sub[(p, q)] = g[comb[p]][comb[q]];
            }
        }
        let eig = spectral::symmetric_eigenvalues(&sub)?;
        best = best.max(*eig.last().expect("tau >= 1"));
        // advance to the next combination in lexicographic order
        let mut i = tau;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if comb[i] < m - tau + i {
                break;
            }
        }
        comb[i] += 1;
        for j in i + 1..tau {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

/// `min(τ, Gershgorin bound on the cosine Gram, λ_max(Aᵀ diag(1/‖a_i‖²) A))`.
fn block_upper_bound(a: &SparseMatrix, rows: &[usize], norms_sq: &[f64], tau: usize) -> Result<f64> {
    let mut bound = tau as f64;
    if rows.len() <= crate::dense::DEFAULT_DENSE_CAP {
        let g = normalized_row_gram(a, rows, norms_sq);
        let mut gersh: f64 = 0.0;
        for (p, row) in g.iter().enumerate() {
            let mut off: Vec<f64> = row
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != p)
                .map(|(_, v)| v.abs())
                .collect();
            off.sort_by(|x, y| y.total_cmp(x));
            gersh = gersh.max(1.0 + off.iter().take(tau - 1).sum::<f64>());
        }
        bound = bound.min(gersh);
    }
    if a.n_cols() <= crate::dense::DEFAULT_DENSE_CAP {
        let probs: Vec<f64> = (0..a.n_rows()).map(|i| if norms_sq[i] > 0.0 { 1.0 } else { 0.0 }).collect();
        let count: f64 = probs.iter().sum();
        let probs: Vec<f64> = probs.iter().map(|p| p / count).collect();
        let w = spectral::build_w(a, &probs)?;
        let full = spectral::symmetric_eigenvalues(&w)?.last().copied().unwrap_or(0.0) * count;
        bound = bound.min(full);
    }
    Ok(bound)
}

/// Per-solve step machinery shared by the standalone solvers and the inner
/// preconditioner.
#[derive(Debug, Clone)]
struct BlockStepper {
    mode: StepMode,
    constant_step: f64,
}

impl BlockStepper {
    fn new(a: &SparseMatrix, config: &KaczmarzConfig) -> Result<Self> {
        let constant_step = match config.step_mode {
            StepMode::Constant(alpha) if config.block_size == 1 => alpha,
            StepMode::Constant(alpha) => {
                // uniform weights: w_min/w_max² = τ
                let lam = lambda_max_block_bound(a, config.block_size, config.row_selection)?;
                alpha * config.block_size as f64 / lam
            }
            StepMode::Adaptive(_) => f64::NAN,
        };
        Ok(Self {
            mode: config.step_mode,
            constant_step,
        })
    }

    /// `(residuals, w̄)` for a block at `x` against right-hand side `b`.
    fn residuals(&self, a: &SparseMatrix, block: &[usize], x: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let w = 1.0 / block.len() as f64;
        let wbar = block.iter().map(|&i| w / row_norm_sq(a, i)).collect();
        let r = block.iter().map(|&i| a.row_dot(i, x) - b[i]).collect();
        (r, wbar)
    }

    /// Step length for the block, `None` when it has to be computed adaptively.
    fn fixed_step(&self) -> Option<f64> {
        match self.mode {
            StepMode::Constant(_) => Some(self.constant_step),
            StepMode::Adaptive(_) => None,
        }
    }

    fn adaptive_step(&self, a: &SparseMatrix, block: &[usize], wbar: &[f64], r: &[f64]) -> Result<f64> {
        let StepMode::Adaptive(delta) = self.mode else {
            unreachable!("adaptive step requested in constant mode")
        };
        Ok((2.0 - delta) * step_bound(a, block, wbar, r, a.n_cols())?)
    }
}

/// Applies `x ← x − α Σ w̄_i r_i a_i`.
fn apply_block(a: &SparseMatrix, block: &[usize], wbar: &[f64], r: &[f64], alpha: f64, x: &mut [f64]) {
    for ((&i, &w), &ri) in block.iter().zip(wbar).zip(r) {
        let c = alpha * w * ri;
        if c == 0.0 {
            continue;
        }
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            x[j] -= c * v;
        }
    }
}

fn run(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    config: &KaczmarzConfig,
    x_star: Option<&[f64]>,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    config.validate(a.n_rows())?;
    check_len(a.n_rows(), b.len())?;
    check_len(a.n_cols(), x0.len())?;
    if let Some(xs) = x_star {
        check_len(a.n_cols(), xs.len())?;
    }
    let start = Instant::now();
    let mut seq = BlockSequence::new(a, config.block_size, config.row_selection)?;
    let stepper = BlockStepper::new(a, config)?;
    let b_norm = norm2(b);
    let mut hist = ConvergenceHistory::new(b_norm);
    let mut x = x0.to_vec();
    let residual = |x: &[f64]| -> Result<f64> {
        let ax = a.spmv(x)?;
        Ok(dist2(b, &ax))
    };
    let mut res = residual(&x)?;
    hist.residual_norms.push(res);
    if let Some(xs) = x_star {
        hist.errors.push(dist2(&x, xs));
    }
    for _ in 0..config.max_steps {
        if res <= config.residual_factor * b_norm {
            break;
        }
        let block = seq.next_block();
        let (r, wbar) = stepper.residuals(a, &block, &x, b);
        let alpha = match stepper.fixed_step() {
            Some(s) => s,
            None => stepper.adaptive_step(a, &block, &wbar, &r)?,
        };
        apply_block(a, &block, &wbar, &r, alpha, &mut x);
        res = residual(&x)?;
        hist.residual_norms.push(res);
        if let Some(xs) = x_star {
            hist.errors.push(dist2(&x, xs));
        }
    }
    hist.elapsed = start.elapsed();
    Ok((x, hist))
}

/// Single-row Kaczmarz (cyclic or randomized). One step is one row projection.
pub fn rk_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    config: &KaczmarzConfig,
    x_star: Option<&[f64]>,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    if config.block_size != 1 {
        return Err(Error::InvalidConfig("rk_solve uses single rows; set block_size = 1".into()));
    }
    run(a, b, x0, config, x_star)
}

/// Averaged block Kaczmarz with uniform weights `w_i = 1/τ`. One step is one block update.
pub fn rabk_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    config: &KaczmarzConfig,
    x_star: Option<&[f64]>,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    run(a, b, x0, config, x_star)
}

/// Kaczmarz as an inner method for `Az = v`. One inner step is one epoch of
/// `⌈m/τ⌉` block updates that together touch every nonzero row. The block
/// sequence and adaptive step lengths are drawn on first use and replayed
/// afterwards.
pub struct KaczmarzInner<'a> {
    a: &'a SparseMatrix,
    seq: BlockSequence,
    stepper: BlockStepper,
    blocks: Vec<Vec<usize>>,
    steps: Vec<f64>,
    per_sweep: usize,
}

impl<'a> KaczmarzInner<'a> {
    pub fn new(a: &'a SparseMatrix, config: &KaczmarzConfig) -> Result<Self> {
        config.validate(a.n_rows())?;
        let seq = BlockSequence::new(a, config.block_size, config.row_selection)?.with_epochs();
        let per_sweep = seq.blocks_per_sweep();
        Ok(Self {
            a,
            stepper: BlockStepper::new(a, config)?,
            seq,
            blocks: Vec::new(),
            steps: Vec::new(),
            per_sweep,
        })
    }

    pub fn blocks_per_sweep(&self) -> usize {
        self.per_sweep
    }
}

impl InnerMethod for KaczmarzInner<'_> {
    fn name(&self) -> &'static str {
        match (self.stepper.mode, self.seq.selection) {
            (StepMode::Constant(_), RowSelection::Cyclic) => "kaczmarz",
            (StepMode::Constant(_), RowSelection::Randomized(_)) => "randomized-kaczmarz",
            (StepMode::Adaptive(_), RowSelection::Cyclic) => "kaczmarz-adaptive",
            (StepMode::Adaptive(_), RowSelection::Randomized(_)) => "kaczmarz-adaptive-random",
        }
    }

    fn dim(&self) -> usize {
        self.a.n_cols()
    }

    fn begin(&mut self, _v: &[f64]) -> Result<()> {
        Ok(())
    }

    fn step(&mut self, k: usize, v: &[f64], z: &mut [f64]) -> Result<()> {
        for j in 0..self.per_sweep {
            let idx = k * self.per_sweep + j;
            while self.blocks.len() <= idx {
                let blk = self.seq.next_block();
                self.blocks.push(blk);
            }
            let block = &self.blocks[idx];
            let (r, wbar) = self.stepper.residuals(self.a, block, z, v);
            let alpha = match self.stepper.fixed_step() {
                Some(s) => s,
                None => {
                    if idx >= self.steps.len() {
                        debug_assert_eq!(idx, self.steps.len());
                        let s = self.stepper.adaptive_step(self.a, block, &wbar, &r)?;
                        self.steps.push(s);
                    }
                    self.steps[idx]
                }
            };
            apply_block(self.a, block, &wbar, &r, alpha, z);
        }
        Ok(())
    }
}
