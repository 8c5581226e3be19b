//! Inner-iteration preconditioning: a map `v ↦ z` obtained by running a few
//! steps of an inner solver on `Az = v` from `z = 0`.
//!
//! Inner methods whose coefficients depend on the data (adaptive Kaczmarz
//! steps, CG recurrences) record those coefficients the first time a step
//! index is reached and replay them afterwards, so every later application
//! is one fixed linear map.

use crate::error::{check_len, Result};
use crate::sparse::SparseMatrix;
use crate::vector::{norm2, sub};

/// One inner solver for `Az = v`.
pub trait InnerMethod {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    /// Prepares a new application with right-hand side `v`; `z` starts at zero.
    fn begin(&mut self, v: &[f64]) -> Result<()>;

    /// Performs inner step `k` (0-based) of the current application.
    fn step(&mut self, k: usize, v: &[f64], z: &mut [f64]) -> Result<()>;

    /// Largest depth worth trying; methods that solve exactly return 1.
    fn natural_max_depth(&self) -> usize {
        usize::MAX
    }
}

/// How the depth `ℓ_k` is chosen across outer iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthMode {
    /// Always `ℓ` steps.
    Fixed(usize),
    /// Select `ℓ` by the residual rule on the first application, then keep it.
    FirstApplication,
    /// Select `ℓ` by the residual rule on every application.
    Flexible,
}

impl DepthMode {
    pub fn label(&self) -> &'static str {
        match self {
            DepthMode::Fixed(_) => "fixed",
            DepthMode::FirstApplication => "constant",
            DepthMode::Flexible => "flexible",
        }
    }
}

/// Result of [`select_inner_depth`].
#[derive(Debug, Clone)]
pub struct DepthSelection {
    pub z: Vec<f64>,
    pub depth: usize,
    pub relative_residual: f64,
}

/// Runs inner steps on `Az = v` until `‖v − Az‖ ≤ η‖v‖` or `ℓ_max` steps.
pub fn select_inner_depth(
    method: &mut dyn InnerMethod,
    a: &SparseMatrix,
    v: &[f64],
    max_depth: usize,
    eta: f64,
) -> Result<DepthSelection> {
    check_len(method.dim(), v.len())?;
    let max_depth = max_depth.max(1);
    let v_norm = norm2(v);
    let mut z = vec![0.0; v.len()];
    method.begin(v)?;
    let mut rel = 1.0;
    for l in 1..=max_depth {
        method.step(l - 1, v, &mut z)?;
        let r = norm2(&sub(v, &a.spmv(&z)?));
        rel = if v_norm > 0.0 { r / v_norm } else { 0.0 };
        if r <= eta * v_norm {
            return Ok(DepthSelection {
                z,
                depth: l,
                relative_residual: rel,
            });
        }
    }
    Ok(DepthSelection {
        z,
        depth: max_depth,
        relative_residual: rel,
    })
}

/// Runs exactly `depth` inner steps from `z = 0`.
pub fn apply_fixed_depth(method: &mut dyn InnerMethod, v: &[f64], depth: usize) -> Result<Vec<f64>> {
    check_len(method.dim(), v.len())?;
    let mut z = vec![0.0; v.len()];
    method.begin(v)?;
    for k in 0..depth {
        method.step(k, v, &mut z)?;
    }
    Ok(z)
}

/// The preconditioner `B^{ℓ}` realised by an inner method.
pub struct InnerPreconditioner<'a> {
    a: &'a SparseMatrix,
    method: Box<dyn InnerMethod + 'a>,
    mode: DepthMode,
    max_depth: usize,
    eta: f64,
    chosen: Option<usize>,
    last_depth: usize,
    residual_checks: usize,
    total_steps: usize,
}

impl<'a> InnerPreconditioner<'a> {
    pub fn new(
        a: &'a SparseMatrix,
        method: Box<dyn InnerMethod + 'a>,
        mode: DepthMode,
        max_depth: usize,
        eta: f64,
    ) -> Self {
        let max_depth = max_depth.max(1).min(method.natural_max_depth());
        let chosen = match mode {
            DepthMode::Fixed(l) => Some(l),
            _ => None,
        };
        Self {
            a,
            method,
            mode,
            max_depth,
            eta,
            chosen,
            last_depth: 0,
            residual_checks: 0,
            total_steps: 0,
        }
    }

    pub fn name(&self) -> &'static str {
        self.method.name()
    }

    pub fn mode(&self) -> DepthMode {
        self.mode
    }

    pub fn last_depth(&self) -> usize {
        self.last_depth
    }

    /// Products with `A` spent on inner residual checks.
    pub fn residual_checks(&self) -> usize {
        self.residual_checks
    }

    /// Inner steps over every application so far.
    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn apply(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        let z = match (self.mode, self.chosen) {
            (DepthMode::Flexible, _) | (DepthMode::FirstApplication, None) => {
                let sel = select_inner_depth(self.method.as_mut(), self.a, v, self.max_depth, self.eta)?;
                self.residual_checks += sel.depth;
                if self.mode == DepthMode::FirstApplication {
                    self.chosen = Some(sel.depth);
                }
                self.last_depth = sel.depth;
                sel.z
            }
            (DepthMode::Fixed(depth), _) | (DepthMode::FirstApplication, Some(depth)) => {
                self.last_depth = depth;
                apply_fixed_depth(self.method.as_mut(), v, depth)?
            }
        };
        self.total_steps += self.last_depth;
        Ok(z)
    }
}

/// Weighted Jacobi splitting `M = D/ω`: one step is `z ← z + ω D⁻¹(v − Az)`.
pub struct JacobiInner<'a> {
    a: &'a SparseMatrix,
    inv_diag: Vec<f64>,
    omega: f64,
}

impl<'a> JacobiInner<'a> {
    pub fn new(a: &'a SparseMatrix, omega: f64) -> Result<Self> {
        a.require_square()?;
        let inv_diag = a
            .diagonal()
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if d == 0.0 {
                    Err(crate::error::Error::InvalidStructure(format!(
                        "zero diagonal entry at row {i}"
                    )))
                } else {
                    Ok(1.0 / d)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { a, inv_diag, omega })
    }
}

impl InnerMethod for JacobiInner<'_> {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn dim(&self) -> usize {
        self.inv_diag.len()
    }

    fn begin(&mut self, _v: &[f64]) -> Result<()> {
        Ok(())
    }

    fn step(&mut self, _k: usize, v: &[f64], z: &mut [f64]) -> Result<()> {
        let az = self.a.spmv(z)?;
        for i in 0..z.len() {
            z[i] += self.omega * self.inv_diag[i] * (v[i] - az[i]);
        }
        Ok(())
    }
}

/// Direct dense solve, `B = A⁻¹`.
pub struct ExactInner {
    lu: crate::dense::LuFactor,
}

impl ExactInner {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        a.require_square()?;
        Ok(Self {
            lu: crate::dense::LuFactor::new(&a.to_dense()?)?,
        })
    }
}

impl InnerMethod for ExactInner {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn dim(&self) -> usize {
        self.lu.dim()
    }

    fn begin(&mut self, _v: &[f64]) -> Result<()> {
        Ok(())
    }

    fn step(&mut self, _k: usize, v: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&self.lu.solve(v)?);
        Ok(())
    }

    fn natural_max_depth(&self) -> usize {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::gen_tridiagonal;

    #[test]
    fn exact_inner_selects_depth_one() {
        let a = gen_tridiagonal(6).unwrap();
        let mut m = ExactInner::new(&a).unwrap();
        let v = vec![1.0; 6];
        let sel = select_inner_depth(&mut m, &a, &v, 10, 1e-8).unwrap();
        assert_eq!(sel.depth, 1);
        assert!(sel.relative_residual < 1e-14);
    }

    #[test]
    fn eta_one_accepts_first_step() {
        let a = gen_tridiagonal(8).unwrap();
        let mut m = JacobiInner::new(&a, 1.0).unwrap();
        let sel = select_inner_depth(&mut m, &a, &[1.0; 8], 20, 1.0).unwrap();
        assert_eq!(sel.depth, 1);
    }

    #[test]
    fn first_application_depth_is_kept() {
        let a = gen_tridiagonal(10).unwrap();
        let mut p = InnerPreconditioner::new(
            &a,
            Box::new(JacobiInner::new(&a, 1.0).unwrap()),
            DepthMode::FirstApplication,
            30,
            1e-3,
        );
        p.apply(&[1.0; 10]).unwrap();
        let first = p.last_depth();
        assert!(first > 1);
        p.apply(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.last_depth(), first);
        assert_eq!(p.residual_checks(), first);
        assert_eq!(p.total_steps(), 2 * first);
    }
}
