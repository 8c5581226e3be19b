use std::time::Duration;

/// Per-iteration record of an iterative solve. Index 0 is the initial state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceHistory {
    /// Residual norms, absolute.
    pub residual_norms: Vec<f64>,
    /// Norm that `residual_norms` are divided by for relative residuals.
    pub reference_norm: f64,
    /// `‖x_k − x*‖` when the exact solution was supplied.
    pub errors: Vec<f64>,
    /// Inner steps spent in each iteration; empty for methods without an inner loop.
    pub inner_steps: Vec<usize>,
    /// Iterates, only when recording was requested.
    pub iterates: Vec<Vec<f64>>,
    pub elapsed: Duration,
}

impl ConvergenceHistory {
    pub fn new(reference_norm: f64) -> Self {
        Self {
            reference_norm,
            ..Self::default()
        }
    }

    /// Number of completed iterations.
    pub fn iterations(&self) -> usize {
        self.residual_norms.len().saturating_sub(1)
    }

    pub fn relative_residuals(&self) -> Vec<f64> {
        let denom = if self.reference_norm > 0.0 {
            self.reference_norm
        } else {
            1.0
        };
        self.residual_norms.iter().map(|r| r / denom).collect()
    }

    pub fn last_relative_residual(&self) -> f64 {
        self.relative_residuals().last().copied().unwrap_or(f64::NAN)
    }
}
