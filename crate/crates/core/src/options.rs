//! Centralized numeric defaults, echoed in CLI output headers.

use serde::{Deserialize, Serialize};

/// Tunable tolerances and sizes shared by all modules.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericOptions {
    /// Absolute quadrature tolerance.
    pub quad_abs_tol: f64,
    /// Relative quadrature tolerance.
    pub quad_rel_tol: f64,
    /// Budget of adaptive subdivisions per quadrature call.
    pub max_subdivisions: usize,
    /// Truncation steps toward the open endpoint (survival mass halves each step).
    pub tail_steps: usize,
    /// Quantile-spaced points of the continuous part in validation grids.
    pub grid_size: usize,
    /// Grid points must keep `Ḡ(t)` at or above this floor.
    pub survival_floor: f64,
    /// Half-width of the zero band when deciding the sign of `lim F·Ḡ`.
    pub sign_tol: f64,
    /// Tolerance for Condition-M residual checks.
    pub condition_m_tol: f64,
    /// Default Monte Carlo sample size.
    pub n_paths: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            quad_abs_tol: 1e-10,
            quad_rel_tol: 1e-8,
            max_subdivisions: 2000,
            tail_steps: 40,
            grid_size: 64,
            survival_floor: 1e-12,
            sign_tol: 1e-7,
            condition_m_tol: 1e-8,
            n_paths: 100_000,
        }
    }
}
