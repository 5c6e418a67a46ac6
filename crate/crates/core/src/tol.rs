//! Numeric tolerances and budgets in force throughout the crate.
//!
//! Every threshold used by the library and its verification suites is
//! pinned here so that run manifests can record the exact configuration.

use serde::Serialize;

/// Default iteration budget for escape-time computations.
pub const DEFAULT_BUDGET: u32 = 1024;

/// Green tail is truncated once the certified error bound drops below this.
pub const GREEN_TAIL_TOL: f64 = 1e-12;

/// Bottcher product is truncated when the current factor is within this of 1.
pub const BOTTCHER_FACTOR_TOL: f64 = 1e-15;

/// Magnitude beyond which orbits switch to log-polar bookkeeping.
pub const HUGE_SWITCH: f64 = 1e100;

/// Newton residual target for cycle refinement and curve polishing.
pub const NEWTON_TOL: f64 = 1e-13;

/// Sampled curve points must satisfy the defining equation to this.
pub const CURVE_RESIDUAL_TOL: f64 = 1e-8;

/// Misiurewicz candidates must re-verify their residuals below this.
pub const MIS_RESIDUAL_TOL: f64 = 1e-9;

/// Points closer than this are merged when deduplicating solutions.
pub const DEDUP_RADIUS: f64 = 1e-7;

/// Critical point must be off its landing cycle by this to count as strict.
pub const STRICT_CYCLE_TOL: f64 = 1e-7;

/// Jacobian condition number beyond which an intersection is flagged.
pub const JACOBIAN_CONDITION_FLAG: f64 = 1e8;

/// Condition level that already triggers local multiplicity counting
/// (tangential intersections land their Newton runs here).
pub const MULTIPLICITY_SNIFF_CONDITION: f64 = 1e4;

/// Relative margin keeping figure-eight labels away from the pinch.
pub const FIGURE_EIGHT_MARGIN: f64 = 0.02;

/// Highest supported power level for branches of `phi_minus`.
pub const PHI_MINUS_J_MAX: u32 = 6;

/// Finite-difference step scale for numerical Jacobians.
pub const FD_STEP: f64 = 1e-6;

/// Maximum number of step halvings during leaf continuation.
pub const MAX_STEP_HALVINGS: u32 = 8;

/// Smallest supported transversal level (`|k|` at the chart defaults).
pub fn transversal_k_min() -> f64 {
    2f64.powf(2.0 / 3.0) * 500.0
}

/// Snapshot of the tolerances, serialized into run manifests.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub default_budget: u32,
    pub green_tail_tol: f64,
    pub bottcher_factor_tol: f64,
    pub newton_tol: f64,
    pub curve_residual_tol: f64,
    pub mis_residual_tol: f64,
    pub dedup_radius: f64,
    pub strict_cycle_tol: f64,
    pub jacobian_condition_flag: f64,
    pub figure_eight_margin: f64,
    pub phi_minus_j_max: u32,
    pub fd_step: f64,
    pub max_step_halvings: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            default_budget: DEFAULT_BUDGET,
            green_tail_tol: GREEN_TAIL_TOL,
            bottcher_factor_tol: BOTTCHER_FACTOR_TOL,
            newton_tol: NEWTON_TOL,
            curve_residual_tol: CURVE_RESIDUAL_TOL,
            mis_residual_tol: MIS_RESIDUAL_TOL,
            dedup_radius: DEDUP_RADIUS,
            strict_cycle_tol: STRICT_CYCLE_TOL,
            jacobian_condition_flag: JACOBIAN_CONDITION_FLAG,
            figure_eight_margin: FIGURE_EIGHT_MARGIN,
            phi_minus_j_max: PHI_MINUS_J_MAX,
            fd_step: FD_STEP,
            max_step_halvings: MAX_STEP_HALVINGS,
        }
    }
}
