//! Centralized numerical tolerances. Every checker in the crate reads
//! from one [`Tolerances`] record so that a scenario can tighten or relax
//! thresholds in a single place.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Autodiff vs finite-difference agreement.
    pub gradient: f64,
    /// Structural identity checks (metric compatibility, conformal factor, ...).
    pub identity: f64,
    /// Tight algebraic identities (navigation form vs alpha+beta, Legendre round trips).
    pub exact_identity: f64,
    /// Generalized eigenproblem residual, relative to ||A||.
    pub eigen_residual: f64,
    /// Eigenvalues closer than this form one multiplicity class.
    pub eigen_group: f64,
    /// Spread of the derivative-of-spray consistency check.
    pub spray_derivative: f64,
    /// Divergence-form vs trace-form Laplacian agreement.
    pub laplacian_cross: f64,
    /// Principal-curvature shift and pointwise normal-derivative residuals.
    pub shift: f64,
    /// Eigenspace principal angles (radians).
    pub principal_angle: f64,
    /// Absolute part of the per-level constancy test.
    pub level_abs: f64,
    /// Relative part of the per-level constancy test.
    pub level_rel: f64,
    /// Relaxed tolerance for profile identities that involve fitted derivatives.
    pub profile_relaxed: f64,
    /// Points with |df|_h below this are treated as critical and excluded.
    pub critical_gradient: f64,

    pub newton_residual: f64,
    pub max_newton_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gradient: 1e-6,
            identity: 1e-8,
            exact_identity: 1e-10,
            eigen_residual: 1e-10,
            eigen_group: 1e-7,
            spray_derivative: 1e-8,
            laplacian_cross: 1e-6,
            shift: 1e-6,
            principal_angle: 1e-4,
            level_abs: 1e-6,
            level_rel: 1e-6,
            profile_relaxed: 1e-4,
            critical_gradient: 1e-8,
            newton_residual: 1e-11,
            max_newton_iters: 60,
        }
    }
}

impl Tolerances {
    /// Threshold for "constant on a level" given the level mean.
    pub fn level_spread(&self, mean: f64) -> f64 {
        self.level_abs + self.level_rel * mean.abs()
    }
}
